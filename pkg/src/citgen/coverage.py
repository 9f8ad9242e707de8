"""Combination matrix: coverage counters for every t-wise value combination.

One row per ascending t-subset of parameters, one column per value vector
over ``max_domain ** t`` (mixed-radix, lexicographic).  A cell holds how many
solution rows cover that combination, or ``-1`` if the combination does not
exist (out of some parameter's domain, or forbidden).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterator, Sequence

import numpy as np

from .constraints import ForbiddenTupleSet
from .model import ParameterSpace, PartialTuple

MISSING = -1


class CoverageError(RuntimeError):
    """A cover/uncover touched a cell it must not (caller logic fault)."""


@dataclass
class CoverageDelta:
    """Cells touched by one cover/uncover, with their previous counts."""

    cells: list[tuple[int, int]]


class CombinationMatrix:
    def __init__(self, space: ParameterSpace, t: int):
        space.check_strength(t)
        self.space = space
        self.t = t
        self.radix = max(space.sizes)
        self.combos: list[tuple[int, ...]] = list(combinations(range(space.k), t))
        self.ncols = self.radix ** t
        weights = [self.radix ** (t - 1 - i) for i in range(t)]
        # per row: [(parameter, weight), ...] and base offset into the flat cell list
        self._addr = [
            (r * self.ncols, tuple(zip(combo, weights))) for r, combo in enumerate(self.combos)
        ]
        # parameter -> rows whose combination contains it
        self._rows_of = [
            [r for r, combo in enumerate(self.combos) if p in combo] for p in range(space.k)
        ]
        self.cells: list[int] = []
        sizes = space.sizes
        for combo in self.combos:
            for vals in product(range(self.radix), repeat=t):
                inside = all(v < sizes[p] for p, v in zip(combo, vals))
                self.cells.append(0 if inside else MISSING)
        self.uncovered = sum(1 for c in self.cells if c == 0)
        self.multi_covered = 0
        self.coverable = self.uncovered

    # addressing -----------------------------------------------------------

    @property
    def nrows(self) -> int:
        return len(self.combos)

    def cell_index(self, row: int, tc: Sequence[int]) -> int:
        base, pw = self._addr[row]
        return base + sum(tc[p] * w for p, w in pw)

    def cell_indices(self, tc: Sequence[int]) -> list[int]:
        return [base + sum(tc[p] * w for p, w in pw) for base, pw in self._addr]

    def cell_tuple(self, index: int) -> PartialTuple:
        row, col = divmod(index, self.ncols)
        vals = []
        for _ in range(self.t):
            col, v = divmod(col, self.radix)
            vals.append(v)
        return tuple(zip(self.combos[row], reversed(vals)))

    def tuple_index(self, pt: PartialTuple) -> int:
        combo = tuple(p for p, _ in pt)
        row = self.combos.index(combo)
        col = 0
        for _, v in pt:
            col = col * self.radix + v
        return row * self.ncols + col

    def count(self, pt: PartialTuple) -> int:
        return self.cells[self.tuple_index(pt)]

    def grid(self) -> np.ndarray:
        return np.array(self.cells, dtype=int).reshape(self.nrows, self.ncols)

    def row_labels(self) -> list[str]:
        return ["(" + ",".join(map(str, c)) + ")" for c in self.combos]

    def column_labels(self) -> list[str]:
        return [
            "(" + ",".join(map(str, vals)) + ")"
            for vals in product(range(self.radix), repeat=self.t)
        ]

    # mutation -------------------------------------------------------------

    def clean(self, fset: ForbiddenTupleSet) -> "CombinationMatrix":
        """Mark every existing combination that contains a forbidden tuple as -1."""
        for i, c in enumerate(self.cells):
            if c == MISSING:
                continue
            if fset.tuple_forbidden(self.cell_tuple(i)):
                if c != 0:
                    raise CoverageError("clean() expects an uncovered matrix")
                self.cells[i] = MISSING
                self.uncovered -= 1
                self.coverable -= 1
        return self

    def cover(self, tc: Sequence[int]) -> CoverageDelta:
        cells = self.cells
        touched = []
        for i in self.cell_indices(tc):
            c = cells[i]
            if c == MISSING:
                self._rollback(touched)
                raise CoverageError(f"cover of nonexistent combination {self.cell_tuple(i)}")
            touched.append((i, c))
            cells[i] = c + 1
            if c == 0:
                self.uncovered -= 1
            elif c == 1:
                self.multi_covered += 1
        return CoverageDelta(touched)

    def uncover(self, tc: Sequence[int]) -> CoverageDelta:
        cells = self.cells
        touched = []
        for i in self.cell_indices(tc):
            c = cells[i]
            if c <= 0:
                self._rollback(touched)
                raise CoverageError(f"uncover of cell {self.cell_tuple(i)} holding {c}")
            touched.append((i, c))
            cells[i] = c - 1
            if c == 1:
                self.uncovered += 1
            elif c == 2:
                self.multi_covered -= 1
        return CoverageDelta(touched)

    def undo(self, delta: CoverageDelta) -> None:
        self._rollback(delta.cells)

    def _rollback(self, touched):
        for i, prev in reversed(touched):
            self._set(i, prev)

    def _set(self, i: int, new: int) -> None:
        old = self.cells[i]
        if old == 0:
            self.uncovered -= 1
        elif old >= 2:
            self.multi_covered -= 1
        if new == 0:
            self.uncovered += 1
        elif new >= 2:
            self.multi_covered += 1
        self.cells[i] = new

    def copy(self) -> "CombinationMatrix":
        other = object.__new__(CombinationMatrix)
        other.__dict__.update(self.__dict__)
        other.cells = list(self.cells)
        return other

    def assign_from(self, other: "CombinationMatrix") -> None:
        self.cells = list(other.cells)
        self.uncovered = other.uncovered
        self.multi_covered = other.multi_covered

    # evaluation -----------------------------------------------------------

    def score(self) -> int:
        """Number of existing combinations covered at least once."""
        return self.coverable - self.uncovered

    def cell_change_gain(self, tc: Sequence[int], p: int, v: int) -> int:
        """Score change if ``tc`` (already covered in) had ``tc[p]`` set to ``v``."""
        old = tc[p]
        if old == v:
            return 0
        cells = self.cells
        gain = 0
        for r in self._rows_of[p]:
            base, pw = self._addr[r]
            rest = 0
            w_p = 0
            for q, w in pw:
                if q == p:
                    w_p = w
                else:
                    rest += tc[q] * w
            if cells[base + rest + old * w_p] == 1:
                gain -= 1
            if cells[base + rest + v * w_p] == 0:
                gain += 1
        return gain

    def row_swap_gain(self, old: Sequence[int], new: Sequence[int]) -> int:
        """Score change if row ``old`` (already covered in) were replaced by ``new``."""
        cells = self.cells
        gain = 0
        for base, pw in self._addr:
            i = base + sum(old[p] * w for p, w in pw)
            j = base + sum(new[p] * w for p, w in pw)
            if i == j:
                continue
            if cells[i] == 1:
                gain -= 1
            if cells[j] == 0:
                gain += 1
        return gain

    def uncovered_indices(self) -> Iterator[int]:
        return (i for i, c in enumerate(self.cells) if c == 0)

    def uncovered_tuples(self) -> list[PartialTuple]:
        return [self.cell_tuple(i) for i in self.uncovered_indices()]

    def rescan(self) -> tuple[int, int]:
        """(uncovered, multi-covered) recomputed from scratch."""
        return (
            sum(1 for c in self.cells if c == 0),
            sum(1 for c in self.cells if c >= 2),
        )

    def render(self) -> str:
        """Bordered text table with row and column labels."""
        rows = self.row_labels()
        cols = self.column_labels()
        grid = self.grid()
        w = max(max(map(len, cols)), 2)
        lw = max(map(len, rows))
        out = [" " * lw + " " + " ".join(c.rjust(w) for c in cols)]
        for label, line in zip(rows, grid):
            out.append(label.rjust(lw) + " " + " ".join(str(x).rjust(w) for x in line))
        return "\n".join(out)


def build_matrix(space: ParameterSpace, t: int) -> CombinationMatrix:
    return CombinationMatrix(space, t)


def clean_matrix(m: CombinationMatrix, fset: ForbiddenTupleSet) -> CombinationMatrix:
    return m.clean(fset)


def cover_combinations(m: CombinationMatrix, tc: Sequence[int]) -> CoverageDelta:
    return m.cover(tc)


def uncover_combinations(m: CombinationMatrix, tc: Sequence[int]) -> CoverageDelta:
    return m.uncover(tc)


def uncovered_tuples(m: CombinationMatrix) -> list[PartialTuple]:
    return m.uncovered_tuples()


def coverage_score(m: CombinationMatrix) -> int:
    return m.score()
