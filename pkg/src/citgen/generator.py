"""Test-suite construction and minimization.

The pipeline builds and cleans the combination matrix, constructs an initial
covering suite, then repeatedly tries to drop one row and repair coverage
with randomized neighborhood moves:

* N1: best new value for one random cell (the current value is excluded).
* N2: for one random column, best value per row, top to bottom.
* N3: pick a random uncovered combination and write it into the row where
  doing so yields the best coverage.

Every move only considers candidates that keep all rows valid.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .constraints import DEFAULT_DERIVATION_CAP, ForbiddenTupleSet, Unsatisfiable, close_tuples
from .coverage import CombinationMatrix, build_matrix
from .model import ParameterSpace, TestCase, hamming_distance
from .parser import ModelFile

DEFAULT_WEIGHTS = (0.1, 0.1, 0.8)
DEFAULT_MAX_MODIFICATIONS = 600
RANDOM_RETRIES = 100

Solution = list  # list of mutable rows (lists of value indices)


class GenerationError(RuntimeError):
    """The search could not produce a valid row that makes progress."""


@dataclass(frozen=True)
class GeneratorConfig:
    strength: int = 2
    seed: int = 0
    improve_rounds: Optional[int] = None
    time_budget: Optional[float] = None  # seconds
    max_modifications: int = DEFAULT_MAX_MODIFICATIONS
    neighborhood_weights: tuple[float, float, float] = DEFAULT_WEIGHTS
    random_pair_phase: bool = True
    derivation_cap: int = DEFAULT_DERIVATION_CAP

    def __post_init__(self):
        if (self.improve_rounds is None) == (self.time_budget is None):
            raise ValueError("set exactly one of improve_rounds and time_budget")
        if self.improve_rounds is not None and self.improve_rounds < 0:
            raise ValueError("improve_rounds must be >= 0")
        if self.time_budget is not None and self.time_budget < 0:
            raise ValueError("time_budget must be >= 0")
        if self.max_modifications < 1:
            raise ValueError("max_modifications must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        w = self.neighborhood_weights
        if len(w) != 3 or any(x < 0 for x in w) or abs(sum(w) - 1.0) > 1e-9:
            raise ValueError("neighborhood weights must be 3 nonnegative numbers summing to 1")


# -- random rows -------------------------------------------------------------


def complete_row(
    partial: dict[int, int], space: ParameterSpace, fset: ForbiddenTupleSet, rng: random.Random
) -> Optional[TestCase]:
    """Randomly extend a partial assignment to a valid test case, backtracking on dead ends."""
    if fset.tuple_forbidden(tuple(sorted(partial.items()))):
        return None
    assign = dict(partial)
    order = [p for p in range(space.k) if p not in assign]
    rng.shuffle(order)

    def rec(i: int) -> bool:
        if i == len(order):
            return True
        p = order[i]
        values = list(range(space.domain_size(p)))
        rng.shuffle(values)
        for v in values:
            if fset.completes_forbidden(assign, p, v):
                continue
            assign[p] = v
            if rec(i + 1):
                return True
            del assign[p]
        return False

    if not rec(0):
        return None
    return tuple(assign[p] for p in range(space.k))


def random_valid_test_case(
    space: ParameterSpace, fset: ForbiddenTupleSet, rng: random.Random, retries: int = RANDOM_RETRIES
) -> TestCase:
    sizes = space.sizes
    for _ in range(retries):
        tc = tuple(rng.randrange(n) for n in sizes)
        if fset.is_valid(tc):
            return tc
    tc = complete_row({}, space, fset, rng)
    if tc is None:
        raise Unsatisfiable("no assignment avoids every forbidden tuple; no valid test case exists")
    return tc


# -- initial solution --------------------------------------------------------


def _disjoint_cover_row(m: CombinationMatrix, fset: ForbiddenTupleSet, rng: random.Random) -> TestCase:
    uncovered = sorted(m.uncovered_tuples(), key=lambda u: (-len(u), u))
    partial: dict[int, int] = {}
    for u in uncovered:
        if any(p in partial for p, _ in u):
            continue
        merged = dict(partial)
        merged.update(u)
        if fset.tuple_forbidden(tuple(sorted(merged.items()))):
            continue
        partial = merged
    tc = complete_row(partial, m.space, fset, rng)
    if tc is None:
        # the merged set may be unextendable even if each tuple alone is fine
        tc = complete_row(dict(uncovered[0]), m.space, fset, rng)
    if tc is None:
        raise GenerationError(
            f"uncovered combination {m.space.format_tuple(uncovered[0])} "
            "cannot be extended to a valid test case"
        )
    return tc


def initial_solution(
    m: CombinationMatrix,
    fset: ForbiddenTupleSet,
    rng: random.Random,
    random_pair_phase: bool = True,
    trace: Optional[Callable[[str, int, int], None]] = None,
) -> Solution:
    """Build rows until every existing combination is covered; ``m`` is updated in place.

    ``trace(phase, uncovered, multi_covered)`` is called before each row is
    added, with phase ``"random"`` or ``"disjoint"``.
    """
    space = m.space
    sol: Solution = []
    while m.uncovered != 0:
        if random_pair_phase and m.uncovered > m.multi_covered:
            phase = "random"
            first = random_valid_test_case(space, fset, rng)
            second = random_valid_test_case(space, fset, rng)
            d1 = sum(hamming_distance(first, row) for row in sol)
            d2 = sum(hamming_distance(second, row) for row in sol)
            tc = first if d1 > d2 else second
        else:
            phase = "disjoint"
            tc = _disjoint_cover_row(m, fset, rng)
        if trace is not None:
            trace(phase, m.uncovered, m.multi_covered)
        m.cover(tc)
        sol.append(list(tc))
    return sol


# -- neighborhoods -----------------------------------------------------------


def _best_cell_value(row, c, m, fset, rng, keep_current):
    current = row[c]
    best_gain = None
    best = []
    for v in range(m.space.domain_size(c)):
        if v == current:
            if not keep_current:
                continue
            gain = 0
        else:
            if not fset.change_is_valid(row, c, v):
                continue
            gain = m.cell_change_gain(row, c, v)
        if best_gain is None or gain > best_gain:
            best_gain, best = gain, [v]
        elif gain == best_gain:
            best.append(v)
    if not best:
        return current
    return best[0] if len(best) == 1 else rng.choice(best)


def _set_cell(sol: Solution, r: int, c: int, v: int, m: CombinationMatrix) -> None:
    row = sol[r]
    if row[c] == v:
        return
    m.uncover(row)
    row[c] = v
    m.cover(row)


def neighborhood_n1(sol: Solution, m: CombinationMatrix, fset: ForbiddenTupleSet, rng: random.Random) -> bool:
    """Move one random cell to its best valid alternative value. Returns True if changed."""
    if not sol:
        return False
    r = rng.randrange(len(sol))
    c = rng.randrange(m.space.k)
    v = _best_cell_value(sol[r], c, m, fset, rng, keep_current=False)
    if v == sol[r][c]:
        return False
    _set_cell(sol, r, c, v, m)
    return True


def neighborhood_n2(sol: Solution, m: CombinationMatrix, fset: ForbiddenTupleSet, rng: random.Random) -> bool:
    """Re-optimize every cell of one random column, top to bottom."""
    if not sol:
        return False
    c = rng.randrange(m.space.k)
    changed = False
    for r in range(len(sol)):
        v = _best_cell_value(sol[r], c, m, fset, rng, keep_current=True)
        if v != sol[r][c]:
            _set_cell(sol, r, c, v, m)
            changed = True
    return changed


def neighborhood_n3(sol: Solution, m: CombinationMatrix, fset: ForbiddenTupleSet, rng: random.Random) -> bool:
    """Write a random uncovered combination into the row where it scores best."""
    if not sol or m.uncovered == 0:
        return False
    u = m.cell_tuple(rng.choice(list(m.uncovered_indices())))
    best_gain = None
    best = []
    for r, row in enumerate(sol):
        new = list(row)
        for p, v in u:
            new[p] = v
        if not fset.is_valid(new):
            continue
        gain = m.row_swap_gain(row, new)
        if best_gain is None or gain > best_gain:
            best_gain, best = gain, [(r, new)]
        elif gain == best_gain:
            best.append((r, new))
    if not best:
        return False
    r, new = best[0] if len(best) == 1 else rng.choice(best)
    m.uncover(sol[r])
    sol[r] = new
    m.cover(new)
    return True


NEIGHBORHOODS = (neighborhood_n1, neighborhood_n2, neighborhood_n3)


def choose_neighborhood(rng: random.Random, weights: Sequence[float] = DEFAULT_WEIGHTS) -> int:
    """Index 0, 1 or 2 drawn with the given probabilities."""
    x = rng.random()
    acc = 0.0
    for i, w in enumerate(weights):
        acc += w
        if x < acc:
            return i
    return len(weights) - 1


def improve_once(
    sol: Solution,
    m: CombinationMatrix,
    fset: ForbiddenTupleSet,
    rng: random.Random,
    max_modifications: int = DEFAULT_MAX_MODIFICATIONS,
    weights: Sequence[float] = DEFAULT_WEIGHTS,
    deadline: Optional[float] = None,
) -> Solution:
    """Delete a random row and try to restore full coverage within the move budget.

    Returns the shorter solution on success, otherwise ``sol`` itself.  ``m``
    always ends up matching the returned solution.  ``deadline`` is a
    ``time.monotonic()`` value after which the attempt is abandoned.
    """
    if not sol:
        return sol
    trial_m = m.copy()
    trial = [list(row) for row in sol]
    deleted = trial.pop(rng.randrange(len(trial)))
    trial_m.uncover(deleted)
    if trial_m.uncovered == 0:
        m.assign_from(trial_m)
        return trial
    for i in range(max_modifications):
        if deadline is not None and i % 16 == 0 and time.monotonic() >= deadline:
            break
        NEIGHBORHOODS[choose_neighborhood(rng, weights)](trial, trial_m, fset, rng)
        if trial_m.uncovered == 0:
            m.assign_from(trial_m)
            return trial
    return sol


# -- pipeline ----------------------------------------------------------------


@dataclass
class GenerationResult:
    space: ParameterSpace
    strength: int
    seed: int
    tests: list[TestCase]
    initial_size: int
    iterations: int
    coverable: int
    forbidden: ForbiddenTupleSet
    matrix: CombinationMatrix
    size_history: list[int] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.tests)

    def named_tests(self) -> list[tuple[str, ...]]:
        return [self.space.names_of(tc) for tc in self.tests]

    def to_dict(self) -> dict:
        return {
            "parameters": list(self.space.names),
            "strength": self.strength,
            "seed": self.seed,
            "size": self.size,
            "tests": [list(row) for row in self.named_tests()],
            "stats": {
                "coverableTuples": self.coverable,
                "initialSize": self.initial_size,
                "improveIterations": self.iterations,
            },
        }


def size_lower_bound(m: CombinationMatrix) -> int:
    """Largest number of existing combinations in any single matrix row."""
    g = m.grid()
    return int((g >= 0).sum(axis=1).max()) if g.size else 0


def generate(
    model: ModelFile,
    config: GeneratorConfig,
    trace: Optional[Callable[[str, int, int], None]] = None,
) -> GenerationResult:
    space = model.space
    t = space.check_strength(config.strength)
    fset = close_tuples(model, cap=config.derivation_cap)
    m = build_matrix(space, t).clean(fset)
    rng = random.Random(config.seed)

    sol = initial_solution(m, fset, rng, config.random_pair_phase, trace)
    initial_size = len(sol)
    history = [initial_size]
    bound = size_lower_bound(m)

    iterations = 0
    deadline = None if config.time_budget is None else time.monotonic() + config.time_budget
    while len(sol) > bound:
        if deadline is None:
            if iterations >= config.improve_rounds:
                break
        elif time.monotonic() >= deadline:
            break
        sol = improve_once(
            sol, m, fset, rng, config.max_modifications, config.neighborhood_weights, deadline
        )
        iterations += 1
        history.append(len(sol))

    return GenerationResult(
        space=space,
        strength=t,
        seed=config.seed,
        tests=[tuple(row) for row in sol],
        initial_size=initial_size,
        iterations=iterations,
        coverable=m.coverable,
        forbidden=fset,
        matrix=m,
        size_history=history,
    )
