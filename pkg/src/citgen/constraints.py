"""Forbidden-tuple closure and validity queries.

Clauses become forbidden tuples, which are then closed under two rewrites
until nothing changes:

* derive: if for some parameter P every value ``v_i`` of P appears in some
  forbidden tuple ``T_i``, the union of the ``T_i`` without their P
  assignments is forbidden too.
* simplify: drop any tuple that strictly contains another one.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Optional, Sequence

from .model import ModelError, ParameterSpace, PartialTuple, is_subtuple
from .parser import ModelFile, clauses_to_tuples

DEFAULT_DERIVATION_CAP = 100_000


class Unsatisfiable(Exception):
    """No valid test case exists for the model."""


class DerivationCapExceeded(Exception):
    """The forbidden-tuple set grew past the configured cap."""


def _is_subset(small: PartialTuple, big: PartialTuple) -> bool:
    if len(small) > len(big):
        return False
    bigd = dict(big)
    return all(bigd.get(p, -1) == v for p, v in small)


class ForbiddenTupleSet:
    """Immutable set of canonical forbidden tuples over a parameter space."""

    def __init__(self, space: ParameterSpace, tuples: Iterable[PartialTuple] = ()):
        self.space = space
        self.tuples: tuple[PartialTuple, ...] = tuple(sorted(set(tuples), key=_order))
        index: dict[tuple[int, int], list[PartialTuple]] = defaultdict(list)
        for ft in self.tuples:
            for a in ft:
                index[a].append(ft)
        self._by_assignment = {a: tuple(ts) for a, ts in index.items()}

    def __iter__(self):
        return iter(self.tuples)

    def __len__(self):
        return len(self.tuples)

    def __contains__(self, pt):
        return pt in set(self.tuples)

    def __eq__(self, other):
        if not isinstance(other, ForbiddenTupleSet):
            return NotImplemented
        return self.space == other.space and self.tuples == other.tuples

    def __repr__(self):
        return f"ForbiddenTupleSet({self.format()})"

    def containing(self, p: int, v: int) -> tuple[PartialTuple, ...]:
        return self._by_assignment.get((p, v), ())

    def is_valid(self, tc: Sequence[int]) -> bool:
        """True iff ``tc`` contains no forbidden tuple."""
        return not any(is_subtuple(ft, tc) for ft in self.tuples)

    def completes_forbidden(self, partial: dict[int, int], p: int, v: int) -> bool:
        """Would assigning ``p=v`` on top of ``partial`` fully match a forbidden tuple?"""
        for ft in self.containing(p, v):
            if all(q == p or partial.get(q, -1) == w for q, w in ft):
                return True
        return False

    def change_is_valid(self, tc: Sequence[int], p: int, v: int) -> bool:
        """Validity of ``tc`` with ``tc[p]`` replaced by ``v``, given ``tc`` is valid."""
        for ft in self.containing(p, v):
            if all(q == p or tc[q] == w for q, w in ft):
                return False
        return True

    def tuple_forbidden(self, pt: PartialTuple) -> bool:
        """True iff some forbidden tuple is a subset of ``pt``."""
        d = dict(pt)
        for p, v in pt:
            for ft in self.containing(p, v):
                if all(d.get(q, -1) == w for q, w in ft):
                    return True
        return False

    def format(self) -> str:
        """Text form in the style ``{{color=black}, {color=gold, coating=cathodic}}``."""
        return "{" + ", ".join(self.space.format_tuple(ft) for ft in self.tuples) + "}"


def _order(pt: PartialTuple):
    return (len(pt), pt)


def is_valid(tc: Sequence[int], fset: ForbiddenTupleSet) -> bool:
    return fset.is_valid(tc)


def tuple_forbidden(pt: PartialTuple, fset: ForbiddenTupleSet) -> bool:
    return fset.tuple_forbidden(pt)


def _implied(candidate: PartialTuple, existing: Iterable[PartialTuple]) -> bool:
    return any(_is_subset(ft, candidate) for ft in existing)


def _describe(space: ParameterSpace, p: int, selection: Sequence[PartialTuple]) -> str:
    parts = ", ".join(space.format_tuple(t) for t in selection)
    return (
        f"every value of parameter {space.parameters[p].name!r} is forbidden "
        f"(by {parts}); no valid test case exists"
    )


def derive_pass(fset: ForbiddenTupleSet, cap: int = DEFAULT_DERIVATION_CAP) -> ForbiddenTupleSet:
    """One application of the derive rule over every parameter.

    Selections ``(T_1, ..., T_n)`` are enumerated in ascending order with
    early pruning of parameter conflicts.  Raises :class:`Unsatisfiable` when
    the empty tuple is derived.
    """
    space = fset.space
    current: list[PartialTuple] = list(fset.tuples)
    known = set(current)

    for p in range(space.k):
        n = space.domain_size(p)
        # tuples snapshot per value, stripped of their P assignment
        groups = []
        for v in range(n):
            members = [ft for ft in current if (p, v) in ft]
            if not members:
                break
            groups.append(members)
        else:
            _derive_for_parameter(space, p, groups, current, known, cap)
    return ForbiddenTupleSet(space, current)


def _derive_for_parameter(space, p, groups, current, known, cap):
    n = len(groups)
    stripped = [[tuple(a for a in ft if a[0] != p) for ft in g] for g in groups]
    chosen: list[PartialTuple] = []

    def rec(i: int, acc: dict[int, int]):
        if i == n:
            cand = tuple(sorted(acc.items()))
            if not cand:
                raise Unsatisfiable(_describe(space, p, chosen))
            if cand in known or _implied(cand, current):
                return
            current.append(cand)
            known.add(cand)
            if len(current) > cap:
                raise DerivationCapExceeded(
                    f"forbidden-tuple set exceeded {cap} tuples while deriving on "
                    f"parameter {space.parameters[p].name!r}"
                )
            return
        for orig, rest in zip(groups[i], stripped[i]):
            merged = acc
            conflict = False
            for q, w in rest:
                have = merged.get(q)
                if have is None:
                    if merged is acc:
                        merged = dict(acc)
                    merged[q] = w
                elif have != w:
                    conflict = True
                    break
            if conflict:
                continue
            chosen.append(orig)
            rec(i + 1, merged)
            chosen.pop()

    rec(0, {})


def simplify_pass(fset: ForbiddenTupleSet) -> ForbiddenTupleSet:
    """Remove every tuple that strictly contains another tuple of the set."""
    ordered = sorted(fset.tuples, key=_order)
    kept: list[PartialTuple] = []
    for ft in ordered:
        if not any(_is_subset(small, ft) for small in kept):
            kept.append(ft)
    return ForbiddenTupleSet(fset.space, kept)


def close_tuple_set(fset: ForbiddenTupleSet, cap: int = DEFAULT_DERIVATION_CAP) -> ForbiddenTupleSet:
    """Alternate derive and simplify until a round changes nothing."""
    if () in fset.tuples:
        raise Unsatisfiable("the empty tuple is forbidden; no valid test case exists")
    current = simplify_pass(fset)
    while True:
        nxt = simplify_pass(derive_pass(current, cap))
        if nxt == current:
            return current
        current = nxt


def close_tuples(
    model: ModelFile | None = None,
    *,
    space: Optional[ParameterSpace] = None,
    tuples: Iterable[PartialTuple] = (),
    cap: int = DEFAULT_DERIVATION_CAP,
) -> ForbiddenTupleSet:
    """Complete forbidden-tuple set of a parsed model (or of raw tuples)."""
    if model is not None:
        space = model.space
        tuples = clauses_to_tuples(model)
    if space is None:
        raise ModelError("close_tuples needs a model or a parameter space")
    return close_tuple_set(ForbiddenTupleSet(space, tuples), cap)
