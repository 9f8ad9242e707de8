"""Brute-force suite verification.

Works from the original clauses only: every full test case of the Cartesian
product is checked against the CNF directly and the t-sub-tuples of the
survivors form the set of coverable combinations.  Nothing here touches
the forbidden-tuple closure or the combination matrix.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Sequence

from .model import ParameterSpace, PartialTuple
from .parser import Clause

DEFAULT_ENUMERATION_CAP = 10**7


class EnumerationCapExceeded(Exception):
    pass


def _compile(space: ParameterSpace, clauses: Iterable[Clause]) -> list[list[tuple[int, int]]]:
    compiled = []
    for clause in clauses:
        lits = []
        for lit in clause.literals:
            p = space.names.index(lit.parameter)
            lits.append((p, space.parameters[p].values.index(lit.value)))
        compiled.append(lits)
    return compiled


def _violated(row: Sequence[int], compiled) -> int:
    """Index of the first clause the row falsifies, or -1."""
    for i, lits in enumerate(compiled):
        if all(row[p] == v for p, v in lits):
            return i
    return -1


def enumerate_coverable_tuples(
    space: ParameterSpace, clauses: Iterable[Clause], t: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> set[PartialTuple]:
    total = math.prod(space.sizes)
    if total > cap:
        raise EnumerationCapExceeded(f"{total} full test cases exceed the enumeration cap {cap}")
    compiled = _compile(space, clauses)
    combos = list(combinations(range(space.k), t))
    found: set[PartialTuple] = set()
    for row in product(*(range(n) for n in space.sizes)):
        if _violated(row, compiled) >= 0:
            continue
        for combo in combos:
            found.add(tuple((p, row[p]) for p in combo))
    return found


@dataclass
class OracleReport:
    coverable_tuple_count: int
    covered_tuple_count: int
    missing_tuples: list[PartialTuple] = field(default_factory=list)
    invalid_rows: list[tuple[int, str]] = field(default_factory=list)
    coverage_checked: bool = True

    @property
    def passed(self) -> bool:
        return not self.missing_tuples and not self.invalid_rows

    def to_dict(self, space: ParameterSpace | None = None) -> dict:
        fmt = space.format_tuple if space is not None else str
        return {
            "passed": self.passed,
            "coverageChecked": self.coverage_checked,
            "coverableTuples": self.coverable_tuple_count,
            "coveredTuples": self.covered_tuple_count,
            "missing": [fmt(u) for u in self.missing_tuples],
            "invalid": [{"row": r, "violates": why} for r, why in self.invalid_rows],
        }

    def to_json(self, space: ParameterSpace | None = None) -> str:
        return json.dumps(self.to_dict(space), indent=2)

    def to_text(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        cov = (
            f"coverable: {self.coverable_tuple_count}, covered: {self.covered_tuple_count}, "
            if self.coverage_checked
            else "coverage not checked, "
        )
        return (
            f"oracle {status}: {cov}missing: {len(self.missing_tuples)}, "
            f"invalid: {len(self.invalid_rows)}"
        )


def check_rows(suite: Sequence[Sequence[int]], space: ParameterSpace, clauses: Sequence[Clause]):
    compiled = _compile(space, clauses)
    bad = []
    for i, row in enumerate(suite):
        j = _violated(row, compiled)
        if j >= 0:
            bad.append((i, str(clauses[j])))
    return bad


def verify_suite(
    suite: Sequence[Sequence[int]],
    space: ParameterSpace,
    clauses: Sequence[Clause],
    t: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> OracleReport:
    """Check every row against the clauses and that all coverable t-tuples appear."""
    clauses = list(clauses)
    coverable = enumerate_coverable_tuples(space, clauses, t, cap)
    covered = set()
    for row in suite:
        for combo in combinations(range(space.k), t):
            covered.add(tuple((p, row[p]) for p in combo))
    missing = sorted(coverable - covered)
    return OracleReport(
        coverable_tuple_count=len(coverable),
        covered_tuple_count=len(coverable & covered),
        missing_tuples=missing,
        invalid_rows=check_rows(suite, space, clauses),
    )


def verify_rows_only(suite, space: ParameterSpace, clauses: Sequence[Clause]) -> OracleReport:
    """Row-validity check without coverage, for models too large to enumerate."""
    return OracleReport(0, 0, [], check_rows(suite, space, list(clauses)), coverage_checked=False)
