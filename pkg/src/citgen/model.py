"""Indexed domain model.

Parameters and values are addressed by position: parameter ``p`` in
``[0, k)`` and value ``v`` in ``[0, domain_size(p))``.  Names only matter
when reading a model file or printing a suite.

A partial tuple is a tuple of ``(parameter, value)`` pairs sorted by
parameter index; a test case is a tuple of value indices of length ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence, Tuple

Assignment = Tuple[int, int]
PartialTuple = Tuple[Assignment, ...]
TestCase = Tuple[int, ...]


class ModelError(ValueError):
    """Raised for malformed spaces, tuples or test cases."""


@dataclass(frozen=True)
class Parameter:
    name: str
    values: Tuple[str, ...]

    def __post_init__(self):
        if not self.name:
            raise ModelError("parameter name must be non-empty")
        if not self.values:
            raise ModelError(f"parameter {self.name!r} has no values")
        if any(not v for v in self.values):
            raise ModelError(f"parameter {self.name!r} has an empty value name")
        if len(set(self.values)) != len(self.values):
            raise ModelError(f"parameter {self.name!r} has duplicate values")


@dataclass(frozen=True)
class ParameterSpace:
    parameters: Tuple[Parameter, ...]

    def __post_init__(self):
        if not self.parameters:
            raise ModelError("a parameter space needs at least one parameter")
        names = [p.name for p in self.parameters]
        if len(set(names)) != len(names):
            raise ModelError("duplicate parameter names")

    @classmethod
    def from_lists(cls, pairs: Iterable[Tuple[str, Sequence[str]]]) -> "ParameterSpace":
        """Build a space from ``(name, [values...])`` pairs."""
        return cls(tuple(Parameter(name, tuple(values)) for name, values in pairs))

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "ParameterSpace":
        """Anonymous space ``p0, p1, ...`` with values ``0, 1, ...``."""
        return cls.from_lists(
            (f"p{i}", [str(v) for v in range(n)]) for i, n in enumerate(sizes)
        )

    @property
    def k(self) -> int:
        return len(self.parameters)

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(p.values) for p in self.parameters)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(p.name for p in self.parameters)

    def domain_size(self, p: int) -> int:
        return len(self.parameters[p].values)

    def parameter_index(self, name: str) -> int:
        for i, p in enumerate(self.parameters):
            if p.name == name:
                return i
        raise ModelError(f"unknown parameter {name!r}")

    def value_index(self, p: int, value: str) -> int:
        try:
            return self.parameters[p].values.index(value)
        except ValueError:
            raise ModelError(
                f"unknown value {value!r} for parameter {self.parameters[p].name!r}"
            ) from None

    def check_test_case(self, tc: Sequence[int]) -> TestCase:
        if len(tc) != self.k:
            raise ModelError(f"test case has {len(tc)} entries, expected {self.k}")
        for p, v in enumerate(tc):
            if not 0 <= v < self.domain_size(p):
                raise ModelError(f"value {v} out of domain for parameter {p}")
        return tuple(tc)

    def check_strength(self, t: int) -> int:
        if not 1 <= t <= self.k:
            raise ModelError(
                f"strength {t} out of range: must be between 1 and {self.k}"
                + (" (strength exceeds parameter count)" if t > self.k else "")
            )
        return t

    def make_tuple(self, assignments: Iterable[Assignment]) -> PartialTuple:
        return make_tuple(assignments, self)

    def names_of(self, tc: Sequence[int]) -> Tuple[str, ...]:
        return tuple(self.parameters[p].values[v] for p, v in enumerate(tc))

    def format_tuple(self, pt: PartialTuple) -> str:
        body = ", ".join(
            f"{self.parameters[p].name}={self.parameters[p].values[v]}" for p, v in pt
        )
        return "{" + body + "}"


def make_tuple(assignments: Iterable[Assignment], space: ParameterSpace | None = None) -> PartialTuple:
    """Canonicalize assignments into a partial tuple.

    Duplicate identical assignments collapse; two different values for the
    same parameter raise :class:`ModelError`.
    """
    seen: dict[int, int] = {}
    for p, v in assignments:
        if p in seen and seen[p] != v:
            raise ModelError(f"parameter {p} assigned both {seen[p]} and {v}")
        if space is not None and not (0 <= p < space.k and 0 <= v < space.domain_size(p)):
            raise ModelError(f"assignment ({p}, {v}) outside the parameter space")
        seen[p] = v
    return tuple(sorted(seen.items()))


def t_tuples_of(tc: Sequence[int], t: int) -> list[PartialTuple]:
    """All ``C(k, t)`` restrictions of ``tc``, in lexicographic parameter order."""
    return [tuple((p, tc[p]) for p in combo) for combo in combinations(range(len(tc)), t)]


def is_subtuple(small: PartialTuple, tc: Sequence[int]) -> bool:
    """True if the partial tuple agrees with the full test case."""
    return all(tc[p] == v for p, v in small)


def hamming_distance(a: Sequence[int], b: Sequence[int]) -> int:
    if len(a) != len(b):
        raise ModelError(f"length mismatch: {len(a)} vs {len(b)}")
    return sum(x != y for x, y in zip(a, b))
