"""Reader and writer for the CIT model file format.

::

    PARAMETERS
    color[black, gold, red]
    shape[square, triangle, circle]

    CONSTRAINTS
    color != black || shape != square

Each constraint line is a disjunction of ``name != value`` literals and the
lines are conjoined.  The CONSTRAINTS section may be omitted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .model import ModelError, ParameterSpace, PartialTuple

_RESERVED = set("[],|!=")
_PARAM_RE = re.compile(r"^(?P<name>[^\[\]]*)\[(?P<values>[^\[\]]*)\]$")


class ParseError(ValueError):
    """Malformed model text; ``line`` is 1-based (0 when not line-specific)."""

    def __init__(self, message: str, line: int = 0):
        self.message = message
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class Literal:
    parameter: str
    value: str

    def __str__(self):
        return f"{self.parameter} != {self.value}"


@dataclass(frozen=True)
class Clause:
    literals: Tuple[Literal, ...]
    line: int = field(default=0, compare=False)

    def __post_init__(self):
        if not self.literals:
            raise ModelError("a clause needs at least one literal")

    def __str__(self):
        return " || ".join(str(lit) for lit in self.literals)

    def satisfied_by(self, names: Tuple[str, ...], space: ParameterSpace) -> bool:
        """Direct CNF evaluation against a row of value names."""
        for lit in self.literals:
            if names[space.parameter_index(lit.parameter)] != lit.value:
                return True
        return False


@dataclass(frozen=True)
class ModelFile:
    space: ParameterSpace
    clauses: Tuple[Clause, ...] = ()


def _check_name(token: str, what: str, lineno: int) -> str:
    token = token.strip()
    if not token:
        raise ParseError(f"empty {what}", lineno)
    bad = _RESERVED.intersection(token)
    if bad:
        raise ParseError(f"{what} {token!r} contains reserved character(s) {''.join(sorted(bad))}", lineno)
    return token


def _parse_parameter(line: str, lineno: int) -> Tuple[str, Tuple[str, ...]]:
    m = _PARAM_RE.match(line)
    if m is None:
        raise ParseError(f"malformed parameter line {line!r}; expected name[value, ...]", lineno)
    name = _check_name(m.group("name"), "parameter name", lineno)
    values = tuple(_check_name(v, "value", lineno) for v in m.group("values").split(","))
    return name, values


def _parse_clause(line: str, lineno: int) -> Clause:
    literals = []
    for part in line.split("||"):
        if "!=" not in part:
            raise ParseError(f"malformed literal {part.strip()!r}; expected name != value", lineno)
        name, _, value = part.partition("!=")
        literals.append(
            Literal(_check_name(name, "parameter name", lineno), _check_name(value, "value", lineno))
        )
    return Clause(tuple(literals), line=lineno)


def parse_model(text: str) -> ModelFile:
    """Parse model text, validating every constraint against the parameters."""
    section: Optional[str] = None
    params: list[Tuple[str, Tuple[str, ...]]] = []
    clauses: list[Clause] = []
    seen_names: set[str] = set()
    domains: dict[str, Tuple[str, ...]] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line == "PARAMETERS":
            if section is not None:
                raise ParseError("PARAMETERS section must come first and appear once", lineno)
            section = "PARAMETERS"
            continue
        if line == "CONSTRAINTS":
            if section != "PARAMETERS":
                raise ParseError("CONSTRAINTS section must follow PARAMETERS", lineno)
            section = "CONSTRAINTS"
            continue
        if section is None:
            raise ParseError("missing PARAMETERS header", lineno)

        if section == "PARAMETERS":
            name, values = _parse_parameter(line, lineno)
            if name in seen_names:
                raise ParseError(f"duplicate parameter name {name!r}", lineno)
            if len(set(values)) != len(values):
                dup = next(v for v in values if values.count(v) > 1)
                raise ParseError(f"duplicate value {dup!r} in parameter {name!r}", lineno)
            seen_names.add(name)
            domains[name] = values
            params.append((name, values))
        else:
            clause = _parse_clause(line, lineno)
            for lit in clause.literals:
                if lit.parameter not in domains:
                    raise ParseError(f"unknown parameter {lit.parameter}", lineno)
                if lit.value not in domains[lit.parameter]:
                    raise ParseError(
                        f"unknown value {lit.value} for parameter {lit.parameter}", lineno
                    )
            clauses.append(clause)

    if section is None:
        raise ParseError("missing PARAMETERS header")
    if not params:
        raise ParseError("no parameters defined")
    return ModelFile(ParameterSpace.from_lists(params), tuple(clauses))


def clause_to_tuple(clause: Clause, space: ParameterSpace) -> Optional[PartialTuple]:
    """Forbidden tuple encoded by a clause, or ``None`` if the clause is vacuous.

    A clause that mentions two different values of one parameter is true for
    every test case and forbids nothing.
    """
    assigned: dict[int, int] = {}
    for lit in clause.literals:
        p = space.parameter_index(lit.parameter)
        v = space.value_index(p, lit.value)
        if assigned.setdefault(p, v) != v:
            return None
    return tuple(sorted(assigned.items()))


def clauses_to_tuples(model: ModelFile) -> list[PartialTuple]:
    out = []
    for clause in model.clauses:
        pt = clause_to_tuple(clause, model.space)
        if pt is not None:
            out.append(pt)
    return out


def emit_model(model: ModelFile) -> str:
    """Canonical text form; ``parse_model(emit_model(m)) == m``."""
    lines = ["PARAMETERS"]
    for p in model.space.parameters:
        lines.append(f"{p.name}[{', '.join(p.values)}]")
    if model.clauses:
        lines.append("")
        lines.append("CONSTRAINTS")
        lines.extend(str(c) for c in model.clauses)
    return "\n".join(lines) + "\n"
