"""Shared fixtures and independent brute-force helpers for the tests."""

import random
from itertools import product

from citgen.model import ParameterSpace
from citgen.parser import Clause, Literal, ModelFile, parse_model

SHAPES_TEXT = """\
PARAMETERS
color[black,  gold, red]
shape[square, triangle, circle]
state[liquid, solid, gas]
material[leather, plastic, aluminum]
coating[anodic, cathodic]

CONSTRAINTS
color != black || shape != square
color != black || shape != triangle
color != black || shape != circle
color != gold || coating != cathodic
material != aluminum || color != gold
"""

# Combination matrix of the shapes model at t=2, fresh and after cleaning.
FRESH_GRID = [
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, -1, 0, 0, -1, 0, 0, -1],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, -1, 0, 0, -1, 0, 0, -1],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, -1, 0, 0, -1, 0, 0, -1],
    [0, 0, -1, 0, 0, -1, 0, 0, -1],
]
CLEANED_GRID = [
    [-1, -1, -1, 0, 0, 0, 0, 0, 0],
    [-1, -1, -1, 0, 0, 0, 0, 0, 0],
    [-1, -1, -1, 0, 0, -1, 0, 0, 0],
    [-1, -1, -1, 0, -1, -1, 0, 0, -1],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, -1, 0, 0, -1, 0, 0, -1],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, -1, 0, 0, -1, 0, 0, -1],
    [0, 0, -1, 0, 0, -1, 0, 0, -1],
]


def shapes_model() -> ModelFile:
    return parse_model(SHAPES_TEXT)


def unconstrained(sizes) -> ModelFile:
    return ModelFile(ParameterSpace.from_sizes(sizes), ())


def random_model(rng: random.Random, max_params=6, max_values=3, max_clauses=6, max_lits=3) -> ModelFile:
    k = rng.randint(2, max_params)
    sizes = [rng.randint(1, max_values) for _ in range(k)]
    space = ParameterSpace.from_sizes(sizes)
    clauses = []
    for _ in range(rng.randint(0, max_clauses)):
        lits = []
        for _ in range(rng.randint(1, max_lits)):
            p = rng.randrange(k)
            lits.append(Literal(space.names[p], space.parameters[p].values[rng.randrange(sizes[p])]))
        clauses.append(Clause(tuple(lits)))
    return ModelFile(space, tuple(clauses))


def cnf_valid(model: ModelFile, row) -> bool:
    """Evaluate the clauses on a row of value indices, by name."""
    names = model.space.names_of(row)
    return all(c.satisfied_by(names, model.space) for c in model.clauses)


def all_rows(space: ParameterSpace):
    return product(*(range(n) for n in space.sizes))


def valid_rows(model: ModelFile):
    return [row for row in all_rows(model.space) if cnf_valid(model, row)]


def minimal_forbidden_partials(model: ModelFile) -> set:
    """Every inclusion-minimal partial assignment with no valid completion."""
    space = model.space
    valid = valid_rows(model)
    forbidden = []
    for choice in product(*([None] + list(range(n)) for n in space.sizes)):
        pt = tuple((p, v) for p, v in enumerate(choice) if v is not None)
        if not any(all(row[p] == v for p, v in pt) for row in valid):
            forbidden.append(pt)
    fset = set(forbidden)
    minimal = set()
    for pt in forbidden:
        if not any(set(other) < set(pt) for other in fset if len(other) < len(pt)):
            minimal.add(pt)
    return minimal
