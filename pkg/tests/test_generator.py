import math
import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from citgen.constraints import ForbiddenTupleSet, Unsatisfiable, close_tuples
from citgen.coverage import build_matrix
from citgen.generator import (
    GeneratorConfig,
    choose_neighborhood,
    generate,
    improve_once,
    initial_solution,
    neighborhood_n1,
    neighborhood_n2,
    neighborhood_n3,
    random_valid_test_case,
)
from citgen.model import ParameterSpace
from citgen.oracle import verify_suite
from citgen.parser import parse_model

from helpers import cnf_valid, random_model, unconstrained


def setup(model, t=2, seed=0):
    fset = close_tuples(model)
    m = build_matrix(model.space, t).clean(fset)
    return fset, m, random.Random(seed)


def rescore(model, fset, sol, t):
    m = build_matrix(model.space, t).clean(fset)
    for row in sol:
        m.cover(row)
    return m


def replay(rng):
    twin = random.Random()
    twin.setstate(rng.getstate())
    return twin


# -- random rows -------------------------------------------------------------


def test_random_rows_unconstrained():
    model = unconstrained([3, 2, 4])
    fset = ForbiddenTupleSet(model.space)
    rng = random.Random(3)
    for _ in range(50):
        tc = random_valid_test_case(model.space, fset, rng)
        model.space.check_test_case(tc)


def test_random_rows_never_black(shapes):
    fset = close_tuples(shapes)
    rng = random.Random(11)
    for _ in range(300):
        tc = random_valid_test_case(shapes.space, fset, rng)
        assert tc[0] != 0 and cnf_valid(shapes, tc)


def test_guided_fallback_finds_the_needle():
    space = ParameterSpace.from_sizes([2] * 8)
    # only the all-ones row is valid
    fset = close_tuples(space=space, tuples=[((p, 0),) for p in range(8)])
    assert random_valid_test_case(space, fset, random.Random(0), retries=0) == (1,) * 8


def test_forced_contradiction_is_unsatisfiable():
    model = parse_model("PARAMETERS\np[a]\nq[a]\nCONSTRAINTS\np != a || q != a\n")
    raw = ForbiddenTupleSet(model.space, [((0, 0), (1, 0))])
    with pytest.raises(Unsatisfiable):
        random_valid_test_case(model.space, raw, random.Random(0))


# -- initial solution --------------------------------------------------------


def test_initial_single_parameter():
    model = unconstrained([3])
    fset, m, rng = setup(model, t=1)
    sol = initial_solution(m, fset, rng)
    assert {r[0] for r in sol} == {0, 1, 2}
    assert m.uncovered == 0


@pytest.mark.parametrize("seed", range(5))
def test_initial_shapes_is_complete(shapes, seed):
    fset, m, rng = setup(shapes, seed=seed)
    sol = initial_solution(m, fset, rng)
    report = verify_suite(sol, shapes.space, shapes.clauses, 2)
    assert report.passed and report.coverable_tuple_count == 65


def test_initial_nothing_to_cover():
    space = ParameterSpace.from_sizes([2, 2])
    fset = ForbiddenTupleSet(space, [((0, 0), (1, 0)), ((0, 0), (1, 1)), ((0, 1), (1, 0)), ((0, 1), (1, 1))])
    m = build_matrix(space, 2).clean(fset)
    assert initial_solution(m, fset, random.Random(0)) == []


def test_disjoint_phase_only(shapes):
    fset, m, rng = setup(shapes)
    phases = []
    sol = initial_solution(m, fset, rng, random_pair_phase=False, trace=lambda ph, u, mc: phases.append(ph))
    assert set(phases) == {"disjoint"}
    assert verify_suite(sol, shapes.space, shapes.clauses, 2).passed


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_phase_switch_law(seed):
    model = random_model(random.Random(seed), max_params=6)
    try:
        fset, m, rng = setup(model, t=min(2, model.space.k), seed=seed)
    except Unsatisfiable:
        return
    events = []
    initial_solution(m, fset, rng, trace=lambda ph, u, mc: events.append((ph, u, mc)))
    for ph, u, mc in events:
        assert (ph == "disjoint") == (u <= mc)


# -- neighborhoods -----------------------------------------------------------


def test_n1_single_value_domain():
    model = unconstrained([1, 1])
    fset, m, rng = setup(model)
    sol = [[0, 0]]
    m.cover(sol[0])
    assert neighborhood_n1(sol, m, fset, rng) is False
    assert sol == [[0, 0]]


def test_n1_all_alternatives_invalid():
    space = ParameterSpace.from_sizes([2, 2])
    fset = close_tuples(space=space, tuples=[((0, 0),), ((1, 0),)])
    m = build_matrix(space, 1).clean(fset)
    sol = [[1, 1]]
    m.cover(sol[0])
    for seed in range(5):
        assert neighborhood_n1(sol, m, fset, random.Random(seed)) is False
    assert sol == [[1, 1]]


def test_n1_strict_improvement():
    model = unconstrained([2, 2])
    fset, m, rng = setup(model)
    sol = [[0, 0], [0, 0]]
    for r in sol:
        m.cover(r)
    before = m.score()
    assert neighborhood_n1(sol, m, fset, rng)
    assert m.score() == before + 1


def test_n2_single_row_keeps_best(shapes):
    fset, m, rng = setup(shapes)
    sol = [[2, 2, 2, 1, 0]]
    m.cover(sol[0])
    before = m.score()
    neighborhood_n2(sol, m, fset, rng)
    assert m.score() >= before and fset.is_valid(sol[0])


def test_n3_row_agreeing_outside_u():
    model = unconstrained([2, 2, 2])
    fset, m, rng = setup(model)
    sol = [[0, 0, 0], [1, 1, 1], [0, 1, 1], [1, 0, 0]]
    for r in sol:
        m.cover(r)
    # the only way to cover an uncovered pair here changes a single row
    assert neighborhood_n3(sol, m, fset, rng)
    assert m.rescan() == (m.uncovered, m.multi_covered)


def test_n3_blocked_everywhere():
    space = ParameterSpace.from_sizes([2, 2, 2])
    fset = ForbiddenTupleSet(space, [((0, 1), (2, 0)), ((0, 1), (2, 1))])
    m = build_matrix(space, 1)
    sol = [[0, 0, 0]]
    m.cover(sol[0])
    # uncovered singletons: p0=1 (blocked for every row), p1=1, p2=1
    rng = random.Random(0)
    for _ in range(20):
        snap = [list(r) for r in sol]
        if not neighborhood_n3(sol, m, fset, rng):
            assert sol == snap
    assert all(r[0] == 0 for r in sol)


def _damaged_instance(seed, t=2):
    rng = random.Random(seed)
    while True:
        model = random_model(rng, max_params=5)
        try:
            fset = close_tuples(model)
        except Unsatisfiable:
            continue
        t_ = min(t, model.space.k)
        m = build_matrix(model.space, t_).clean(fset)
        sol = initial_solution(m, fset, rng)
        if len(sol) < 2:
            continue
        m.uncover(sol.pop(rng.randrange(len(sol))))
        return model, fset, m, sol, t_, rng


def _score_with(model, fset, sol, t):
    return rescore(model, fset, sol, t).score()


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_n1_dominance(seed):
    model, fset, m, sol, t, rng = _damaged_instance(seed)
    twin = replay(rng)
    r = twin.randrange(len(sol))
    c = twin.randrange(model.space.k)
    before = [list(x) for x in sol]
    changed = neighborhood_n1(sol, m, fset, rng)
    scores = []
    for v in range(model.space.domain_size(c)):
        if v == before[r][c]:
            continue
        cand = [list(x) for x in before]
        cand[r][c] = v
        if fset.is_valid(cand[r]):
            scores.append(_score_with(model, fset, cand, t))
    if not scores:
        assert not changed and sol == before
    else:
        assert m.score() == max(scores)
        assert m.score() == _score_with(model, fset, sol, t)
    assert all(fset.is_valid(x) and cnf_valid(model, x) for x in sol)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_n2_never_loses_score(seed):
    model, fset, m, sol, t, rng = _damaged_instance(seed)
    before = m.score()
    neighborhood_n2(sol, m, fset, rng)
    assert m.score() >= before
    assert m.score() == _score_with(model, fset, sol, t)
    assert all(cnf_valid(model, x) for x in sol)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_n3_covers_target_and_dominates(seed):
    model, fset, m, sol, t, rng = _damaged_instance(seed)
    if m.uncovered == 0:
        return
    twin = replay(rng)
    u = m.cell_tuple(twin.choice(list(m.uncovered_indices())))
    before = [list(x) for x in sol]
    changed = neighborhood_n3(sol, m, fset, rng)
    scores = []
    for r in range(len(before)):
        cand = [list(x) for x in before]
        for p, v in u:
            cand[r][p] = v
        if fset.is_valid(cand[r]):
            scores.append(_score_with(model, fset, cand, t))
    if not scores:
        assert not changed
    else:
        assert m.count(u) >= 1
        assert m.score() == max(scores)
    assert all(cnf_valid(model, x) for x in sol)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_moves_preserve_validity(seed):
    model, fset, m, sol, t, rng = _damaged_instance(seed)
    moves = (neighborhood_n1, neighborhood_n2, neighborhood_n3)
    for _ in range(40):
        moves[choose_neighborhood(rng)](sol, m, fset, rng)
        assert all(cnf_valid(model, x) for x in sol)
        assert m.rescan() == (m.uncovered, m.multi_covered)


# -- improvement -------------------------------------------------------------


def test_improve_cannot_empty_single_row():
    model = unconstrained([1])
    fset, m, rng = setup(model, t=1)
    sol = [[0]]
    m.cover(sol[0])
    out = improve_once(sol, m, fset, rng)
    assert out is sol and m.uncovered == 0


def test_improve_redundant_row_immediately():
    model = unconstrained([2, 2])
    fset, m, _ = setup(model)
    sol = [[0, 0], [0, 0], [0, 1], [1, 0], [1, 1]]
    for r in sol:
        m.cover(r)
    # pick a seed whose first deletion hits one of the duplicates
    seed = next(s for s in range(100) if random.Random(s).randrange(5) in (0, 1))
    out = improve_once(sol, m, fset, random.Random(seed), max_modifications=1)
    assert len(out) == 4 and m.uncovered == 0


def test_improve_keeps_matrix_in_sync(shapes):
    fset, m, rng = setup(shapes, seed=4)
    sol = initial_solution(m, fset, rng)
    for _ in range(10):
        sol = improve_once(sol, m, fset, rng)
        assert rescore(shapes, fset, sol, 2).cells == m.cells
        assert m.uncovered == 0


def test_neighborhood_frequencies():
    rng = random.Random(12345)
    counts = Counter(choose_neighborhood(rng) for _ in range(10_000))
    for i, p in enumerate((0.1, 0.1, 0.8)):
        assert abs(counts[i] / 10_000 - p) <= 0.02


def test_choose_respects_custom_weights():
    rng = random.Random(1)
    assert {choose_neighborhood(rng, (0.0, 0.0, 1.0)) for _ in range(200)} == {2}


# -- pipeline ----------------------------------------------------------------


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_generate_shapes(shapes, seed):
    res = generate(shapes, GeneratorConfig(strength=2, seed=seed, improve_rounds=20))
    assert verify_suite(res.tests, shapes.space, shapes.clauses, 2).passed
    assert res.coverable == 65
    assert res.size <= res.initial_size


def test_generate_unconstrained_lower_bound():
    model = unconstrained([3, 3, 3, 3])
    res = generate(model, GeneratorConfig(strength=2, seed=7, improve_rounds=30))
    assert 9 <= res.size <= res.initial_size
    assert all(a >= b for a, b in zip(res.size_history, res.size_history[1:]))


def test_generate_full_strength():
    model = unconstrained([2, 3, 2])
    res = generate(model, GeneratorConfig(strength=3, seed=5, improve_rounds=10))
    assert res.size == math.prod([2, 3, 2])
    assert sorted(res.tests) == sorted(set(res.tests))


def test_generate_deterministic(shapes):
    cfg = GeneratorConfig(strength=2, seed=99, improve_rounds=15)
    assert generate(shapes, cfg).to_dict() == generate(shapes, cfg).to_dict()


def test_generate_time_budget(shapes):
    res = generate(shapes, GeneratorConfig(strength=2, seed=3, time_budget=0.2))
    assert verify_suite(res.tests, shapes.space, shapes.clauses, 2).passed


def test_generate_unsat():
    model = parse_model("PARAMETERS\np[a, b]\nCONSTRAINTS\np != a\np != b\n")
    with pytest.raises(Unsatisfiable):
        generate(model, GeneratorConfig(strength=1, improve_rounds=1))


def test_to_dict_schema(shapes):
    d = generate(shapes, GeneratorConfig(seed=1, improve_rounds=2)).to_dict()
    assert list(d) == ["parameters", "strength", "seed", "size", "tests", "stats"]
    assert list(d["stats"]) == ["coverableTuples", "initialSize", "improveIterations"]
    assert d["size"] == len(d["tests"]) and d["tests"][0][0] in ("gold", "red")


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(),
        dict(improve_rounds=1, time_budget=1.0),
        dict(improve_rounds=1, max_modifications=0),
        dict(improve_rounds=1, neighborhood_weights=(0.5, 0.5, 0.5)),
        dict(improve_rounds=1, seed=-1),
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        GeneratorConfig(**kwargs)
