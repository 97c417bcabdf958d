import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import adjacency
from treeca.errors import AddressError, NonQuiescentRuleError, PreconditionError
from treeca.rules import constant_rule, count_rules, extend, identity_rule, or_rule, rule_from_index
from treeca.simulation import (
    AutomorphismDescription,
    FiniteConfig,
    apply_automorphism,
    dense_labels,
    disjoint_sum,
    empty_config,
    identity_automorphism,
    iterate,
    mortality,
    oracle_run,
    oracle_step,
    random_automorphism,
    run,
    step,
    support_radius_profile,
    truncated_ball_graph,
)
from treeca.topology import ROOT, ball, ball_around, distance, neighbors, sorted_ball


def random_config(rng, k, size, radius=2, max_cells=5):
    region = sorted_ball(k, ROOT, radius)
    cells = {v: rng.randrange(1, size) for v in rng.sample(region, rng.randint(0, max_cells))}
    return FiniteConfig(k, size, cells)


def random_rule(rng, k, size, r=1, quiescent=True):
    i = rng.randrange(count_rules(k, size, r))
    return rule_from_index(k, size, r, i - i % size if quiescent else i)


def test_config_basics():
    x = FiniteConfig(3, 2, {(): 1, (0,): 0})
    assert x.cells == {(): 1} and len(x) == 1 and x[(1,)] == 0
    assert x == FiniteConfig(3, 2, {(): 1})
    assert not empty_config(3, 2)
    with pytest.raises(PreconditionError):
        FiniteConfig(3, 2, {(): 2})
    with pytest.raises(AddressError):
        FiniteConfig(3, 2, {(0, 2): 1})
    assert x.restrict([(0,)]) == empty_config(3, 2)
    assert dense_labels(x, [(), (0,)]) == {(): 1, (0,): 0}


def test_truncated_graph_matches_oracle_graph():
    adj = truncated_ball_graph(3, 3)
    ref = adjacency(3, 3)
    assert {v: sorted(ws) for v, ws in adj.items()} == {v: sorted(ws) for v, ws in ref.items()}


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([(3, 2, 1), (3, 3, 1), (2, 3, 1), (4, 2, 1), (3, 2, 2), (2, 2, 2)]))
def test_step_matches_oracle(seed, family):
    k, size, r = family
    rng = random.Random(seed)
    rule = random_rule(rng, k, size, r)
    x = random_config(rng, k, size)
    R = 2 + 2 * r
    ref = oracle_step(rule, dense_labels(x, ball(k, ROOT, R)), R)
    y = step(rule, x)
    assert {v: y[v] for v in ref} == ref
    # light cone
    assert y.support <= ball_around(k, x.support, r)


def test_oracle_accepts_non_quiescent_rules():
    one = constant_rule(3, 2, 1, 1)
    labels = {v: 0 for v in ball(3, ROOT, 2)}
    out = oracle_step(one, labels, 2)
    assert set(out) == ball(3, ROOT, 1) and set(out.values()) == {1}
    with pytest.raises(NonQuiescentRuleError):
        step(one, empty_config(3, 2))
    with pytest.raises(PreconditionError):
        oracle_step(one, labels, 0)
    with pytest.raises(PreconditionError):
        oracle_step(one, {(): 0}, 1)


def test_oracle_run_shrinks_the_ball():
    rule = or_rule(3, 2)
    labels = {v: 0 for v in ball(3, ROOT, 3)}
    labels[(1, 0, 1)] = 1
    out = oracle_run(rule, labels, 3, 2)
    assert set(out) == ball(3, ROOT, 1)
    assert out[(1,)] == 1 and out[()] == 0


def test_run_and_profile():
    rule = or_rule(3, 2)
    x = FiniteConfig(3, 2, {(): 1})
    traj = run(rule, x, 3)
    assert [len(c) for c in traj.configs] == [1, 4, 10, 22]
    assert traj.profile == [0, 1, 2, 3]
    assert support_radius_profile(constant_rule(3, 2), x, 2) == [0, None, None]
    assert iterate(rule, x, 3) == traj.configs[-1]
    with pytest.raises(PreconditionError):
        run(rule, x, -1)


def test_mortality():
    x = FiniteConfig(3, 2, {(): 1, (0, 1): 1})
    assert mortality(constant_rule(3, 2), x, 5) == 1
    assert mortality(identity_rule(3, 2), x, 5) is None
    assert mortality(identity_rule(3, 2), empty_config(3, 2), 5) == 0
    assert mortality(or_rule(3, 2), x, 50, max_cells=100) is None


def test_disjoint_sum():
    x = FiniteConfig(3, 2, {(): 1})
    y = FiniteConfig(3, 2, {(0, 0): 1})
    assert disjoint_sum(x, y).support == {(), (0, 0)}
    with pytest.raises(PreconditionError):
        disjoint_sum(x, x)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([2, 3, 4]))
def test_random_automorphism_is_an_isometry(seed, k):
    rng = random.Random(seed)
    g = random_automorphism(k, rng, depth=rng.randint(0, 3), anchor_radius=2)
    verts = sorted_ball(k, ROOT, 3)
    images = [g(v) for v in verts]
    assert len(set(images)) == len(verts)
    for v in rng.sample(verts, min(8, len(verts))):
        for w in neighbors(k, v):
            assert distance(g(v), g(w)) == 1
        u = rng.choice(verts)
        assert distance(g(v), g(u)) == distance(v, u)


def test_automorphism_description_validation():
    assert identity_automorphism(3)((1, 0)) == (1, 0)
    swap = AutomorphismDescription(3, ROOT, {ROOT: (1, 0, 2)})
    assert swap((0,)) == (1,) and swap((2,)) == (2,)
    with pytest.raises(PreconditionError):
        AutomorphismDescription(3, ROOT, {ROOT: (0, 0, 1)})
    with pytest.raises(PreconditionError):
        # the edge e-(0) has colour 0; the child may not send it anywhere but where the root does
        AutomorphismDescription(3, ROOT, {ROOT: (0, 1, 2), (0,): (1, 0, 2)})


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([(3, 2, 1), (3, 3, 1), (4, 2, 1), (3, 2, 2)]))
def test_step_is_equivariant(seed, family):
    k, size, r = family
    rng = random.Random(seed)
    rule = random_rule(rng, k, size, r)
    x = random_config(rng, k, size)
    g = random_automorphism(k, rng, depth=3)
    assert step(rule, apply_automorphism(g, x)) == apply_automorphism(g, step(rule, x))


def test_radius_two_path_agrees_with_radius_one_path():
    rng = random.Random(9)
    for _ in range(20):
        rule = random_rule(rng, 3, 2)
        x = random_config(rng, 3, 2, radius=3, max_cells=6)
        assert step(extend(rule, 2), x) == step(rule, x)


def test_documented_examples():
    x = FiniteConfig(3, 2, {(): 1, (1, 0): 1})
    assert step(constant_rule(3, 2), x) == empty_config(3, 2)
    assert step(identity_rule(3, 2), x) == x
    assert [c for c in run(constant_rule(3, 2), x, 3).configs] == [x] + [empty_config(3, 2)] * 3
    assert run(identity_rule(3, 2), x, 3).configs == [x] * 4
    assert support_radius_profile(identity_rule(3, 2), x, 3) == [0, 0, 0, 0]
    single = FiniteConfig(3, 2, {(): 1})
    traj = run(or_rule(3, 2), single, 2)
    assert traj.configs[1].cells == {v: 1 for v in ball(3, ROOT, 1)}
    assert traj.configs[2].support == ball(3, ROOT, 2)
    assert mortality(identity_rule(3, 2), x, 10) is None
    y = FiniteConfig(3, 2, {(0, 0): 1})
    assert disjoint_sum(single, y) == disjoint_sum(y, single) and len(disjoint_sum(single, y)) == 2
    assert disjoint_sum(x, empty_config(3, 2)) == x
    swap = AutomorphismDescription(3, ROOT, {ROOT: (1, 0, 2)})
    assert apply_automorphism(swap, FiniteConfig(3, 2, {(0,): 1})) == FiniteConfig(3, 2, {(1,): 1})
    assert apply_automorphism(identity_automorphism(3), x) == x
    zeros = {v: 0 for v in ball(3, ROOT, 3)}
    assert set(oracle_step(or_rule(3, 2), zeros, 3).values()) == {0}
    labels = {v: random.Random(0).randrange(2) for v in ball(3, ROOT, 3)}
    inner = oracle_step(identity_rule(3, 2), labels, 3)
    assert inner == {v: labels[v] for v in ball(3, ROOT, 2)}
