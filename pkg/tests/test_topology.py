import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import adjacency, bfs_ball, bfs_distances
from treeca.errors import AddressError, PreconditionError
from treeca.topology import (
    ROOT,
    TreeParams,
    ball,
    ball_around,
    ball_size,
    busemann_level,
    busemann_limit,
    check_vertex,
    convex_hull,
    distance,
    edge_color,
    format_vertex,
    geodesic,
    hull_decomposition,
    induced_components,
    neighbor_by_color,
    neighbors,
    parse_vertex,
    path_vertex,
    sorted_ball,
)


def vertex(k, max_len=6):
    first = st.integers(0, k - 1)
    rest = st.lists(st.integers(0, k - 2), max_size=max_len - 1)
    return st.one_of(st.just(()), st.tuples(first, rest).map(lambda t: (t[0], *t[1])))


def test_params():
    assert TreeParams(2).degenerate and not TreeParams(3).degenerate
    with pytest.raises(PreconditionError):
        TreeParams(1)


def test_vertex_text():
    assert parse_vertex("e") == ROOT
    assert format_vertex(()) == "e"
    assert format_vertex((2, 1, 0)) == "210"
    with pytest.raises(AddressError):
        parse_vertex("12", 3)
    with pytest.raises(AddressError):
        parse_vertex("3", 3)
    with pytest.raises(AddressError):
        parse_vertex("a1")
    assert parse_vertex("201", 3) == (2, 0, 1)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_degree(k):
    for v in sorted_ball(k, ROOT, 3):
        ns = neighbors(k, v)
        assert len(ns) == len(set(ns)) == k
        for w in ns:
            assert v in neighbors(k, w)


def test_neighbors_rejects_bad_vertex():
    with pytest.raises(AddressError):
        neighbors(3, (0, 2))


@pytest.mark.parametrize("k,r", [(2, 3), (3, 0), (3, 1), (3, 3), (4, 2)])
def test_ball_matches_bfs(k, r):
    for center in [ROOT, (0,), (1, 0, 0), (k - 1,) + (k - 2,) * 2]:
        check_vertex(k, center)
        assert ball(k, center, r) == bfs_ball(k, center, r)
        assert len(ball(k, center, r)) == ball_size(k, r)
    assert sorted_ball(k, ROOT, r) == sorted(ball(k, ROOT, r))


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_distance_is_graph_metric(data):
    k = data.draw(st.sampled_from([2, 3, 4]))
    v = data.draw(vertex(k, 4))
    w = data.draw(vertex(k, 4))
    dist = bfs_distances(adjacency(k, 4), v)  # geodesics never go deeper than their ends
    assert distance(v, w) == dist[w]
    path = geodesic(v, w)
    assert path[0] == v and path[-1] == w and len(path) == distance(v, w) + 1
    for a, b in zip(path, path[1:]):
        assert b in neighbors(k, a)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_triangle_inequality(data):
    k = data.draw(st.sampled_from([3, 4]))
    u, v, w = (data.draw(vertex(k, 5)) for _ in range(3))
    assert distance(u, w) <= distance(u, v) + distance(v, w)
    assert distance(u, v) == distance(v, u)


def test_ball_around():
    assert ball_around(3, [(0,), (1,)], 1) == ball(3, (0,), 1) | ball(3, (1,), 1)


def test_path_and_levels():
    assert path_vertex(0) == ROOT
    assert path_vertex(-2) == (0, 0)
    assert path_vertex(3) == (1, 0, 0)
    for n in range(-5, 6):
        assert busemann_level(path_vertex(n)) == n
        assert distance(path_vertex(n), path_vertex(n + 1)) == 1
    assert busemann_level(ROOT) == 0


@settings(max_examples=200, deadline=None)
@given(vertex(3, 7))
def test_busemann_limit_stabilises(v):
    lead = next((i for i, a in enumerate(v) if a), len(v))
    for n in range(lead + 1, lead + 5):
        assert busemann_limit(v, n) == busemann_level(v)


@settings(max_examples=200, deadline=None)
@given(vertex(3, 7))
def test_levels_change_by_one(v):
    for w in neighbors(3, v):
        assert abs(busemann_level(v) - busemann_level(w)) == 1
    # exactly one neighbor is one level down (towards the end at p(-inf))
    assert sum(busemann_level(w) == busemann_level(v) - 1 for w in neighbors(3, v)) == 1


@pytest.mark.parametrize("k", [2, 3, 4])
def test_edge_colouring_is_proper(k):
    for v in sorted_ball(k, ROOT, 3):
        colors = [edge_color(k, v, w) for w in neighbors(k, v)]
        assert sorted(colors) == list(range(k))
        for c in range(k):
            w = neighbor_by_color(k, v, c)
            assert edge_color(k, v, w) == c


def brute_hull(k, pts):
    """Smallest vertex set containing pts that is closed under geodesics, by brute force."""
    pts = set(pts)
    diam = max(distance(p, q) for p in pts for q in pts)
    region = set.intersection(*(ball(k, p, diam) for p in pts))
    cands = sorted(region - pts)
    for extra in range(len(cands) + 1):
        for add in itertools.combinations(cands, extra):
            s = pts | set(add)
            if induced_components(k, s) == 1:
                return s


def test_hull_minimal_against_brute_force():
    rng = random.Random(1)
    region = sorted(ball(3, ROOT, 2))
    for _ in range(25):
        pts = rng.sample(region, rng.randint(2, 3))
        hull = convex_hull(pts)
        assert induced_components(3, hull) == 1
        assert hull == brute_hull(3, pts)


def test_hull_decomposition_branches():
    rng = random.Random(2)
    region = sorted(ball(3, ROOT, 3))
    for _ in range(40):
        pts = rng.sample(region, rng.randint(2, 5))
        hd = hull_decomposition(3, pts)
        assert hd.leaves <= set(pts)
        assert set(hd.hull) == convex_hull(pts)
        for t in ball(3, ROOT, 6):
            p = hd.project(t)
            assert p in hd.hull
            assert distance(t, p) == min(distance(t, s) for s in hd.hull)
        for u in hd.leaves:
            branch = {t for t in ball(3, u, 3) if hd.component_of(t) == u}
            # B_u is the subtree hanging off u: connected, contains u, meets the hull only at u
            assert u in branch and induced_components(3, branch) == 1
            assert branch & set(hd.hull) == {u}
            for t in branch:
                assert hd.coordinate(u, t) == distance(t, u)


def test_hull_decomposition_needs_two_points():
    with pytest.raises(PreconditionError):
        hull_decomposition(3, [(0,)])
    with pytest.raises(PreconditionError):
        hull_decomposition(3, [(0,), (0,)])


def test_documented_examples():
    assert set(neighbors(3, ROOT)) == {(0,), (1,), (2,)}
    assert set(neighbors(3, (1,))) == {ROOT, (1, 0), (1, 1)}
    assert set(neighbors(2, (0,))) == {ROOT, (0, 0)}
    assert distance(ROOT, ROOT) == 0
    assert distance((0,), (1,)) == 2 and distance((1, 0), (1, 1)) == 2
    assert [len(ball(3, ROOT, r)) for r in (1, 2, 3)] == [4, 10, 22]
    assert ball(3, ROOT, 1) == {ROOT, (0,), (1,), (2,)}
    assert busemann_level(ROOT) == 0
    assert busemann_limit((0, 0), 5) == busemann_level((0, 0)) == -2
    assert busemann_level((1,)) == 1 and busemann_level((0, 1)) == 0
    hd = hull_decomposition(3, [(0,), (1,)])
    assert hd.hull == {(0,), ROOT, (1,)} and hd.leaves == {(0,), (1,)}
    hd = hull_decomposition(3, [(0,), (0, 0)])
    assert hd.hull == {(0,), (0, 0)} and hd.leaves == {(0,), (0, 0)}
    hd = hull_decomposition(3, [(0, 0), (0, 1), (1,)])
    assert hd.hull == {(0, 0), (0, 1), (0,), ROOT, (1,)} and hd.leaves == {(0, 0), (0, 1), (1,)}


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_degree_regularity_random(k):
    rng = random.Random(k)
    for _ in range(2500):
        n = rng.randint(0, 12)
        v = tuple([rng.randrange(k)] + [rng.randrange(k - 1) for _ in range(n - 1)]) if n else ()
        ns = neighbors(k, v)
        assert len(set(ns)) == k
        w = rng.choice(ns)
        assert v in neighbors(k, w)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_ball_size_formula(k):
    for r in range(5):
        expected = 1 + 2 * r if k == 2 else 1 + k * ((k - 1) ** r - 1) // (k - 2)
        assert ball_size(k, r) == len(ball(k, ROOT, r)) == expected


def test_path_levels_far_out():
    for n in range(-20, 21):
        assert busemann_level(path_vertex(n)) == n
        assert busemann_limit(path_vertex(n), 25) == n


def test_branches_are_rooted_subtrees():
    rng = random.Random(5)
    region = sorted(ball(3, ROOT, 3))
    for _ in range(30):
        hd = hull_decomposition(3, rng.sample(region, rng.randint(2, 5)))
        for t in ball(3, ROOT, 6):
            u = hd.component_of(t)
            if u is None or t == u:
                continue
            closer = [w for w in neighbors(3, t) if distance(w, u) < distance(t, u)]
            assert len(closer) == 1 and hd.component_of(closer[0]) == u
