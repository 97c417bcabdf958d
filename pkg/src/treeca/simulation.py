"""Finite-support configurations and their evolution under tree rules."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import NonQuiescentRuleError, PreconditionError
from .rules import Rule, canonical_at
from .topology import (
    ROOT,
    Vertex,
    _bfs,
    _neighbors,
    check_vertex,
    distance,
    hull_decomposition,
    neighbor_by_color,
    parent_edge_color,
)


@dataclass(frozen=True, eq=True)
class FiniteConfig:
    """Labeling with finitely many nonzero cells; absent vertices are 0."""

    k: int
    alphabet_size: int
    cells: Mapping = field(default_factory=dict)

    def __post_init__(self):
        clean = {v: s for v, s in self.cells.items() if s != 0}
        for v, s in clean.items():
            check_vertex(self.k, v)
            if not 0 < s < self.alphabet_size:
                raise PreconditionError(f"symbol {s} outside alphabet of size {self.alphabet_size}")
        object.__setattr__(self, "cells", clean)

    __hash__ = None

    @classmethod
    def _trusted(cls, k: int, alphabet_size: int, cells: dict) -> "FiniteConfig":
        # cells already validated and zero-free
        x = object.__new__(cls)
        object.__setattr__(x, "k", k)
        object.__setattr__(x, "alphabet_size", alphabet_size)
        object.__setattr__(x, "cells", cells)
        return x

    @property
    def support(self) -> set:
        return set(self.cells)

    def __getitem__(self, v: Vertex) -> int:
        return self.cells.get(v, 0)

    def __bool__(self):
        return bool(self.cells)

    def __len__(self):
        return len(self.cells)

    def items_sorted(self):
        return sorted(self.cells.items())

    def restrict(self, region: Iterable[Vertex]) -> "FiniteConfig":
        region = set(region)
        return FiniteConfig(self.k, self.alphabet_size, {v: s for v, s in self.cells.items() if v in region})


def empty_config(k: int, alphabet_size: int) -> FiniteConfig:
    return FiniteConfig(k, alphabet_size, {})


def _require_quiescent(rule: Rule):
    if not rule.quiescent:
        raise NonQuiescentRuleError(
            f"rule {rule.rule_id} maps the all-zero ball to {rule.outputs[0]}; finite supports are not preserved")


def step(rule: Rule, x: FiniteConfig) -> FiniteConfig:
    _require_quiescent(rule)
    if (rule.k, rule.alphabet_size) != (x.k, x.alphabet_size):
        raise PreconditionError("rule and configuration disagree on tree degree or alphabet")
    if rule.radius == 1:
        return FiniteConfig._trusted(x.k, x.alphabet_size, _step_radius_one(rule, x.cells))
    k, r = rule.k, rule.radius
    cells = x.cells
    get = cells.get
    table = rule.table
    candidates = set()
    for v in cells:
        candidates.update(_bfs(k, v, r))
    out = {}
    for t in candidates:
        s = table[canonical_at(k, lambda v: get(v, 0), t, r)]
        if s:
            out[t] = s
    return FiniteConfig._trusted(k, x.alphabet_size, out)


def _step_radius_one(rule: Rule, cells: dict) -> dict:
    k = rule.k
    lookup = rule.radius_one_lookup
    acc: dict = {}
    for v, s in cells.items():
        acc.setdefault(v, [])
        if v:
            acc.setdefault(v[:-1], []).append(s)
            for a in range(k - 1):
                acc.setdefault(v + (a,), []).append(s)
        else:
            for a in range(k):
                acc.setdefault((a,), []).append(s)
    out = {}
    zeros = (0,) * k
    for t, nz in acc.items():
        if len(nz) > 1:
            nz.sort()
        key = zeros[: k - len(nz)] + tuple(nz)
        s = lookup[(cells.get(t, 0), key)]
        if s:
            out[t] = s
    return out


@dataclass
class Trajectory:
    configs: list
    profile: list  # per-step distance from the hull of the initial support; None once empty


def run(rule: Rule, x: FiniteConfig, n: int) -> Trajectory:
    if n < 0:
        raise PreconditionError("step count must be >= 0")
    _require_quiescent(rule)
    configs = [x]
    for _ in range(n):
        configs.append(step(rule, configs[-1]))
    return Trajectory(configs, _profile(x, configs))


def iterate(rule: Rule, x: FiniteConfig, n: int) -> FiniteConfig:
    for _ in range(n):
        x = step(rule, x)
    return x


def disjoint_sum(x: FiniteConfig, y: FiniteConfig) -> FiniteConfig:
    if (x.k, x.alphabet_size) != (y.k, y.alphabet_size):
        raise PreconditionError("configurations live on different trees or alphabets")
    overlap = x.cells.keys() & y.cells.keys()
    if overlap:
        raise PreconditionError(f"supports overlap on {len(overlap)} vertices")
    return FiniteConfig(x.k, x.alphabet_size, {**x.cells, **y.cells})


def mortality(rule: Rule, x: FiniteConfig, horizon: int, max_cells: int | None = None):
    """Least n <= horizon with f^n(x) = 0, or None.

    With ``max_cells`` the run also gives up (returning None) once the support
    grows past that size.
    """
    _require_quiescent(rule)
    for n in range(horizon + 1):
        if not x:
            return n
        if n == horizon or (max_cells is not None and len(x) > max_cells):
            return None
        x = step(rule, x)
    return None


def _hull_distance_fn(k: int, support: set):
    if len(support) >= 2:
        hd = hull_decomposition(k, support)
        return hd.distance_to_hull
    (c,) = support
    return lambda t: distance(t, c)


def _profile(x: FiniteConfig, configs) -> list:
    if not x:
        return [None] * len(configs)
    dist = _hull_distance_fn(x.k, x.support)
    return [max(map(dist, c.cells)) if c else None for c in configs]


def support_radius_profile(rule: Rule, x: FiniteConfig, n: int) -> list:
    """Max distance of supp(f^t(x)) from the hull of supp(x), for t = 0..n (None when empty)."""
    return run(rule, x, n).profile


# -- automorphisms -----------------------------------------------------------

@dataclass(frozen=True)
class AutomorphismDescription:
    """A tree automorphism given by edge-colour permutations.

    ``anchor_image`` is g(e).  ``perms[v]`` says how g recolours the edges at v:
    the edge of colour c at v goes to the edge of colour ``perms[v][c]`` at g(v).
    Vertices without an entry inherit their parent's permutation, so every
    description is total; the only constraint is that both ends of an edge agree
    on where its colour goes.
    """

    k: int
    anchor_image: Vertex = ROOT
    perms: Mapping = field(default_factory=dict)

    def __post_init__(self):
        check_vertex(self.k, self.anchor_image)
        perms = {v: tuple(p) for v, p in self.perms.items()}
        for v, p in perms.items():
            check_vertex(self.k, v)
            if sorted(p) != list(range(self.k)):
                raise PreconditionError(f"not a permutation of colours: {p}")
        object.__setattr__(self, "perms", perms)
        for v in perms:
            if v:
                c = parent_edge_color(self.k, v)
                if self.perm_at(v)[c] != self.perm_at(v[:-1])[c]:
                    raise PreconditionError(f"inconsistent colour permutation on the parent edge of {v}")

    def perm_at(self, v: Vertex) -> tuple:
        while v not in self.perms:
            if not v:
                return tuple(range(self.k))
            v = v[:-1]
        return self.perms[v]

    @property
    def described_depth(self) -> int:
        return max((len(v) for v in self.perms), default=0)

    def __call__(self, v: Vertex) -> Vertex:
        k = self.k
        image = self.anchor_image
        perm = self.perm_at(ROOT)
        for i in range(len(v)):
            x = v[: i + 1]
            c = parent_edge_color(k, x)
            image = neighbor_by_color(k, image, perm[c])
            perm = self.perms.get(x, perm)
        return image


def identity_automorphism(k: int) -> AutomorphismDescription:
    return AutomorphismDescription(k)


def random_automorphism(k: int, rng: random.Random, depth: int = 3, anchor_radius: int = 2) -> AutomorphismDescription:
    anchor = rng.choice(sorted(_bfs(k, ROOT, anchor_radius)))
    root_perm = list(range(k))
    rng.shuffle(root_perm)
    perms = {ROOT: tuple(root_perm)}
    for v in sorted(_bfs(k, ROOT, depth), key=lambda w: (len(w), w)):
        if not v:
            continue
        c = parent_edge_color(k, v)
        parent_perm = perms[v[:-1]]
        others = [d for d in range(k) if d != c]
        images = [parent_perm[d] for d in others]
        rng.shuffle(images)
        p = [0] * k
        p[c] = parent_perm[c]
        for d, e in zip(others, images):
            p[d] = e
        perms[v] = tuple(p)
    return AutomorphismDescription(k, anchor, perms)


def apply_automorphism(g: AutomorphismDescription, x: FiniteConfig) -> FiniteConfig:
    """(g.x)_{g(v)} = x_v."""
    if g.k != x.k:
        raise PreconditionError("automorphism and configuration live on different trees")
    return FiniteConfig(x.k, x.alphabet_size, {g(v): s for v, s in x.cells.items()})


# -- truncated-ball oracle -------------------------------------------------------

def truncated_ball_graph(k: int, R: int, center: Vertex = ROOT) -> dict:
    """Explicit adjacency lists of ball(center, R)."""
    verts = list(_bfs(k, center, R))
    inside = set(verts)
    return {v: [w for w in _neighbors(k, v) if w in inside] for v in verts}


def _oracle_descriptor(adj: dict, labels: Mapping, v, came_from, depth: int):
    if depth == 0:
        return (labels[v], ())
    return (labels[v], tuple(sorted(_oracle_descriptor(adj, labels, w, v, depth - 1)
                                    for w in adj[v] if w != came_from)))


def oracle_step(rule: Rule, labels: Mapping, R: int, center: Vertex = ROOT, adj: dict | None = None) -> dict:
    """One step on the explicit ball(center, R); returns labels on ball(center, R - radius).

    Works for any rule, quiescent or not; every label in the ball must be present.
    """
    r = rule.radius
    if R < r:
        raise PreconditionError(f"truncation radius {R} smaller than rule radius {r}")
    if adj is None:
        adj = truncated_ball_graph(rule.k, R, center)
    missing = [v for v in adj if v not in labels]
    if missing:
        raise PreconditionError(f"labeling of the truncated ball misses {len(missing)} vertices")
    # interior by explicit BFS depth on the adjacency lists
    depth = {center: 0}
    order = [center]
    for v in order:
        for w in adj[v]:
            if w not in depth:
                depth[w] = depth[v] + 1
                order.append(w)
    table = rule.table
    return {v: table[_oracle_descriptor(adj, labels, v, None, r)]
            for v in order if depth[v] <= R - r}


def oracle_run(rule: Rule, labels: Mapping, R: int, n: int, center: Vertex = ROOT) -> dict:
    adj = truncated_ball_graph(rule.k, R, center)
    cur = dict(labels)
    for i in range(n):
        cur = oracle_step(rule, cur, R - i * rule.radius, center,
                          adj={v: [w for w in ws if w in cur] for v, ws in adj.items() if v in cur})
    return cur


def dense_labels(x: FiniteConfig, region: Iterable[Vertex]) -> dict:
    return {v: x[v] for v in region}
