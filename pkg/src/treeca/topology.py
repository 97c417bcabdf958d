"""Word addresses for the k-regular tree.

A vertex is a tuple of digits.  The empty tuple is the root address, the first
digit ranges over ``0..k-1`` and every later digit over ``0..k-2``; ``w`` and
``w + (a,)`` are adjacent.  Text form is the digit string, ``"e"`` for the root.

The stratification by levels uses the fixed bi-infinite path

    ..., 00, 0, e, 1, 10, 100, ...

with ``p(-n) = 0^n`` and ``p(n) = 1 0^(n-1)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator

from .errors import AddressError, PreconditionError

Vertex = tuple  # tuple[int, ...]

ROOT: Vertex = ()


@dataclass(frozen=True)
class TreeParams:
    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 2:
            raise PreconditionError(f"tree degree must be an integer >= 2, got {self.k!r}")

    @property
    def degenerate(self) -> bool:
        """True for k = 2, where the tree is the bi-infinite path."""
        return self.k == 2


def _k(params) -> int:
    return params.k if isinstance(params, TreeParams) else int(params)


def check_vertex(k: int, v: Vertex) -> Vertex:
    for i, a in enumerate(v):
        hi = k - 1 if i == 0 else k - 2
        if not isinstance(a, int) or a < 0 or a > hi:
            raise AddressError(f"digit {a!r} at position {i} out of range for k={k}: {format_vertex(v)}")
    return v


def parse_vertex(text: str, k: int | None = None) -> Vertex:
    text = text.strip()
    if text in ("e", "ε", ""):
        v: Vertex = ()
    else:
        if not text.isdigit():
            raise AddressError(f"bad vertex word {text!r}")
        v = tuple(int(c) for c in text)
    if k is not None:
        check_vertex(k, v)
    return v


def format_vertex(v: Vertex) -> str:
    return "".join(map(str, v)) if v else "e"


def neighbors(params, v: Vertex) -> list[Vertex]:
    """The k neighbors of ``v``: parent first (if any), then children by digit."""
    k = _k(params)
    check_vertex(k, v)
    return _neighbors(k, v)


def _neighbors(k: int, v: Vertex) -> list[Vertex]:
    # unchecked; hot path for the simulators
    if not v:
        return [(a,) for a in range(k)]
    out = [v[:-1]]
    out.extend(v + (a,) for a in range(k - 1))
    return out


def _outward(k: int, v: Vertex) -> list[Vertex]:
    """Neighbors of ``v`` other than its parent (all k for the root)."""
    if not v:
        return [(a,) for a in range(k)]
    return [v + (a,) for a in range(k - 1)]


def common_prefix_length(v: Vertex, w: Vertex) -> int:
    n = 0
    for a, b in zip(v, w):
        if a != b:
            break
        n += 1
    return n


def distance(v: Vertex, w: Vertex) -> int:
    return len(v) + len(w) - 2 * common_prefix_length(v, w)


def geodesic(v: Vertex, w: Vertex) -> list[Vertex]:
    """Vertices on the unique shortest path from ``v`` to ``w``, both ends included."""
    m = common_prefix_length(v, w)
    up = [v[:i] for i in range(len(v), m - 1, -1)]
    down = [w[:i] for i in range(m + 1, len(w) + 1)]
    return up + down


def ball(params, center: Vertex, r: int) -> set[Vertex]:
    if r < 0:
        raise PreconditionError("ball radius must be >= 0")
    k = _k(params)
    check_vertex(k, center)
    return set(_bfs(k, center, r))


def _bfs(k: int, center: Vertex, r: int) -> Iterator[Vertex]:
    yield center
    frontier = [(center, None)]
    for _ in range(r):
        nxt = []
        for v, prev in frontier:
            for w in _neighbors(k, v):
                if w != prev:
                    nxt.append((w, v))
                    yield w
        frontier = nxt


def sorted_ball(params, center: Vertex, r: int) -> list[Vertex]:
    return sorted(ball(params, center, r))


def ball_size(k: int, r: int) -> int:
    if k == 2:
        return 1 + 2 * r
    return 1 + k * ((k - 1) ** r - 1) // (k - 2)


def ball_around(params, vertices: Iterable[Vertex], r: int) -> set[Vertex]:
    """Union of radius-r balls around every vertex in ``vertices``."""
    k = _k(params)
    out: set[Vertex] = set()
    for v in vertices:
        out.update(_bfs(k, v, r))
    return out


# -- levels ------------------------------------------------------------------

def path_vertex(n: int) -> Vertex:
    """The point p(n) of the fixed bi-infinite path."""
    if n <= 0:
        return (0,) * (-n)
    return (1,) + (0,) * (n - 1)


def busemann_level(v: Vertex) -> int:
    zeros = 0
    for a in v:
        if a != 0:
            break
        zeros += 1
    return len(v) - 2 * zeros


def busemann_limit(v: Vertex, n: int) -> int:
    """d(p(-n), v) - n; equals ``busemann_level(v)`` once n exceeds the leading-zero count."""
    return distance(path_vertex(-n), v) - n


# -- edge colouring ----------------------------------------------------------
# Proper k-edge-colouring: the edge {e, (a,)} has colour a; below that, a vertex
# whose parent edge has colour c gives its child digit a the a-th colour != c.

@lru_cache(maxsize=1 << 16)
def parent_edge_color(k: int, v: Vertex) -> int:
    if not v:
        raise PreconditionError("the root has no parent edge")
    if len(v) == 1:
        return v[0]
    c = parent_edge_color(k, v[:-1])
    a = v[-1]
    return a if a < c else a + 1


def neighbor_by_color(k: int, v: Vertex, color: int) -> Vertex:
    if not v:
        return (color,)
    c = parent_edge_color(k, v)
    if color == c:
        return v[:-1]
    return v + ((color if color < c else color - 1),)


def edge_color(k: int, v: Vertex, w: Vertex) -> int:
    if len(w) == len(v) + 1 and w[:-1] == v:
        return parent_edge_color(k, w)
    if len(v) == len(w) + 1 and v[:-1] == w:
        return parent_edge_color(k, v)
    raise PreconditionError(f"{format_vertex(v)} and {format_vertex(w)} are not adjacent")


# -- convex hulls --------------------------------------------------------------

@dataclass(frozen=True)
class HullDecomposition:
    """Hull S of a finite set, its leaves F, and the branches B_u hanging off each leaf.

    ``B_u`` is read as the set of vertices whose nearest hull vertex is the leaf
    ``u`` (``u`` itself included); ``coordinate(t)`` is then ``d(t, u)``.
    """

    k: int
    hull: frozenset
    leaves: frozenset

    @cached_property
    def top(self) -> Vertex:
        """The hull vertex closest to the root address; every hull vertex extends it."""
        return min(self.hull, key=len)

    def project(self, t: Vertex) -> Vertex:
        """Nearest hull vertex to ``t``."""
        hull = self.hull
        for i in range(len(t), -1, -1):
            if t[:i] in hull:
                return t[:i]
        # no ancestor of t lies in the hull, so t is not below the top vertex
        return self.top

    def component_of(self, t: Vertex):
        """The leaf u with t in B_u, or None when t lies in S \\ F or off an inner hull vertex."""
        u = self.project(t)
        return u if u in self.leaves else None

    def in_component(self, u: Vertex, t: Vertex) -> bool:
        return self.component_of(t) == u

    def coordinate(self, u: Vertex, t: Vertex) -> int:
        if not self.in_component(u, t):
            raise PreconditionError(f"{format_vertex(t)} is not in the branch of {format_vertex(u)}")
        return distance(t, u)

    def distance_to_hull(self, t: Vertex) -> int:
        return distance(t, self.project(t))


def convex_hull(vertices: Iterable[Vertex]) -> set[Vertex]:
    vs = list(dict.fromkeys(vertices))
    if not vs:
        return set()
    out = {vs[0]}
    # a tree hull is the union of geodesics from any fixed member
    for w in vs[1:]:
        out.update(geodesic(vs[0], w))
    return out


def hull_decomposition(params, support: Iterable[Vertex]) -> HullDecomposition:
    k = _k(params)
    pts = set(support)
    if len(pts) < 2:
        raise PreconditionError("hull decomposition needs at least two vertices")
    for v in pts:
        check_vertex(k, v)
    hull = convex_hull(sorted(pts))
    leaves = frozenset(v for v in hull if sum(w in hull for w in _neighbors(k, v)) <= 1)
    return HullDecomposition(k, frozenset(hull), leaves)


def induced_components(k: int, vertices: set[Vertex]) -> int:
    """Number of connected components of the induced subgraph (test helper)."""
    seen: set[Vertex] = set()
    count = 0
    for s in vertices:
        if s in seen:
            continue
        count += 1
        queue = deque([s])
        seen.add(s)
        while queue:
            v = queue.popleft()
            for w in _neighbors(k, v):
                if w in vertices and w not in seen:
                    seen.add(w)
                    queue.append(w)
    return count
