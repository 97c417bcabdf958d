"""Exact radius-1 simulation on hash-consed subtrees.

Below the root address every vertex has k-1 children, so a configuration is a
root symbol plus k shared subtrees.  Identical subtrees are stored once, and one
step maps ``(subtree, parent symbol)`` to a new subtree, memoized for the life
of the :class:`SharedTree`.  Away from the initial support the evolved
configuration is highly symmetric, so the number of distinct subtrees stays
small even when the support grows exponentially.
"""

from __future__ import annotations

import sys

from .errors import PreconditionError
from .rules import Rule
from .simulation import FiniteConfig, _require_quiescent
from .topology import ROOT, HullDecomposition, distance, hull_decomposition

ZERO = 0


class SharedTree:
    def __init__(self, rule: Rule):
        if rule.radius != 1:
            raise PreconditionError("compressed simulation handles radius-1 rules only")
        _require_quiescent(rule)
        self.rule = rule
        self.k = rule.k
        self.lookup = rule.radius_one_lookup
        self.sym = [0]
        self.kids = [(ZERO,) * (self.k - 1)]
        self._intern: dict = {}
        self._memo: dict = {}
        self._count = {ZERO: 0}
        self._depth = {ZERO: -1}

    def node(self, s: int, kids: tuple) -> int:
        if s == 0 and not any(kids):
            return ZERO
        key = (s, kids)
        nid = self._intern.get(key)
        if nid is None:
            nid = len(self.sym)
            self.sym.append(s)
            self.kids.append(kids)
            self._intern[key] = nid
        return nid

    def advance(self, nid: int, parent_sym: int) -> int:
        if nid == ZERO and parent_sym == 0:
            return ZERO
        key = (nid, parent_sym)
        out = self._memo.get(key)
        if out is None:
            s = self.sym[nid]
            kids = self.kids[nid]
            nbrs = [parent_sym]
            nbrs.extend(self.sym[c] for c in kids)
            nbrs.sort()
            ns = self.lookup[(s, tuple(nbrs))]
            out = self.node(ns, tuple(self.advance(c, s) for c in kids))
            self._memo[key] = out
        return out

    # -- whole configurations: (root symbol, k-tuple of subtree ids) --

    def encode(self, x: FiniteConfig) -> tuple:
        if x.k != self.k:
            raise PreconditionError("configuration lives on a different tree")
        cells = x.cells
        prefixes = {v[:i] for v in cells for i in range(len(v) + 1)}

        def build(v):
            if v not in prefixes:
                return ZERO
            return self.node(cells.get(v, 0), tuple(build(v + (a,)) for a in range(self.k - 1)))

        return (cells.get(ROOT, 0), tuple(build((a,)) for a in range(self.k)))

    def step(self, state: tuple) -> tuple:
        s, kids = state
        nbrs = tuple(sorted(self.sym[c] for c in kids))
        return (self.lookup[(s, nbrs)], tuple(self.advance(c, s) for c in kids))

    def is_zero(self, state: tuple) -> bool:
        return state[0] == 0 and not any(state[1])

    def count(self, nid: int) -> int:
        c = self._count.get(nid)
        if c is None:
            c = (self.sym[nid] != 0) + sum(self.count(k) for k in self.kids[nid])
            self._count[nid] = c
        return c

    def support_size(self, state: tuple) -> int:
        return (state[0] != 0) + sum(self.count(c) for c in state[1])

    def max_depth(self, nid: int) -> int:
        """Largest depth of a nonzero cell below the subtree root (0 = the root itself), -1 if none."""
        d = self._depth.get(nid)
        if d is None:
            d = 0 if self.sym[nid] else -1
            for c in self.kids[nid]:
                dc = self.max_depth(c)
                if dc >= 0:
                    d = max(d, dc + 1)
            self._depth[nid] = d
        return d

    def decode(self, state: tuple, limit: int = 10**6) -> FiniteConfig:
        if self.support_size(state) > limit:
            raise PreconditionError("configuration too large to expand")
        cells = {}
        if state[0]:
            cells[ROOT] = state[0]

        def walk(v, nid):
            if nid == ZERO:
                return
            if self.sym[nid]:
                cells[v] = self.sym[nid]
            for a, c in enumerate(self.kids[nid]):
                walk(v + (a,), c)

        for a, c in enumerate(state[1]):
            walk((a,), c)
        return FiniteConfig._trusted(self.k, self.rule.alphabet_size, cells)

    def hull_excess(self, state: tuple, hull: HullDecomposition | None, single=None):
        """Max distance of a nonzero cell from the hull (or from ``single``); None if empty."""
        if hull is not None:
            inside = hull.hull
            top = hull.top
            dist = hull.distance_to_hull
        else:
            inside = {single}
            top = single
            dist = lambda t: distance(t, single)  # noqa: E731
        best = -1

        def explicit(v):
            return v in inside or top[: len(v)] == v

        def visit(v, nid):
            nonlocal best
            if nid == ZERO:
                return
            if explicit(v):
                if self.sym[nid]:
                    best = max(best, dist(v))
                for a, c in enumerate(self.kids[nid]):
                    visit(v + (a,), c)
            else:
                # no hull vertex below v: every cell below projects where v does
                best = max(best, dist(v) + self.max_depth(nid))

        if state[0]:
            best = max(best, dist(ROOT))
        for a, c in enumerate(state[1]):
            visit((a,), c)
        return None if best < 0 else best


def trajectory_stats(rule: Rule, x: FiniteConfig, tmax: int):
    """(first time the support is empty or None, max distance of the support from hull(supp x))."""
    if not x:
        return 0, None
    tree = SharedTree(rule)
    if len(x) >= 2:
        hd, single = hull_decomposition(x.k, x.support), None
    else:
        hd, single = None, next(iter(x.cells))
    state = tree.encode(x)
    excess = 0
    for n in range(1, tmax + 1):
        state = tree.step(state)
        if tree.is_zero(state):
            return n, excess
        excess = max(excess, tree.hull_excess(state, hd, single))
    return None, excess


sys.setrecursionlimit(max(sys.getrecursionlimit(), 10000))
