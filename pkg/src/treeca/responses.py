"""Exact horizon check for radius-1 rules without building the radius-n table.

Cut the tree at a vertex w below its parent.  Within n steps, the trajectory
``w^0, w^1, ..., w^h`` of w is a causal function of the parent's trajectory
``p^0..p^(h-1)`` and of the labels h levels down w's branch.  Call that function
the *response* of the branch.  Responses at depth h are built from a symbol and
a multiset of k-1 responses at depth h-1, and branches with equal responses are
interchangeable, so only distinct responses are kept.  The center combines k
responses of depth n-1 and f^n == 0 iff no combination yields a nonzero
center value at time n.

A response is stored as a tuple indexed by the parent trajectory read as a
base-|A| number (earliest step most significant); entry i is w's trajectory.
Causality lets a caller that knows only a prefix pad the rest with zeros.
"""

from __future__ import annotations

from itertools import combinations_with_replacement, product

from .errors import CapacityError, PreconditionError
from .rules import DEFAULT_BALL_CAP, Rule
from .topology import ROOT, _outward


def _response(lookup: dict, size: int, sym: int, kids: tuple, h: int) -> tuple:
    if h == 0:
        return ((sym,),)
    weights = [size ** (h - 2 - j) for j in range(h - 1)]
    out = []
    for parent in product(range(size), repeat=h):
        w = [sym]
        enc = 0
        for t in range(h):
            if t:
                enc += w[t - 1] * weights[t - 1]
            vals = [parent[t]]
            vals.extend(kid[enc][t] for kid in kids)
            vals.sort()
            w.append(lookup[(w[t], tuple(vals))])
        out.append(tuple(w))
    return tuple(out)


def response_levels(rule: Rule, depth: int, cap: int = DEFAULT_BALL_CAP) -> list:
    """``levels[h]`` maps each distinct depth-h response to one (symbol, kids) that realizes it."""
    k, size = rule.k, rule.alphabet_size
    lookup = rule.radius_one_lookup
    levels = [{((s,),): (s, ()) for s in range(size)}]
    for h in range(1, depth + 1):
        prev = sorted(levels[-1])
        cur: dict = {}
        budget = 0
        for kids in combinations_with_replacement(prev, k - 1):
            budget += size
            if budget > cap:
                raise CapacityError(f"response search at depth {h} exceeds cap {cap}")
            for s in range(size):
                cur.setdefault(_response(lookup, size, s, kids, h), (s, kids))
        levels.append(cur)
    return levels


def _center_trajectory(lookup: dict, size: int, sym: int, kids: tuple, n: int) -> list:
    weights = [size ** (n - 2 - j) for j in range(n - 1)]
    c = [sym]
    enc = 0
    for t in range(n):
        if t:
            enc += c[t - 1] * weights[t - 1]
        vals = sorted(kid[enc][t] for kid in kids)
        c.append(lookup[(c[t], tuple(vals))])
    return c


def nilpotency_witness(rule: Rule, n: int, cap: int = DEFAULT_BALL_CAP):
    """A labeling of ball(e, n) with f^n(x)_e != 0, or None if f^n == 0."""
    if rule.radius != 1:
        raise PreconditionError("response search handles radius-1 rules only")
    k, size = rule.k, rule.alphabet_size
    lookup = rule.radius_one_lookup
    levels = response_levels(rule, n - 1, cap=cap)
    last = sorted(levels[-1])
    budget = 0
    for kids in combinations_with_replacement(last, k):
        budget += size
        if budget > cap:
            raise CapacityError(f"center combinations at horizon {n} exceed cap {cap}")
        for s in range(size):
            if _center_trajectory(lookup, size, s, kids, n)[-1] != 0:
                return _expand(k, levels, s, kids, n - 1)
    return None


def _expand(k: int, levels: list, sym: int, kids: tuple, h: int) -> dict:
    labels = {ROOT: sym}

    def fill(v, resp, depth):
        s, sub = levels[depth][resp]
        labels[v] = s
        for w, r in zip(_outward(k, v), sub):
            fill(w, r, depth - 1)

    for w, r in zip(_outward(k, ROOT), kids):
        fill(w, r, h)
    return labels
