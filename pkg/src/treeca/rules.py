"""Canonical labeled balls and local-rule tables.

A canonical ball is a nested tuple ``(symbol, children)`` where ``children`` is
the sorted tuple of the descriptors of the subtrees hanging off the node (the
center has k of them, every other node k-1, leaves have ``()``).  Sorting
children before parents makes two labelings related by a rooted automorphism
produce the same value, and Python's tuple order gives a total canonical order.

A rule of radius r is identified by ``(k, alphabet_size, r, index)`` where the
index reads the output table as base-|A| digits over the canonical ball order,
least significant digit first.  Ball 0 is always the all-zero ball, so a rule
is quiescent iff ``index % alphabet_size == 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations_with_replacement, product
from typing import Callable, Iterator, Mapping

from .errors import CapacityError, FormatError, PreconditionError
from .topology import ROOT, TreeParams, Vertex, _neighbors, check_vertex, format_vertex

DEFAULT_BALL_CAP = 10**7
DEFAULT_RULE_CAP = 10**7

CanonicalBall = tuple


@dataclass(frozen=True)
class Alphabet:
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise PreconditionError("alphabet needs at least one symbol")

    @property
    def symbols(self) -> range:
        return range(self.size)


# -- canonical forms -----------------------------------------------------------

def _descriptor(k: int, get: Callable[[Vertex], int], v: Vertex, came_from, depth: int) -> tuple:
    if depth == 0:
        return (get(v), ())
    kids = [_descriptor(k, get, w, v, depth - 1) for w in _neighbors(k, v) if w != came_from]
    kids.sort()
    return (get(v), tuple(kids))


def canonical_at(k: int, get: Callable[[Vertex], int], center: Vertex, r: int) -> CanonicalBall:
    """Canonical form of the radius-r ball around ``center``; labels come from ``get``."""
    return _descriptor(k, get, center, None, r)


def canonicalize(params, alphabet, labeled_ball: Mapping[Vertex, int], center: Vertex = ROOT,
                 radius: int | None = None) -> CanonicalBall:
    """Canonical form of a labeling of ``ball(center, radius)``.

    ``radius`` defaults to the largest distance present in the labeling.
    """
    k = params.k if isinstance(params, TreeParams) else int(params)
    size = alphabet.size if isinstance(alphabet, Alphabet) else int(alphabet)
    check_vertex(k, center)
    if radius is None:
        from .topology import distance
        radius = max((distance(center, v) for v in labeled_ball), default=0)

    def get(v):
        try:
            s = labeled_ball[v]
        except KeyError:
            raise PreconditionError(f"labeling is missing vertex {format_vertex(v)}") from None
        if not 0 <= s < size:
            raise PreconditionError(f"symbol {s} at {format_vertex(v)} outside alphabet of size {size}")
        return s

    return canonical_at(k, get, center, radius)


def ball_depth(ball: CanonicalBall) -> int:
    d = 0
    node = ball
    while node[1]:
        d += 1
        node = node[1][0]
    return d


def truncate(ball: CanonicalBall, r: int) -> CanonicalBall:
    sym, kids = ball
    if r == 0:
        return (sym, ())
    return (sym, tuple(sorted(truncate(c, r - 1) for c in kids)))


def _descriptor_levels(k: int, size: int, depth: int) -> list:
    """Sorted descriptors of non-center nodes with ``depth`` levels below them."""
    level = [(s, ()) for s in range(size)]
    for _ in range(depth):
        level = [(s, kids) for s in range(size)
                 for kids in combinations_with_replacement(level, k - 1)]
    return level


def count_canonical_balls(k: int, size: int, r: int) -> int:
    if r == 0:
        return size
    m = size
    for _ in range(r - 1):
        m = size * math.comb(m + k - 2, k - 1)
    return size * math.comb(m + k - 1, k)


@lru_cache(maxsize=64)
def _balls(k: int, size: int, r: int) -> tuple:
    if r == 0:
        return tuple((s, ()) for s in range(size))
    below = _descriptor_levels(k, size, r - 1)
    return tuple((s, kids) for s in range(size) for kids in combinations_with_replacement(below, k))


def enumerate_canonical_balls(params, alphabet, r: int, cap: int = DEFAULT_BALL_CAP) -> list:
    """All canonical balls of radius r in canonical (sorted) order."""
    k = params.k if isinstance(params, TreeParams) else int(params)
    size = alphabet.size if isinstance(alphabet, Alphabet) else int(alphabet)
    if r < 0:
        raise PreconditionError("radius must be >= 0")
    n = count_canonical_balls(k, size, r)
    if n > cap:
        raise CapacityError(f"{n} canonical balls for k={k}, |A|={size}, r={r} exceeds cap {cap}")
    return list(_balls(k, size, r))


@lru_cache(maxsize=64)
def _ball_positions(k: int, size: int, r: int) -> dict:
    return {b: i for i, b in enumerate(_balls(k, size, r))}


def ball_to_string(ball: CanonicalBall) -> str:
    sym, kids = ball
    if not kids:
        return str(sym)
    return f"{sym}(" + ",".join(ball_to_string(c) for c in kids) + ")"


def parse_ball(text: str) -> CanonicalBall:
    """Parse ``"1(0(0,1),0(1,1),1(0,0))"``; children are re-sorted into canonical order."""
    pos = 0
    s = text.replace(" ", "")

    def node():
        nonlocal pos
        start = pos
        while pos < len(s) and s[pos].isdigit():
            pos += 1
        if start == pos:
            raise FormatError(f"expected a symbol at offset {start} in {text!r}")
        sym = int(s[start:pos])
        kids = []
        if pos < len(s) and s[pos] == "(":
            pos += 1
            kids.append(node())
            while pos < len(s) and s[pos] == ",":
                pos += 1
                kids.append(node())
            if pos >= len(s) or s[pos] != ")":
                raise FormatError(f"unbalanced parentheses in {text!r}")
            pos += 1
        return (sym, tuple(sorted(kids)))

    out = node()
    if pos != len(s):
        raise FormatError(f"trailing characters in {text!r}")
    return out


def is_well_formed(ball: CanonicalBall, k: int, size: int, r: int) -> bool:
    def ok(node, depth, arity):
        sym, kids = node
        if not 0 <= sym < size:
            return False
        if depth == 0:
            return kids == ()
        return len(kids) == arity and all(ok(c, depth - 1, k - 1) for c in kids)

    return ok(ball, r, k)


def materialize(k: int, ball: CanonicalBall, center: Vertex = ROOT) -> dict:
    """One explicit labeling of ``ball(center, r)`` in the given class."""
    out = {}

    def fill(v, node, came_from):
        sym, kids = node
        out[v] = sym
        if kids:
            ws = [w for w in _neighbors(k, v) if w != came_from]
            for w, c in zip(ws, kids):
                fill(w, c, v)

    fill(center, ball, None)
    return out


# -- rules ---------------------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    k: int
    alphabet_size: int
    radius: int
    outputs: tuple = field(repr=False)

    def __post_init__(self):
        if self.radius < 0:
            raise PreconditionError("rule radius must be >= 0")
        n = count_canonical_balls(self.k, self.alphabet_size, self.radius)
        if len(self.outputs) != n:
            raise PreconditionError(f"table has {len(self.outputs)} entries, expected {n}")
        if any(not 0 <= o < self.alphabet_size for o in self.outputs):
            raise PreconditionError("table output outside alphabet")

    @property
    def params(self) -> TreeParams:
        return TreeParams(self.k)

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.alphabet_size)

    @property
    def balls(self) -> tuple:
        return _balls(self.k, self.alphabet_size, self.radius)

    @cached_property
    def table(self) -> dict:
        return dict(zip(self.balls, self.outputs))

    @cached_property
    def index(self) -> int:
        n = 0
        for o in reversed(self.outputs):
            n = n * self.alphabet_size + o
        return n

    @property
    def quiescent(self) -> bool:
        return self.outputs[0] == 0

    @property
    def rule_id(self) -> tuple:
        return (self.k, self.alphabet_size, self.radius, self.index)

    @cached_property
    def radius_one_lookup(self) -> dict:
        """``(center, sorted neighbor symbols) -> output`` for radius-1 rules."""
        if self.radius != 1:
            raise PreconditionError("radius_one_lookup needs a radius-1 rule")
        return {(b[0], tuple(c[0] for c in b[1])): o for b, o in zip(self.balls, self.outputs)}

    def __call__(self, ball: CanonicalBall) -> int:
        return self.table[ball]


def rule_from_function(params, alphabet, radius: int, fn: Callable[[CanonicalBall], int],
                       cap: int = DEFAULT_BALL_CAP) -> Rule:
    k = params.k if isinstance(params, TreeParams) else int(params)
    size = alphabet.size if isinstance(alphabet, Alphabet) else int(alphabet)
    balls = enumerate_canonical_balls(k, size, radius, cap=cap)
    return Rule(k, size, radius, tuple(fn(b) for b in balls))


def rule_from_index(params, alphabet, radius: int, index: int) -> Rule:
    k = params.k if isinstance(params, TreeParams) else int(params)
    size = alphabet.size if isinstance(alphabet, Alphabet) else int(alphabet)
    n = count_canonical_balls(k, size, radius)
    if not 0 <= index < size**n:
        raise PreconditionError(f"rule index {index} out of range for {n} canonical balls")
    digits = []
    for _ in range(n):
        index, d = divmod(index, size)
        digits.append(d)
    return Rule(k, size, radius, tuple(digits))


def _labels(ball: CanonicalBall):
    sym, kids = ball
    yield sym
    for c in kids:
        yield from _labels(c)


def constant_rule(params, alphabet, radius: int = 1, value: int = 0) -> Rule:
    return rule_from_function(params, alphabet, radius, lambda b: value)


def identity_rule(params, alphabet, radius: int = 1) -> Rule:
    return rule_from_function(params, alphabet, radius, lambda b: b[0])


def or_rule(params, alphabet, radius: int = 1) -> Rule:
    """Outputs 1 iff some label in the ball is nonzero."""
    return rule_from_function(params, alphabet, radius, lambda b: int(any(_labels(b))))


def evaluate(rule: Rule, labeled_ball: Mapping[Vertex, int], center: Vertex = ROOT) -> int:
    return rule.table[canonicalize(rule.k, rule.alphabet_size, labeled_ball, center, rule.radius)]


# -- reshaping ---------------------------------------------------------------------

def _check_compatible(f: Rule, g: Rule):
    if (f.k, f.alphabet_size) != (g.k, g.alphabet_size):
        raise PreconditionError("rules must share tree degree and alphabet")


def extend(rule: Rule, radius: int, cap: int = DEFAULT_BALL_CAP) -> Rule:
    """The same map re-declared at a larger radius."""
    if radius < rule.radius:
        raise PreconditionError("extend cannot shrink the radius; use restrict")
    table = rule.table
    return rule_from_function(rule.k, rule.alphabet_size, radius,
                              lambda b: table[truncate(b, rule.radius)], cap=cap)


def restrict(rule: Rule, radius: int) -> Rule:
    """Re-declare the rule at a smaller radius; fails if it reads beyond it."""
    out = {}
    for b, o in zip(rule.balls, rule.outputs):
        t = truncate(b, radius)
        if out.setdefault(t, o) != o:
            raise PreconditionError(f"rule depends on labels beyond radius {radius}")
    return Rule(rule.k, rule.alphabet_size, radius, tuple(out[b] for b in _balls(rule.k, rule.alphabet_size, radius)))


def _reroot(ball: CanonicalBall, i: int, r: int) -> CanonicalBall:
    """Radius-r ball around the i-th child of the center (needs depth >= r + 1)."""
    sym, kids = ball
    child = kids[i]
    back = (sym, tuple(sorted(truncate(c, r - 2) for j, c in enumerate(kids) if j != i))) if r >= 2 else (sym, ())
    fwd = [truncate(c, r - 1) for c in child[1]] if r >= 1 else []
    if r == 0:
        return (child[0], ())
    return (child[0], tuple(sorted(fwd + [back])))


def compose(f: Rule, g: Rule, cap: int = DEFAULT_BALL_CAP) -> Rule:
    """The rule of ``f o g``: apply g everywhere, then f."""
    _check_compatible(f, g)
    k, size = f.k, f.alphabet_size
    R = f.radius + g.radius
    balls = enumerate_canonical_balls(k, size, R, cap=cap)
    gt, ft = g.table, f.table
    if f.radius == 0:
        return Rule(k, size, R, tuple(ft[(gt[b], ())] for b in balls))
    if f.radius == 1:
        rg = g.radius
        out = []
        for b in balls:
            c = gt[truncate(b, rg)]
            nb = sorted((gt[_reroot(b, i, rg)], ()) for i in range(k))
            out.append(ft[(c, tuple(nb))])
        return Rule(k, size, R, tuple(out))
    return _compose_explicit(f, g, balls)


def _compose_explicit(f: Rule, g: Rule, balls) -> Rule:
    from .topology import _bfs
    k = f.k
    inner = list(_bfs(k, ROOT, f.radius))
    gt, ft = g.table, f.table
    out = []
    for b in balls:
        labels = materialize(k, b)
        mid = {v: gt[canonical_at(k, labels.__getitem__, v, g.radius)] for v in inner}
        out.append(ft[canonical_at(k, mid.__getitem__, ROOT, f.radius)])
    return Rule(k, f.alphabet_size, f.radius + g.radius, tuple(out))


def power(rule: Rule, n: int, cap: int = DEFAULT_BALL_CAP) -> Rule:
    if n < 1:
        raise PreconditionError("power needs n >= 1")
    out = rule
    for _ in range(n - 1):
        out = compose(rule, out, cap=cap)
    return out


# -- minimal neighbourhood ----------------------------------------------------------

@dataclass(frozen=True)
class NeighborhoodReport:
    declared_radius: int
    effective_radius: int
    dependent: tuple  # dependent[s] is True iff the output reads the sphere at distance s


def _erase_shell(node, s: int):
    sym, kids = node
    if s == 0:
        return (-1, kids)
    return (sym, tuple(sorted(_erase_shell(c, s - 1) for c in kids)))


def minimal_neighborhood(rule: Rule) -> NeighborhoodReport:
    pairs = list(zip(rule.balls, rule.outputs))
    dependent = []
    for s in range(rule.radius + 1):
        seen = {}
        dep = False
        for b, o in pairs:
            if seen.setdefault(_erase_shell(b, s), o) != o:
                dep = True
                break
        dependent.append(dep)
    eff = max((s for s, d in enumerate(dependent) if d), default=0)
    return NeighborhoodReport(rule.radius, eff, tuple(dependent))


# -- rule space ------------------------------------------------------------------

def count_rules(params, alphabet, r: int) -> int:
    k = params.k if isinstance(params, TreeParams) else int(params)
    size = alphabet.size if isinstance(alphabet, Alphabet) else int(alphabet)
    return size ** count_canonical_balls(k, size, r)


def enumerate_rules(params, alphabet, r: int, start: int | None = None, stop: int | None = None,
                    quiescent_only: bool = False, cap: int = DEFAULT_RULE_CAP) -> Iterator[Rule]:
    """Rules in index order, optionally only indices in ``[start, stop)``."""
    k = params.k if isinstance(params, TreeParams) else int(params)
    size = alphabet.size if isinstance(alphabet, Alphabet) else int(alphabet)
    total = count_rules(k, size, r)
    if start is None and stop is None and total > cap:
        raise CapacityError(f"{total} rules exceeds cap {cap}; pass an index range to shard")
    lo = 0 if start is None else max(0, start)
    hi = total if stop is None else min(total, stop)
    if hi - lo > cap:
        raise CapacityError(f"shard of {hi - lo} rules exceeds cap {cap}")
    n_balls = count_canonical_balls(k, size, r)
    for index in range(lo, hi):
        if quiescent_only and index % size:
            continue
        digits = []
        rest = index
        for _ in range(n_balls):
            rest, d = divmod(rest, size)
            digits.append(d)
        yield Rule(k, size, r, tuple(digits))


def all_labelings(k: int, size: int, center: Vertex, r: int) -> Iterator[dict]:
    """Every labeling of ``ball(center, r)`` (oracle helper; exponential)."""
    from .topology import _bfs
    vs = list(_bfs(k, center, r))
    for syms in product(range(size), repeat=len(vs)):
        yield dict(zip(vs, syms))
