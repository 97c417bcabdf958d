"""Level-stratified configurations and the induced one-dimensional CA.

A configuration that is constant on every level ``busemann_level(t) = i`` is
determined by a bi-infinite word; the tree rule acts on such words as a 1D
rule of the same radius.  Horizon checks here are semidecisions: they certify
``f^n == 0`` for a given n and never claim that no such n exists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping

from .errors import CapacityError, NonQuiescentRuleError, PreconditionError
from .rules import DEFAULT_BALL_CAP, Rule, canonical_at, power
from .topology import ROOT, _bfs, busemann_level, path_vertex

DEFAULT_WINDOW_CAP = 10**7


@dataclass(frozen=True)
class OneDimConfig:
    alphabet_size: int
    cells: Mapping = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(i): s for i, s in self.cells.items() if s != 0}
        for s in clean.values():
            if not 0 < s < self.alphabet_size:
                raise PreconditionError(f"symbol {s} outside alphabet of size {self.alphabet_size}")
        object.__setattr__(self, "cells", clean)

    __hash__ = None

    def __getitem__(self, i: int) -> int:
        return self.cells.get(i, 0)

    def __bool__(self):
        return bool(self.cells)

    def shift(self, d: int = 1) -> "OneDimConfig":
        """sigma^d: (sigma x)_i = x_{i+d}."""
        return OneDimConfig(self.alphabet_size, {i - d: s for i, s in self.cells.items()})


@dataclass(frozen=True)
class OneDimRule:
    alphabet_size: int
    radius: int
    outputs: tuple = field(repr=False)  # indexed by window read as a base-|A| number, leftmost cell most significant

    def __post_init__(self):
        if len(self.outputs) != self.alphabet_size ** (2 * self.radius + 1):
            raise PreconditionError("1D table must be total over all windows")

    @cached_property
    def table(self) -> dict:
        width = 2 * self.radius + 1
        return dict(zip(product(range(self.alphabet_size), repeat=width), self.outputs))

    @property
    def quiescent(self) -> bool:
        return self.outputs[0] == 0

    def __call__(self, window) -> int:
        return self.table[tuple(window)]


def oned_rule_from_function(alphabet_size: int, radius: int, fn) -> OneDimRule:
    width = 2 * radius + 1
    return OneDimRule(alphabet_size, radius, tuple(fn(w) for w in product(range(alphabet_size), repeat=width)))


def phi_expand(x: OneDimConfig, region: Iterable) -> dict:
    return {t: x[busemann_level(t)] for t in region}


def read_levels(labels: Mapping, levels: Iterable[int], alphabet_size: int) -> OneDimConfig:
    """Inverse of phi on a labeling: read the symbol at p(i) for each level i."""
    return OneDimConfig(alphabet_size, {i: labels[path_vertex(i)] for i in levels})


def quotient_rule(rule: Rule) -> OneDimRule:
    k, r = rule.k, rule.radius
    region = list(_bfs(k, ROOT, r))
    levels = {t: busemann_level(t) for t in region}
    table = rule.table

    def fn(window):
        return table[canonical_at(k, lambda t: window[levels[t] + r], ROOT, r)]

    return oned_rule_from_function(rule.alphabet_size, r, fn)


def oned_step(rule: OneDimRule, x: OneDimConfig) -> OneDimConfig:
    if not rule.quiescent:
        raise NonQuiescentRuleError("1D rule maps the all-zero window to a nonzero symbol")
    if not x:
        return x
    r = rule.radius
    lo, hi = min(x.cells) - r, max(x.cells) + r
    table = rule.table
    out = {}
    for i in range(lo, hi + 1):
        s = table[tuple(x[j] for j in range(i - r, i + r + 1))]
        if s:
            out[i] = s
    return OneDimConfig(x.alphabet_size, out)


def oned_run(rule: OneDimRule, x: OneDimConfig, n: int) -> list:
    out = [x]
    for _ in range(n):
        out.append(oned_step(rule, out[-1]))
    return out


def _apply_word(outputs: tuple, size: int, width: int, word: tuple) -> tuple:
    out = []
    for i in range(len(word) - width + 1):
        idx = 0
        for s in word[i:i + width]:
            idx = idx * size + s
        out.append(outputs[idx])
    return tuple(out)


def oned_nilpotent_at(rule: OneDimRule, n: int, cap: int = DEFAULT_WINDOW_CAP) -> bool:
    """True iff every word of length 2nr+1 is sent to 0 by n window applications."""
    if n < 1:
        raise PreconditionError("horizon must be >= 1")
    size, r = rule.alphabet_size, rule.radius
    length = 2 * n * r + 1
    if size**length > cap:
        raise CapacityError(f"{size}^{length} windows exceeds cap {cap}")
    width = 2 * r + 1
    # push the image set forward level by level; identical intermediate words are deduplicated
    words = set(product(range(size), repeat=length))
    for _ in range(n):
        words = {_apply_word(rule.outputs, size, width, w) for w in words}
    return words == {(0,)}


def oned_nilpotent_horizon(rule: OneDimRule, nmax: int, cap: int = DEFAULT_WINDOW_CAP):
    for n in range(1, nmax + 1):
        if oned_nilpotent_at(rule, n, cap):
            return n
    return None


# -- tree horizon ----------------------------------------------------------------

def tree_nilpotent_at(rule: Rule, n: int, cap: int = DEFAULT_BALL_CAP, method: str = "auto") -> bool:
    """True iff f^n maps every configuration to 0.

    ``method="compose"`` builds the n-fold composed table and checks it is
    constant 0; ``method="responses"`` (radius-1 rules only) runs the subtree
    response search in :mod:`treeca.responses`, which never materializes the
    radius-n table.  ``"auto"`` picks responses when it applies.
    """
    if n < 1:
        raise PreconditionError("horizon must be >= 1")
    if not rule.quiescent:
        return False
    if method == "auto":
        method = "responses" if rule.radius == 1 else "compose"
    if method == "compose":
        return not any(power(rule, n, cap=cap).outputs)
    if method == "responses":
        from .responses import nilpotency_witness
        return nilpotency_witness(rule, n, cap=cap) is None
    raise PreconditionError(f"unknown method {method!r}")


def tree_nilpotent_horizon(rule: Rule, nmax: int, start: int = 1, cap: int = DEFAULT_BALL_CAP, method: str = "auto"):
    for n in range(max(1, start), nmax + 1):
        if tree_nilpotent_at(rule, n, cap=cap, method=method):
            return n
    return None
