"""Executable checks of the invariance and return-time claims behind the nilrigidity proof."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping

from ..errors import PreconditionError
from ..rules import Rule
from ..simulation import _require_quiescent, oracle_step, step, truncated_ball_graph
from ..topology import ROOT, _bfs, ball, distance, hull_decomposition


@dataclass
class ZuResult:
    passed: bool
    witness: dict | None = None  # leaf, level, the two disagreeing vertices and their image symbols


def z_configuration(rule: Rule, support, level_data: Mapping, R: int,
                    hull_labels: Mapping | None = None, rest: Mapping | None = None) -> dict:
    """Labels on ball(e, R) of a configuration that is level-dependent on every leaf branch.

    ``level_data[u][c]`` is the symbol at distance c from leaf u inside its
    branch (missing levels are 0); ``hull_labels`` gives the hull S and
    ``rest`` the vertices hanging off inner hull vertices (both default 0).
    """
    k = rule.k
    hd = hull_decomposition(k, support)
    if any(distance(ROOT, s) > R - rule.radius for s in hd.hull):
        raise PreconditionError(f"truncation radius {R} too small for the hull plus the rule radius")
    hull_labels = hull_labels or {}
    rest = rest or {}
    labels = {}
    for t in _bfs(k, ROOT, R):
        if t in hd.hull and t not in hd.leaves:
            labels[t] = hull_labels.get(t, 0)
            continue
        u = hd.component_of(t)
        if u is None:
            labels[t] = rest.get(t, 0)
        else:
            labels[t] = level_data.get(u, {}).get(distance(t, u), 0)
    return labels


def verify_zu_invariance(rule: Rule, support, level_data: Mapping, R: int,
                         hull_labels: Mapping | None = None, rest: Mapping | None = None) -> ZuResult:
    """Apply one step to a configuration in Z and check the image is again in Z on the interior.

    The leaf itself belongs to its branch (at coordinate 0), so ``hull_labels``
    entries for leaves are ignored in favour of ``level_data[u][0]``.
    """
    _require_quiescent(rule)
    hd = hull_decomposition(rule.k, support)
    labels = z_configuration(rule, support, level_data, R, hull_labels, rest)
    image = oracle_step(rule, labels, R, adj=truncated_ball_graph(rule.k, R))
    seen: dict = {}
    for t in sorted(image):
        u = hd.component_of(t)
        if u is None:
            continue
        key = (u, distance(t, u))
        if key in seen:
            t0 = seen[key]
            if image[t0] != image[t]:
                return ZuResult(False, {"leaf": u, "level": key[1], "vertices": (t0, t),
                                        "symbols": (image[t0], image[t])})
        else:
            seen[key] = t
    return ZuResult(True)


def random_zu_case(rule: Rule, rng: random.Random, support_radius: int = 2, max_support: int = 4,
                   max_level: int = 4, R: int | None = None) -> dict:
    """A random (support, level_data, hull_labels, rest, R) argument set for verify_zu_invariance."""
    k, A = rule.k, rule.alphabet_size
    region = sorted(_bfs(k, ROOT, support_radius))
    size = rng.randint(2, min(max_support, len(region)))
    support = rng.sample(region, size)
    hd = hull_decomposition(k, support)
    if R is None:
        R = support_radius + max_level + rule.radius
    level_data = {u: {c: rng.randrange(A) for c in range(max_level + 1)} for u in sorted(hd.leaves)}
    hull_labels = {t: rng.randrange(A) for t in sorted(hd.hull)}
    rest = {t: rng.randrange(A) for t in sorted(_bfs(k, ROOT, R))
            if t not in hd.hull and hd.component_of(t) is None}
    return {"support": sorted(support), "level_data": level_data, "hull_labels": hull_labels,
            "rest": rest, "R": R}


@dataclass
class ReturnReport:
    first_hits: list = field(default_factory=list)  # per sample: first n <= horizon with f^n(x) = 0 on the ball, or None

    @property
    def max_first_hit(self):
        hits = [h for h in self.first_hits if h is not None]
        if len(hits) != len(self.first_hits):
            return None
        return max(hits, default=0)

    @property
    def all_returned(self) -> bool:
        return all(h is not None for h in self.first_hits)


def syndetic_return_probe(rule: Rule, samples, zero_ball_radius: int, horizon: int) -> ReturnReport:
    """For each sampled finite configuration, the first time the ball(e, rho) is all zero.

    This samples finite configurations only, so a bounded maximum is evidence,
    not proof, of a uniform return time.
    """
    _require_quiescent(rule)
    window = ball(rule.k, ROOT, zero_ball_radius)
    hits = []
    for x in samples:
        hit = None
        for n in range(horizon + 1):
            if not any(v in window for v in x.cells):
                hit = n
                break
            if n < horizon:
                x = step(rule, x)
        hits.append(hit)
    return ReturnReport(hits)
