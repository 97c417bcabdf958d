"""Property suites run by ``treeca verify``.

Every suite is a case generator plus a check.  Cases are JSON-compatible dicts
so that a failing case can be dumped next to its rule file and replayed.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from ..errors import PreconditionError
from ..io import format_config, load_rule, save_rule
from ..quotient import (
    OneDimConfig,
    oned_nilpotent_at,
    oned_run,
    phi_expand,
    quotient_rule,
    tree_nilpotent_at,
)
from ..responses import nilpotency_witness
from ..rules import Rule, all_labelings, enumerate_rules, rule_from_index, count_rules
from ..simulation import (
    AutomorphismDescription,
    FiniteConfig,
    apply_automorphism,
    disjoint_sum,
    iterate,
    oracle_run,
    oracle_step,
    random_automorphism,
    step,
    truncated_ball_graph,
)
from ..topology import ROOT, _bfs, busemann_level, distance, format_vertex, parse_vertex, path_vertex
from .probes import random_zu_case, syndetic_return_probe, verify_zu_invariance


# -- case (de)serialisation ---------------------------------------------------------

def _cells_out(x: FiniteConfig) -> dict:
    return {format_vertex(v): s for v, s in x.items_sorted()}


def _cells_in(rule: Rule, cells: dict) -> FiniteConfig:
    return FiniteConfig(rule.k, rule.alphabet_size, {parse_vertex(w, rule.k): s for w, s in cells.items()})


def _automorphism_out(g: AutomorphismDescription) -> dict:
    return {"anchor": format_vertex(g.anchor_image),
            "perms": {format_vertex(v): list(p) for v, p in sorted(g.perms.items())}}


def _automorphism_in(k: int, data: dict) -> AutomorphismDescription:
    return AutomorphismDescription(k, parse_vertex(data["anchor"], k),
                                   {parse_vertex(v, k): tuple(p) for v, p in data["perms"].items()})


# -- individual checks: return None on success, a message on failure --------------------------

def check_oracle(rule: Rule, case: dict):
    x = _cells_in(rule, case["config"])
    r = rule.radius
    R = max((len(v) for v in x.cells), default=0) + 2 * r
    labels = {v: x[v] for v in _bfs(rule.k, ROOT, R)}
    ref = oracle_step(rule, labels, R)
    fast = step(rule, x)
    outside = [v for v in fast.cells if v not in ref]
    if outside:
        return f"fast step wrote outside the light cone at {format_vertex(outside[0])}"
    for v, s in ref.items():
        if fast[v] != s:
            return f"vertex {format_vertex(v)}: fast step {fast[v]}, oracle {s}"
    return None


def check_equivariance(rule: Rule, case: dict):
    x = _cells_in(rule, case["config"])
    g = _automorphism_in(rule.k, case["automorphism"])
    lhs = step(rule, apply_automorphism(g, x))
    rhs = apply_automorphism(g, step(rule, x))
    if lhs != rhs:
        diff = sorted(set(lhs.cells.items()) ^ set(rhs.cells.items()))
        return f"step(g.x) != g.step(x); first difference {format_vertex(diff[0][0])}"
    return None


def check_additivity(rule: Rule, case: dict):
    x = _cells_in(rule, case["config"])
    y = _cells_in(rule, case["config2"])
    n = case["steps"]
    sep = min((distance(v, w) for v in x.cells for w in y.cells), default=None)
    if sep is not None and sep <= 2 * n * rule.radius:
        raise PreconditionError(f"supports only {sep} apart; need more than {2 * n * rule.radius}")
    lhs = iterate(rule, disjoint_sum(x, y), n)
    rhs = disjoint_sum(iterate(rule, x, n), iterate(rule, y, n))
    if lhs != rhs:
        return f"f^{n}(x+y) != f^{n}(x)+f^{n}(y)"
    return None


def check_conjugacy(rule: Rule, case: dict):
    x = OneDimConfig(rule.alphabet_size, {int(i): s for i, s in case["config1d"].items()})
    n = case["steps"]
    window = case.get("window", 4)
    r = rule.radius
    R = n * r + window
    labels = phi_expand(x, _bfs(rule.k, ROOT, R))
    bar = quotient_rule(rule)
    oned = oned_run(bar, x, n) if bar.quiescent else None
    adj = truncated_ball_graph(rule.k, R)
    cur = labels
    for t in range(1, n + 1):
        Rt = R - (t - 1) * r
        cur = oracle_step(rule, cur, Rt, adj={v: [w for w in ws if w in cur] for v, ws in adj.items() if v in cur})
        by_level: dict = {}
        for v, s in cur.items():
            lvl = busemann_level(v)
            if by_level.setdefault(lvl, s) != s:
                return f"step {t}: image not constant on level {lvl}"
        if oned is not None:
            for i in range(-(R - t * r), R - t * r + 1):
                if cur[path_vertex(i)] != oned[t][i]:
                    return f"step {t}, level {i}: tree {cur[path_vertex(i)]}, 1D {oned[t][i]}"
    return None


def check_transfer(rule: Rule, case: dict):
    bar = quotient_rule(rule)
    for n in range(1, case.get("nmax", 4) + 1):
        if tree_nilpotent_at(rule, n) and not oned_nilpotent_at(bar, n):
            return f"tree-nilpotent at {n} but the quotient is not"
    return None


def check_zu(rule: Rule, case: dict):
    k = rule.k
    support = [parse_vertex(w, k) for w in case["support"]]
    level_data = {parse_vertex(u, k): {int(c): s for c, s in lv.items()} for u, lv in case["level_data"].items()}
    hull_labels = {parse_vertex(w, k): s for w, s in case.get("hull_labels", {}).items()}
    rest = {parse_vertex(w, k): s for w, s in case.get("rest", {}).items()}
    res = verify_zu_invariance(rule, support, level_data, case["R"], hull_labels, rest)
    if not res.passed:
        w = res.witness
        a, b = w["vertices"]
        return (f"branch of {format_vertex(w['leaf'])}, level {w['level']}: "
                f"{format_vertex(a)}->{w['symbols'][0]} vs {format_vertex(b)}->{w['symbols'][1]}")
    return None


def check_singleton(rule: Rule, case: dict):
    for w in case.get("vertices", ["e"]):
        v = parse_vertex(w, rule.k)
        for s in range(1, rule.alphabet_size):
            y = step(rule, FiniteConfig(rule.k, rule.alphabet_size, {v: s}))
            if len(y) == 1 and y.support != {v}:
                return f"singleton at {w} with symbol {s} moved to {format_vertex(next(iter(y.cells)))}"
    return None


def check_nilpotency(rule: Rule, case: dict):
    """Cross-check the horizon search against truncated-ball simulation."""
    n = case["n"]
    claim = tree_nilpotent_at(rule, n)
    if case.get("exhaustive"):
        brute = all(oracle_run(rule, lab, n * rule.radius, n)[ROOT] == 0
                    for lab in all_labelings(rule.k, rule.alphabet_size, ROOT, n * rule.radius))
        if brute != claim:
            return f"horizon {n}: search says {claim}, exhaustive simulation says {brute}"
        return None
    if not claim:
        if rule.radius != 1:
            return None
        lab = nilpotency_witness(rule, n)
        if oracle_run(rule, lab, n, n)[ROOT] == 0:
            return f"horizon {n}: witness does not survive"
        return None
    rng = random.Random(case.get("seed", 0))
    verts = list(_bfs(rule.k, ROOT, n * rule.radius))
    for _ in range(case.get("samples", 200)):
        lab = {v: rng.randrange(rule.alphabet_size) for v in verts}
        if oracle_run(rule, lab, n * rule.radius, n)[ROOT] != 0:
            return f"horizon {n}: claimed nilpotent but a sampled labeling survives"
    return None


def check_return(rule: Rule, case: dict):
    """Rules nilpotent at horizon h kill every sample by step h, and their return time is <= h."""
    h = case["horizon"]
    xs = [_cells_in(rule, c) for c in case["configs"]]
    for x in xs:
        if iterate(rule, x, h):
            return f"sample survives past horizon {h}"
    rep = syndetic_return_probe(rule, xs, case.get("rho", 2), h)
    if not rep.all_returned or rep.max_first_hit > h:
        return f"return time exceeds horizon {h}"
    return None


CHECKS: dict[str, Callable] = {
    "oracle": check_oracle,
    "equivariance": check_equivariance,
    "additivity": check_additivity,
    "conjugacy": check_conjugacy,
    "transfer": check_transfer,
    "zu": check_zu,
    "singleton": check_singleton,
    "nilpotency": check_nilpotency,
    "return": check_return,
}


# -- case generators ---------------------------------------------------------------

def _random_config(k, A, rng, radius, max_size=5, center=ROOT):
    region = sorted(_bfs(k, center, radius))
    size = rng.randint(1, min(max_size, len(region)))
    return FiniteConfig(k, A, {v: rng.randrange(1, A) for v in rng.sample(region, size)})


def _random_quiescent_rule(rng, k, A, r):
    n = count_rules(k, A, r)
    return rule_from_index(k, A, r, rng.randrange(n // A) * A)


def _random_family(rng):
    k = rng.choice([2, 3, 3, 4])
    A = rng.choice([2, 2, 3])
    r = 2 if (k, A) == (3, 2) and rng.random() < 0.2 else 1
    return k, A, r


def _census_rules(k=3, A=2, r=1):
    return list(enumerate_rules(k, A, r, quiescent_only=True))


def gen_oracle(rng, count):
    for rule in _census_rules():
        for lab in all_labelings(3, 2, ROOT, 1):
            yield rule, {"config": _cells_out(FiniteConfig(3, 2, lab))}
    for _ in range(count):
        k, A, r = _random_family(rng)
        rule = _random_quiescent_rule(rng, k, A, r)
        yield rule, {"config": _cells_out(_random_config(k, A, rng, 3))}


def gen_equivariance(rng, count):
    for _ in range(count):
        k, A, r = _random_family(rng)
        rule = _random_quiescent_rule(rng, k, A, r)
        x = _random_config(k, A, rng, 2)
        g = random_automorphism(k, rng, depth=rng.randint(0, 4), anchor_radius=3)
        yield rule, {"config": _cells_out(x), "automorphism": _automorphism_out(g)}


def gen_additivity(rng, count):
    for _ in range(count):
        k = rng.choice([3, 3, 4])
        A = rng.choice([2, 3])
        rule = _random_quiescent_rule(rng, k, A, 1)
        n = rng.randint(1, 3)
        x = _random_config(k, A, rng, 1, max_size=4)
        depth = 2 * n + 3
        far = tuple([rng.randrange(k)] + [rng.randrange(k - 1) for _ in range(depth - 1)])
        y = _random_config(k, A, rng, 1, max_size=4, center=far)
        yield rule, {"config": _cells_out(x), "config2": _cells_out(y), "steps": n}


def gen_conjugacy(rng, count):
    rules = _census_rules()
    per_rule = max(1, count // len(rules)) if count else 10
    for rule in rules:
        for _ in range(per_rule):
            cells = {i: rng.randrange(2) for i in range(-3, 4)}
            # the check compares every step up to n, so n = 3 covers n <= 3
            yield rule, {"config1d": {str(i): s for i, s in cells.items() if s}, "steps": 3}


def gen_transfer(rng, count):
    for rule in _census_rules():
        yield rule, {"nmax": 4}


def gen_zu(rng, count):
    rules = _census_rules()
    per_rule = max(1, count // len(rules)) if count else 8
    for rule in rules:
        for _ in range(per_rule):
            case = random_zu_case(rule, rng)
            yield rule, {
                "support": [format_vertex(v) for v in case["support"]],
                "level_data": {format_vertex(u): {str(c): s for c, s in lv.items()}
                               for u, lv in case["level_data"].items()},
                "hull_labels": {format_vertex(v): s for v, s in case["hull_labels"].items()},
                "rest": {format_vertex(v): s for v, s in case["rest"].items()},
                "R": case["R"],
            }


def gen_singleton(rng, count):
    for rule in _census_rules():
        yield rule, {"vertices": ["e", "0", "11", "201"]}


def gen_nilpotency(rng, count):
    for rule in _census_rules():
        for n in (1, 2):
            yield rule, {"n": n, "exhaustive": True}
        for n in (3, 4):
            yield rule, {"n": n, "seed": rng.randrange(2**32), "samples": 50}


def gen_return(rng, count):
    from .census import sample_configs
    for rule in _census_rules():
        for n in range(1, 5):
            if tree_nilpotent_at(rule, n):
                xs = sample_configs(rule.k, rule.alphabet_size, rng, 32)
                yield rule, {"horizon": n, "configs": [_cells_out(x) for x in xs], "rho": 2}
                break


GENERATORS = {
    "oracle": gen_oracle,
    "equivariance": gen_equivariance,
    "additivity": gen_additivity,
    "conjugacy": gen_conjugacy,
    "transfer": gen_transfer,
    "zu": gen_zu,
    "singleton": gen_singleton,
    "nilpotency": gen_nilpotency,
    "return": gen_return,
}

DEFAULT_COUNTS = {"oracle": 1000, "equivariance": 1000, "additivity": 1000, "conjugacy": 1280, "zu": 1024}


# -- running and reporting ----------------------------------------------------------

@dataclass
class Counterexample:
    suite: str
    rule: Rule
    case: dict
    message: str
    path: Path | None = None


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failed: int = 0
    counterexamples: list = field(default_factory=list)


@dataclass
class SuiteReport:
    results: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.failed == 0 for r in self.results)

    def lines(self) -> list:
        out = []
        for r in self.results:
            status = "PASS" if r.failed == 0 else "FAIL"
            out.append(f"{status} {r.name}: {r.passed} passed, {r.failed} failed")
            for cx in r.counterexamples:
                where = f" [{cx.path}]" if cx.path else ""
                out.append(f"  rule {cx.rule.rule_id}: {cx.message}{where}")
        return out


def run_suite(name: str, seed: int = 0, count: int | None = None, dump_dir=None,
              max_dumps: int = 5) -> SuiteResult:
    rng = random.Random(f"{name}:{seed}")
    if count is None:
        count = DEFAULT_COUNTS.get(name, 0)
    check = CHECKS[name]
    res = SuiteResult(name)
    for rule, case in GENERATORS[name](rng, count):
        msg = check(rule, case)
        if msg is None:
            res.passed += 1
            continue
        res.failed += 1
        if len(res.counterexamples) < max_dumps:
            cx = Counterexample(name, rule, case, msg)
            if dump_dir is not None:
                cx.path = dump_counterexample(cx, Path(dump_dir) / f"{name}-{res.failed:04d}")
            res.counterexamples.append(cx)
    return res


def run_suites(names, seed: int = 0, count: int | None = None, dump_dir=None) -> SuiteReport:
    return SuiteReport([run_suite(n, seed, count, dump_dir) for n in names])


def dump_counterexample(cx: Counterexample, directory: Path) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    save_rule(cx.rule, directory / "rule.json")
    if "config" in cx.case and isinstance(cx.case["config"], dict):
        x = _cells_in(cx.rule, cx.case["config"])
        (directory / "config.txt").write_text(format_config(x))
    (directory / "case.json").write_text(json.dumps(
        {"suite": cx.suite, "case": cx.case, "step": cx.case.get("steps", cx.case.get("n", 1)),
         "message": cx.message}, indent=1) + "\n")
    return directory


def replay(directory) -> str | None:
    """Re-run a dumped case; returns the failure message, or None if it now passes."""
    directory = Path(directory)
    meta = json.loads((directory / "case.json").read_text())
    rule = load_rule(directory / "rule.json")
    return CHECKS[meta["suite"]](rule, meta["case"])
