"""Rule classification and exhaustive census."""

from __future__ import annotations

import csv
import io
import json
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

from ..compressed import trajectory_stats as compressed_stats
from ..quotient import oned_nilpotent_horizon, quotient_rule, tree_nilpotent_horizon
from ..rules import Rule, count_rules, enumerate_rules, rule_from_index
from ..simulation import FiniteConfig, step
from ..topology import ROOT, _bfs

WORKERS_ENV = "TREECA_WORKERS"

CSV_COLUMNS = [
    "k", "alphabet", "radius", "rule_index", "quiescent", "tree_nilp_horizon",
    "quot_nilp_horizon", "mortal_fraction", "max_first_death", "max_support_excess",
]


@dataclass(frozen=True)
class Horizons:
    nmax: int = 4
    tmax: int = 16
    samples: int = 64
    seed: int = 0
    # radius >= 2 only: explicit trajectories whose support outgrows this count as not mortal by tmax
    max_cells: int = 2048
    sample_radius: int = 3
    max_sample_size: int = 5


@dataclass(frozen=True)
class ClassificationRecord:
    k: int
    alphabet: int
    radius: int
    rule_index: int
    quiescent: bool
    tree_nilp_horizon: int | None = None
    quot_nilp_horizon: int | None = None
    mortal_fraction: float | None = None
    max_first_death: int | None = None
    max_support_excess: int | None = None

    def csv_row(self) -> list:
        out = []
        for f in CSV_COLUMNS:
            v = getattr(self, f)
            if v is None:
                out.append("")
            elif isinstance(v, bool):
                out.append("1" if v else "0")
            elif isinstance(v, float):
                out.append(f"{v:.6f}")
            else:
                out.append(str(v))
        return out

    def consistent(self) -> bool:
        """Quiescence gating, nilpotency transfer, and death by the tree horizon."""
        n = self.tree_nilp_horizon
        if n is None:
            return True
        if not self.quiescent or self.quot_nilp_horizon is None or self.quot_nilp_horizon > n:
            return False
        if self.mortal_fraction is not None and self.mortal_fraction != 1.0:
            return False
        return self.max_first_death is None or self.max_first_death <= n


def sample_rng(seed: int, rule: Rule) -> random.Random:
    k, a, r, i = rule.rule_id
    return random.Random(f"{seed}:{k}:{a}:{r}:{i}")


def sample_configs(k: int, alphabet_size: int, rng: random.Random, count: int,
                   radius: int = 3, max_size: int = 5) -> list:
    """Random finite configurations supported in ball(e, radius)."""
    region = sorted(_bfs(k, ROOT, radius))
    out = []
    for _ in range(count):
        if alphabet_size < 2:
            out.append(FiniteConfig(k, alphabet_size, {}))
            continue
        size = rng.randint(1, min(max_size, len(region)))
        cells = {v: rng.randrange(1, alphabet_size) for v in rng.sample(region, size)}
        out.append(FiniteConfig(k, alphabet_size, cells))
    return out


def _sampled_dynamics(rule: Rule, horizons: Horizons):
    rng = sample_rng(horizons.seed, rule)
    xs = sample_configs(rule.k, rule.alphabet_size, rng, horizons.samples,
                        horizons.sample_radius, horizons.max_sample_size)
    deaths = []
    excess = None
    for x in xs:
        if rule.radius == 1:
            death, ex = compressed_stats(rule, x, horizons.tmax)
        else:
            death, ex = _trajectory_stats(rule, x, horizons.tmax, horizons.max_cells)
        deaths.append(death)
        if ex is not None:
            excess = ex if excess is None else max(excess, ex)
    return deaths, excess


def _trajectory_stats(rule: Rule, x: FiniteConfig, tmax: int, max_cells: int):
    """(first time the support is empty or None, max distance from the initial hull)."""
    if not x:
        return 0, None
    from ..simulation import _hull_distance_fn
    dist = _hull_distance_fn(x.k, x.support)
    excess = 0
    for n in range(1, tmax + 1):
        if len(x) > max_cells:
            return None, excess
        x = step(rule, x)
        if not x:
            return n, excess
        excess = max(excess, max(map(dist, x.cells)))
    return None, excess


def classify(rule: Rule, horizons: Horizons = Horizons()) -> ClassificationRecord:
    base = dict(k=rule.k, alphabet=rule.alphabet_size, radius=rule.radius, rule_index=rule.index)
    if not rule.quiescent:
        return ClassificationRecord(**base, quiescent=False)
    deaths, excess = _sampled_dynamics(rule, horizons)
    mortal = [d for d in deaths if d is not None]
    frac = len(mortal) / len(deaths) if deaths else 1.0
    quot = oned_nilpotent_horizon(quotient_rule(rule), horizons.nmax)
    tree = None
    if quot is not None:
        # every sample still alive at step n refutes f^n == 0
        floor = max(mortal, default=0) if len(mortal) == len(deaths) else horizons.tmax + 1
        tree = tree_nilpotent_horizon(rule, horizons.nmax, start=max(quot, floor, 1))
    return ClassificationRecord(
        **base,
        quiescent=True,
        tree_nilp_horizon=tree,
        quot_nilp_horizon=quot,
        mortal_fraction=frac,
        max_first_death=max(mortal) if mortal else None,
        max_support_excess=excess,
    )


def _classify_index(args):
    k, a, r, index, horizons = args
    return classify(rule_from_index(k, a, r, index), horizons)


def workers_from_env() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def census(params, alphabet, r: int, horizons: Horizons = Horizons(), start: int | None = None,
           stop: int | None = None, workers: int | None = None):
    """Classify every rule with index in [start, stop); returns (records, summary)."""
    k = getattr(params, "k", params)
    a = getattr(alphabet, "size", alphabet)
    if workers is None:
        workers = workers_from_env()
    if workers <= 1:
        records = [classify(rule, horizons) for rule in enumerate_rules(k, a, r, start, stop)]
    else:
        total = count_rules(k, a, r)
        lo = 0 if start is None else max(0, start)
        hi = total if stop is None else min(total, stop)
        # enumerate_rules does the capacity check
        for _ in enumerate_rules(k, a, r, lo, min(hi, lo + 1)):
            pass
        jobs = [(k, a, r, i, horizons) for i in range(lo, hi)]
        with ProcessPoolExecutor(workers) as pool:
            records = list(pool.map(_classify_index, jobs, chunksize=8))
    return records, summarize(records)


def summarize(records) -> dict:
    tree_hist: dict = {}
    quot_hist: dict = {}
    for rec in records:
        if rec.tree_nilp_horizon is not None:
            tree_hist[rec.tree_nilp_horizon] = tree_hist.get(rec.tree_nilp_horizon, 0) + 1
        if rec.quot_nilp_horizon is not None:
            quot_hist[rec.quot_nilp_horizon] = quot_hist.get(rec.quot_nilp_horizon, 0) + 1
    quiescent = [r for r in records if r.quiescent]
    return {
        "rules": len(records),
        "quiescent": len(quiescent),
        "tree_nilpotent": sum(tree_hist.values()),
        "tree_nilpotent_by_horizon": dict(sorted(tree_hist.items())),
        "quotient_nilpotent": sum(quot_hist.values()),
        "quotient_nilpotent_by_horizon": dict(sorted(quot_hist.items())),
        "all_samples_mortal": sum(1 for r in quiescent if r.mortal_fraction == 1.0),
        "no_sample_mortal": sum(1 for r in quiescent if r.mortal_fraction == 0.0),
        "inconsistent_records": sum(1 for r in records if not r.consistent()),
    }


def census_csv(records, horizons: Horizons | None = None) -> str:
    buf = io.StringIO()
    if horizons is not None:
        buf.write("# " + " ".join(f"{f.name}={getattr(horizons, f.name)}" for f in fields(horizons)) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in records:
        w.writerow(rec.csv_row())
    return buf.getvalue()


def census_jsonl(records) -> str:
    return "".join(json.dumps(asdict(rec)) + "\n" for rec in records)
