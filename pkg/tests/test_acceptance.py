"""Acceptance gate: one PASS/FAIL line per criterion.

All criteria are exact (zero tolerance).  Run under pytest, or directly with
``python3 tests/test_acceptance.py`` for just the report lines.
"""

import random
import subprocess
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import burnside_count  # noqa: E402
from treeca.lab import suites  # noqa: E402
from treeca.lab.census import Horizons, census, census_csv  # noqa: E402
from treeca.responses import nilpotency_witness  # noqa: E402
from treeca.rules import (  # noqa: E402
    all_labelings,
    count_canonical_balls,
    count_rules,
    enumerate_canonical_balls,
    enumerate_rules,
    rule_from_index,
)
from treeca.simulation import oracle_run  # noqa: E402
from treeca.topology import ROOT, _bfs  # noqa: E402

HORIZONS = Horizons()  # nmax=4, tmax=16, 64 samples, seed 0
CENSUS_RULES = 256
QUIESCENT = 128


def report(number, title, ok, detail, capsys=None):
    line = f"{'PASS' if ok else 'FAIL'} [{number}] {title}: {detail}"
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    return ok


@pytest.fixture(scope="module")
def census_k3():
    return census(3, 2, 1, HORIZONS, workers=1)


def _c1():
    balls = {r: (burnside_count(3, 2, r), count_canonical_balls(3, 2, r), len(enumerate_canonical_balls(3, 2, r)))
             for r in (1, 2)}
    ok = balls[1] == (8, 8, 8) and balls[2] == (112, 112, 112)
    total = count_rules(3, 2, 1)
    quiescent = sum(1 for _ in enumerate_rules(3, 2, 1, quiescent_only=True))
    small = count_rules(2, 2, 1)
    ok = ok and (total, quiescent, small) == (256, 128, 64)
    ok = ok and sum(1 for _ in enumerate_rules(3, 2, 1)) == 256 and sum(1 for _ in enumerate_rules(2, 2, 1)) == 64
    detail = (f"balls r=1 {balls[1]}, r=2 {balls[2]} (orbit oracle, formula, enumeration); "
              f"rules {total}/{quiescent} quiescent, k=2: {small}")
    return ok, detail


def _suite(name, count, expected):
    res = suites.run_suite(name, seed=0, count=count)
    ok = res.failed == 0 and res.passed == expected
    msgs = "; ".join(cx.message for cx in res.counterexamples[:2])
    return ok, f"{res.passed}/{expected} passed, {res.failed} failed" + (f" ({msgs})" if msgs else "")


def _c2():
    return _suite("oracle", 1000, QUIESCENT * 16 + 1000)


def _c3():
    return _suite("equivariance", 1000, 1000)


def _c4():
    return _suite("additivity", 1000, 1000)


def _c5():
    # 10 random 1D configs per quiescent rule, compared at every step n <= 3, plus level-constancy
    return _suite("conjugacy", QUIESCENT * 10, QUIESCENT * 10)


def _dies(rule, lab, n):
    return oracle_run(rule, lab, n, n)[ROOT] == 0


def _c6(records):
    problems = []
    transfer = 0
    for rec in records:
        if not rec.consistent():
            problems.append(f"rule {rec.rule_index} inconsistent")
        if rec.tree_nilp_horizon is not None:
            transfer += 1
    rng = random.Random(0)
    exhaustive = sampled = 0
    for rec in records:
        rule = rule_from_index(3, 2, 1, rec.rule_index)
        h = rec.tree_nilp_horizon
        if not rule.quiescent:
            if h is not None:
                problems.append(f"non-quiescent rule {rec.rule_index} has a horizon")
            continue
        for n in (1, 2):
            brute = all(_dies(rule, lab, n) for lab in all_labelings(3, 2, ROOT, n))
            exhaustive += 1
            if brute != (h is not None and h <= n):
                problems.append(f"rule {rec.rule_index} n={n}: column {h}, exhaustive {brute}")
        for n in (3, 4):
            sampled += 1
            verts = list(_bfs(3, ROOT, n))
            labs = [{v: rng.randrange(2) for v in verts} for _ in range(100)]
            if h is not None and h <= n:
                if not all(_dies(rule, lab, n) for lab in labs):
                    problems.append(f"rule {rec.rule_index} n={n}: claimed nilpotent, a sample survives")
            elif all(_dies(rule, lab, n) for lab in labs):
                lab = nilpotency_witness(rule, n)
                if lab is None or _dies(rule, lab, n):
                    problems.append(f"rule {rec.rule_index} n={n}: claimed not nilpotent, no survivor found")
    t_ok, t_detail = _suite("transfer", 0, QUIESCENT)
    if not t_ok:
        problems.append(f"transfer suite: {t_detail}")
    detail = (f"{transfer} tree-nilpotent rules all quotient-nilpotent no later, per-n transfer {t_detail}; "
              f"column checked on {exhaustive} exhaustive (n<=2) and {sampled} sampled (n=3,4) cases, {len(problems)} mismatches")
    if problems:
        detail += " (" + "; ".join(problems[:3]) + ")"
    return not problems, detail


def _c7():
    zu_ok, zu = _suite("zu", QUIESCENT * 8, QUIESCENT * 8)
    s_ok, single = _suite("singleton", 0, QUIESCENT)
    return zu_ok and s_ok, f"Z_u invariance {zu}; singleton support {single}"


def _cli_census(path, workers):
    cmd = [sys.executable, "-m", "treeca.lab.cli", "census", "--k", "3", "--alphabet", "2", "--radius", "1",
           "--nmax", "4", "--seed", "0", "--header", "--workers", str(workers), "--out", str(path)]
    subprocess.run(cmd, check=True, capture_output=True)
    return path.read_bytes()


def _c8(records, tmp):
    first = census_csv(records, HORIZONS).encode()
    a = _cli_census(Path(tmp) / "a.csv", 1)
    b = _cli_census(Path(tmp) / "b.csv", 2)
    rows = len(a.decode().splitlines()) - 2  # header comment and column names
    ok = first == a == b and rows == CENSUS_RULES
    return ok, f"3 runs (in-process, CLI serial, CLI 2 workers) byte-identical: {first == a == b}, {rows} rows"


def test_criterion_1_combinatorial_checkpoints(capsys):
    ok, detail = _c1()
    assert report(1, "combinatorial checkpoints", ok, detail, capsys)


def test_criterion_2_oracle_equivalence(capsys):
    ok, detail = _c2()
    assert report(2, "oracle equivalence", ok, detail, capsys)


def test_criterion_3_equivariance(capsys):
    ok, detail = _c3()
    assert report(3, "equivariance", ok, detail, capsys)


def test_criterion_4_additivity(capsys):
    ok, detail = _c4()
    assert report(4, "additivity", ok, detail, capsys)


def test_criterion_5_quotient_conjugacy(capsys):
    ok, detail = _c5()
    assert report(5, "quotient conjugacy", ok, detail, capsys)


def test_criterion_6_nilpotency_transfer(census_k3, capsys):
    records, summary = census_k3
    ok, detail = _c6(records)
    ok = ok and summary["rules"] == CENSUS_RULES
    assert report(6, "nilpotency transfer", ok, detail, capsys)


def test_criterion_7_invariance_suites(capsys):
    ok, detail = _c7()
    assert report(7, "invariance suites", ok, detail, capsys)


def test_criterion_8_determinism(census_k3, tmp_path, capsys):
    ok, detail = _c8(census_k3[0], tmp_path)
    assert report(8, "census determinism", ok, detail, capsys)


if __name__ == "__main__":
    import tempfile

    records, _ = census(3, 2, 1, HORIZONS, workers=1)
    results = [
        report(1, "combinatorial checkpoints", *_c1()),
        report(2, "oracle equivalence", *_c2()),
        report(3, "equivariance", *_c3()),
        report(4, "additivity", *_c4()),
        report(5, "quotient conjugacy", *_c5()),
        report(6, "nilpotency transfer", *_c6(records)),
        report(7, "invariance suites", *_c7()),
    ]
    with tempfile.TemporaryDirectory() as tmp:
        results.append(report(8, "census determinism", *_c8(records, tmp)))
    sys.exit(0 if all(results) else 1)
