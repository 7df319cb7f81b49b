"""Exit criteria. Each test prints one PASS/FAIL line (visible without -s)."""
import csv
import json
import time

import numpy as np
import pytest

from conftest import make, random_points
from kcenter.adversary import EAConfig, mutate, recombine
from kcenter.bench import SETUPS, campaign_instance, get_setup, run_adversarial_campaign, run_average_campaign
from kcenter.cli import main
from kcenter.core import solve_exact
from kcenter.solvers import SolverConfig, SolverKind, solve
from oracles import exhaustive

pytestmark = pytest.mark.acceptance

K = SolverKind
DRAGOON = SolverConfig(K.DRAGOON)


@pytest.fixture
def report(capsys):
    def emit(number, name, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {name} -- {detail}")
        return ok

    return emit


@pytest.fixture(scope="module")
def corpus():
    """Shared-seed instance corpus for criteria 2 and 3: 1000 instances per setup."""
    rng = np.random.default_rng(20160102)
    items = []
    for setup in SETUPS:
        for i in range(1000):
            items.append((campaign_instance(setup, 77, i), int(rng.integers(2**63))))
    return items


def test_c1_two_approximation(report):
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    kinds = [K.TWO_APPROX, K.DRAGOON, K.GREEDY, K.BACKTRACK]
    violations, checked = [], 0
    for _ in range(250):
        n = int(rng.integers(5, 13))
        k = int(rng.integers(1, 4))
        inst = make(random_points(rng, n), k)
        opt = solve_exact(inst).objective
        seed = int(rng.integers(2**63))
        for kind in kinds:
            d = solve(inst, SolverConfig(kind, seed=seed))[0].objective
            checked += 1
            if d > 2 * opt:
                violations.append((kind.value, n, k, d, opt))
    elapsed = time.perf_counter() - start
    ok = not violations and elapsed < 60
    per_kind = {kind.value: sum(v[0] == kind.value for v in violations) for kind in kinds}
    report(1, "2-approximation bound", ok,
           f"250 instances, {checked} solves, violations {per_kind}, {elapsed:.1f}s")
    assert ok, violations[:5]


def test_c2_backtrack_dominance(report, corpus):
    start = time.perf_counter()
    worse = 0
    for inst, seed in corpus:
        g = solve(inst, SolverConfig(K.GREEDY, seed=seed))[0].objective
        b = solve(inst, SolverConfig(K.BACKTRACK, seed=seed))[0].objective
        worse += b > g
    elapsed = time.perf_counter() - start
    ok = worse == 0 and elapsed < 300
    report(2, "Backtrack <= Greedy", ok, f"{len(corpus)} instances, {worse} violations, {elapsed:.1f}s")
    assert ok


def test_c3_dragoon_monotone(report, corpus):
    bad = 0
    for inst, seed in corpus:
        sol, trace = solve(inst, SolverConfig(K.DRAGOON, seed=seed))
        values = [v for _, v in trace.stage_objectives]
        if trace.stage_objectives[0][0] != "stage2":
            bad += 1
        elif any(b > a for a, b in zip(values, values[1:])) or sol.objective > values[0]:
            bad += 1
    ok = bad == 0
    report(3, "Dragoon stage-3 monotonicity", ok, f"{len(corpus)} instances, {bad} violations")
    assert ok


def test_c4_table2_signs(report):
    start = time.perf_counter()
    challengers = [SolverConfig(K.MACQUEEN), SolverConfig(K.TWO_APPROX), SolverConfig(K.GREEDY)]
    cells, failures = [], []
    for name in ("25/4", "36/4", "49/9", "64/16"):
        s = run_average_campaign(get_setup(name), DRAGOON, challengers, 1000, seed=2016)
        for c, st in s.stats.items():
            assert st.count == 1000
            cells.append(f"{name} {c}={st.mean:+.2f}")
            if not st.mean > 0:
                failures.append((name, c, st.mean))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 900
    report(4, "mean dD vs Dragoon > 0", ok, f"{'; '.join(cells)} ({elapsed:.1f}s)")
    assert ok, failures


@pytest.fixture(scope="module")
def table3_runs():
    setup = get_setup("I")
    ea = EAConfig(10, 2, DRAGOON, DRAGOON)
    start = time.perf_counter()
    out = {}
    for kind in (K.MACQUEEN, K.TWO_APPROX, K.GREEDY, K.BACKTRACK):
        out[kind.value] = run_adversarial_campaign(setup, [(SolverConfig(kind), DRAGOON)], ea, list(range(10)))
    return out, time.perf_counter() - start


def test_c5_table3_existence(report, table3_runs):
    runs, elapsed = table3_runs
    parts, ok = [], elapsed < 600
    for kind, outcomes in runs.items():
        assert all(o.result.config.population == 20 and len(o.result.fitness_history) == 101 for o in outcomes)
        hits = sum(o.best_delta < 0 for o in outcomes)
        parts.append(f"{kind} {hits}/10 best={min(o.best_delta for o in outcomes):.2f}")
        ok &= hits >= 8
    report(5, "EA finds dD < 0 vs Dragoon on 10/2", ok, f"{'; '.join(parts)} ({elapsed:.1f}s)")
    assert ok


def test_c6_elitism(report, table3_runs):
    runs, _ = table3_runs
    violations = total = 0
    for outcomes in runs.values():
        for o in outcomes:
            h = o.result.fitness_history
            total += 1
            violations += any(b > a for a, b in zip(h, h[1:]))
    ok = violations == 0
    report(6, "EA fitness history non-increasing", ok, f"{total} runs, {violations} violations")
    assert ok


def _campaign(capsys, tmp_path, name, argv):
    first = tmp_path / f"{name}_a"
    second = tmp_path / f"{name}_b"
    assert main([name, *argv, "--out", str(first), "--no-plots"]) == 0
    assert main(["replay", str(first / "manifest.json"), "--out", str(second)]) == 0
    capsys.readouterr()
    files = sorted(p.relative_to(first) for p in first.rglob("*.csv"))
    files += sorted(p.relative_to(first) for p in first.rglob("*.json") if p.name != "manifest.json")
    assert files
    return [(str(f), (first / f).read_bytes() == (second / f).read_bytes()) for f in files]


def test_c7_determinism(report, capsys, tmp_path):
    results = []
    results += _campaign(capsys, tmp_path, "average", ["--setup", "I", "--setup", "VI", "--instances", "50"])
    results += _campaign(capsys, tmp_path, "adversary", ["--setup", "I", "--generations", "5", "--runs", "2"])
    results += _campaign(capsys, tmp_path, "matrix", ["--setup", "10/2", "--kinds", "greedy,backtrack,dragoon",
                                                      "--generations", "3", "--runs", "1"])
    same = sum(ok for _, ok in results)
    ok = same == len(results)
    report(7, "replay from manifest is byte-identical", ok, f"{same}/{len(results)} files identical")
    assert ok, [f for f, good in results if not good]


def test_c8_oracle_consistency(report):
    rng = np.random.default_rng(8)
    mismatches = 0
    for _ in range(50):
        n = int(rng.integers(1, 11))
        k = int(rng.integers(1, min(n, 3) + 1))
        pts = random_points(rng, n)
        d, centers = exhaustive(pts, k)
        sol = solve_exact(make(pts, k))
        mismatches += (sol.objective != d) or (sol.centers != centers)
    ok = mismatches == 0
    report(8, "solve_exact matches independent enumerator", ok, f"50 instances, {mismatches} mismatches")
    assert ok


def test_c9_operator_statistics(report):
    rng = np.random.default_rng(9)
    g = np.full(20, 0.5)
    deltas = np.array([(mutate(g, rng, 0.05) - g).sum() for _ in range(10_000)])
    sigma = float(deltas.std())
    a, b = np.full(20, 0.2), np.full(20, 0.6)
    fired = sum(recombine(a, b, rng, prob=0.3)[0] != 0.2 for _ in range(10_000)) / 10_000
    ok = abs(sigma - 0.05) <= 0.05 * 0.05 and abs(fired - 0.3) <= 0.03
    report(9, "operator statistics", ok, f"mutation sigma={sigma:.5f}, recombination rate={fired:.4f}")
    assert ok
