"""The twelve acceptance criteria, each at its stated tolerance.

Every criterion records one PASS/FAIL line that is printed in the terminal
summary (see conftest.py). Base seed 0 throughout.
"""

import json
import random
import statistics
import time
import timeit

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, traj
from oracles import WORKED_A, WORKED_B, WORKED_OUT, PAC, brute_local_score
from stratex.agents import ScriptedPolicy
from stratex.align import AlignParams, align_weighted, build_matrix, reward_weight, traceback
from stratex.cli import main
from stratex.core import Event, EventSpec, is_subtrajectory
from stratex.harness import ExperimentConfig, run_experiment, run_seed
from stratex.pipeline import filter_events, likelihoods, run_pipeline, same_distribution

pytestmark = pytest.mark.slow

BASE_SEED = 0
RUNS = 50
POWER_KILL = ("collect power-up", "kill a ghost")
POWER_KILL_KILL = ("collect power-up", "kill a ghost", "kill a ghost")
GUN_KILL = ("collect weapon (gun)", "kill a monster")
SWORD_KILL = ("collect weapon (sword)", "kill a monster")


def record(k, ok, detail):
    ACCEPTANCE_LINES.append((k, bool(ok), detail))
    assert ok, f"AC{k}: {detail}"


def timed_experiment(**kw):
    cfg = ExperimentConfig(base_seed=BASE_SEED, runs=RUNS, **kw)
    t0 = time.perf_counter()
    rep = run_experiment(cfg)
    return rep, time.perf_counter() - t0


@pytest.fixture(scope="module")
def pacman_kill():
    return timed_experiment(env="pacman", specs=["kill a ghost"], sample_sizes=[100])


@pytest.fixture(scope="module")
def pacman_kill2():
    return timed_experiment(env="pacman", specs=["kill a ghost x2"], sample_sizes=[100])


@pytest.fixture(scope="module")
def dungeon_kill():
    return timed_experiment(env="dungeon", specs=["kill a monster"], sample_sizes=[10, 100])


def test_ac01_worked_example_golden():
    A = [Event("pacman", x) for x in WORKED_A]
    B = [Event("pacman", x) for x in WORKED_B]
    ra, rb = [PAC[x] for x in WORKED_A], [PAC[x] for x in WORKED_B]

    def run():
        return traceback(build_matrix(A, B, AlignParams(1, -1), reward_weight(ra, rb)), A, B)

    out = [e.label for e in run()]
    per_call = statistics.median(timeit.repeat(run, number=1, repeat=50))
    record(1, out == WORKED_OUT and per_call < 1e-3,
           f"worked example traceback {out}; median runtime {per_call * 1e3:.3f} ms (< 1 ms)")


def test_ac02_likelihood_arithmetic():
    pos = [traj(["move", "collect dot", "collect power-up", "kill a ghost"]) for _ in range(10)]
    neg = [traj(["move"] + ["collect dot"] * (i < 9) + ["collect power-up"] * (i < 2)) for i in range(10)]
    table = {e.label: v for e, v in likelihoods(pos, neg).items()}
    expected = {"move": 0.0, "collect dot": 0.1, "collect power-up": 0.8, "kill a ghost": 1.0}
    simple = likelihoods([traj(["collect power-up"])] * 5, [traj(["collect power-up"])] + [traj(["move"])] * 4)
    p = simple[Event("pacman", "collect power-up")]
    exact = table == expected and all(table[k] == v for k, v in expected.items()) and p == 0.8
    survivors = {e.label for t in filter_events(pos, likelihoods(pos, neg)) for e in t.events}
    record(2, exact and "collect dot" in survivors and "move" not in survivors,
           f"1.0/0.2 -> {p!r}; synthetic table {table}")


def test_ac03_pacman_end_to_end(pacman_kill):
    rep, secs = pacman_kill
    found = rep.cells[0].found().get(POWER_KILL, 0.0)
    record(3, found >= 90 and secs <= 600,
           f"pacman 'kill a ghost' n=100 x{RUNS}: {{power-up, kill}} found {found:.0f}% (>= 90), {secs:.1f} s (<= 600)")


def test_ac04_pacman_compound(pacman_kill2):
    rep, _ = pacman_kill2
    found = rep.cells[0].found().get(POWER_KILL_KILL, 0.0)
    record(4, found >= 80, f"pacman 'kill a ghost x2': {{power-up, kill, kill}} found {found:.0f}% (>= 80)")


def test_ac05_dungeon(dungeon_kill):
    rep, _ = dungeon_kill
    cell = next(c for c in rep.cells if c.samples == 100)
    f = cell.found()
    gun, sword = f.get(GUN_KILL, 0.0), f.get(SWORD_KILL, 0.0)
    record(5, gun >= 85 and sword >= 85,
           f"dungeon 'kill a monster' n=100: {{gun, kill}} {gun:.0f}%, {{sword, kill}} {sword:.0f}% (both >= 85)")


def test_ac06_sample_size_trend(dungeon_kill):
    rep, _ = dungeon_kill
    avg = {c.samples: c.likelihood_stats()["collect key"] for c in rep.cells}
    small, large = avg[10][0], avg[100][0]
    record(6, small - large >= 0.2,
           f"l(collect key) n=10 {small:.2f} ({avg[10][3]} runs) vs n=100 {large:.2f} ({avg[100][3]} runs); "
           f"drop {small - large:.2f} (>= 0.2)")


def test_ac07_oracle_equivalence():
    rng = np.random.default_rng(BASE_SEED)
    labels = ["move", "collect dot", "collect power-up", "kill a ghost"]
    worst = 0.0
    for _ in range(200):
        A = list(rng.choice(labels, size=int(rng.integers(0, 7))))
        B = list(rng.choice(labels, size=int(rng.integers(0, 7))))
        W = rng.random((len(A), len(B)))
        w = lambda i, j: float(W[i, j])  # noqa: E731
        dp = build_matrix(A, B, AlignParams(1, -1), w).max_value
        worst = max(worst, abs(dp - brute_local_score(A, B, 1, -1, 0, w)))
    record(7, worst <= 1e-12, f"200 random pairs, max |DP - brute force| = {worst:.1e} (<= 1e-12)")


def test_ac08_normalization(pacman_kill):
    rep, _ = pacman_kill
    ran, bad = 0, []
    for r in rep.cells[0].results:
        lp, ln, lnn = r.lengths["positive"], r.lengths["negative"], r.lengths["normalized"]
        if same_distribution(lp, ln) or statistics.fmean(ln) < statistics.fmean(lp):
            continue
        ran += 1
        rel = abs(statistics.fmean(lnn) - statistics.fmean(lp)) / statistics.fmean(lp)
        if len(lnn) != len(lp) or rel > 0.15:
            bad.append((r.run, len(lnn), round(rel, 3)))
    record(8, ran > 0 and not bad,
           f"normalization ran in {ran}/{RUNS} seeded trials; violations {bad} (count equal, mean within 15%)")


def test_ac09_subtrajectory_property():
    rng = random.Random(BASE_SEED)
    labels = ["move", "collect dot", "collect power-up", "kill a ghost", "collect key"]
    failures = 0
    for _ in range(1000):
        A = [Event("x", rng.choice(labels)) for _ in range(rng.randint(0, 12))]
        B = [Event("x", rng.choice(labels)) for _ in range(rng.randint(0, 12))]
        table = {Event("x", k): rng.random() for k in labels}
        s = align_weighted(A, B, table)
        shorter = A if len(A) <= len(B) else B
        failures += not is_subtrajectory(s.events, shorter)
    record(9, failures == 0, f"1000 random pairs, {failures} strategies not a subtrajectory of the shorter input")


def test_ac10_determinism(tmp_path, capsys):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps({"env": "dungeon", "specs": ["kill a monster", "collect key"], "runs": 8,
                               "sample_sizes": [20], "base_seed": BASE_SEED}))
    blobs = {}
    for jobs in (1, 8):
        for k in range(2):
            out = tmp_path / f"j{jobs}_{k}"
            assert main(["experiment", "--config", str(cfg), "--out", str(out), "--format", "json",
                         "--jobs", str(jobs)]) == 0
            blobs[(jobs, k)] = (out / "report.json").read_bytes()
    capsys.readouterr()
    same = len(set(blobs.values())) == 1
    record(10, same, f"raw report.json identical across 2 invocations x jobs (1, 8): {same}")


def test_ac11_timing():
    spec = EventSpec.single(Event("dungeon", "kill a monster"))
    totals = dict.fromkeys(("collect", "normalize", "likelihood", "cluster", "extract"), 0.0)
    for run in range(3):
        rep = run_pipeline("dungeon", ScriptedPolicy("dungeon"), spec, 200, run_seed(BASE_SEED, run))
        for k, v in rep.timings.items():
            totals[k] += v
    whole = sum(totals.values())
    collect = totals["collect"] / whole
    rest = 1 - collect
    record(11, collect > 0.5 and rest <= 0.10,
           f"dungeon n=200 (3 runs): collection {collect:.1%} of wall time (> 50%), stages ii-v {rest:.2%} (<= 10%)")


def test_ac12_reporting_threshold(pacman_kill, dungeon_kill):
    below_total, leaked = 0, []
    for rep, _ in (pacman_kill, dungeon_kill):
        assert rep.config.report_threshold == 0.6
        raw = rep.raw()
        headline = {(r["spec"], r["samples"], tuple(r["strategy"])) for r in rep.headline()}
        for cell in raw["cells"]:
            for row in cell["found"]:
                key = (cell["spec"], cell["samples"], tuple(row["strategy"]))
                if row["found"] < 60:
                    below_total += 1
                    if key in headline:
                        leaked.append(key)
        raw_keys = {(c["spec"], c["samples"], tuple(r["strategy"])) for c in raw["cells"] for r in c["found"]}
        leaked += [k for k in headline if k not in raw_keys]
    record(12, below_total > 0 and not leaked,
           f"{below_total} raw strategies below 60% all excluded from headline; leaks {leaked}")
