"""Repeated-run experiments: Found-% tables, likelihood statistics, length histograms, timings."""

from __future__ import annotations

import csv
import json
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .agents import policy_from_dict
from .core import EventSpec
from .envs import GameConfig, default_config, vocabulary
from .pipeline import CAP_FACTOR, DEFAULT_THRESHOLD, STAGES, InsufficientTrajectories, run_pipeline
from .seeding import derive_seed

REPORT_SCHEMA = "stratex.report/1"
Labels = tuple[str, ...]


@dataclass
class ExperimentConfig:
    env: str
    specs: list[str]
    runs: int = 50
    sample_sizes: list[int] = field(default_factory=lambda: [100])
    base_seed: int = 0
    report_threshold: float = 0.6
    canonical_grouping: bool = False
    likelihood_threshold: float = DEFAULT_THRESHOLD
    episode_cap_factor: int = CAP_FACTOR
    bin_width: int = 5
    policy: dict[str, Any] = field(default_factory=lambda: {"kind": "scripted"})
    game: dict[str, Any] = field(default_factory=dict)   # GameConfig overrides

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not self.sample_sizes or min(self.sample_sizes) < 1:
            raise ValueError("sample sizes must be >= 1")
        if not 0 <= self.report_threshold <= 1:
            raise ValueError("report threshold must lie in [0, 1]")
        if not self.specs:
            raise ValueError("at least one event-of-interest spec is required")
        vocab = vocabulary(self.env)
        for s in self.specs:
            EventSpec.parse(s, self.env, vocab)

    @classmethod
    def from_file(cls, path: str | Path) -> ExperimentConfig:
        doc = json.loads(Path(path).read_text())
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
        return cls(**doc)

    def game_config(self) -> GameConfig:
        return default_config(self.env).with_overrides(**self.game) if self.game else default_config(self.env)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass
class RunResult:
    spec: str
    samples: int
    run: int
    seed: int
    failure: str | None
    strategies: list[Labels]
    likelihoods: dict[str, float]
    timings: dict[str, float]
    lengths: dict[str, list[int]]


def run_seed(base_seed: int, run: int) -> int:
    return derive_seed(base_seed, run)


def _run_one(task: tuple[ExperimentConfig, str, int, int]) -> RunResult:
    cfg, spec_text, n, run = task
    game = cfg.game_config()
    spec = EventSpec.parse(spec_text, cfg.env, vocabulary(cfg.env))
    policy_doc = dict(cfg.policy)
    if policy_doc.get("kind") in ("scripted", "tabular"):
        policy_doc.setdefault("env", cfg.env)
    policy = policy_from_dict(policy_doc)
    seed = run_seed(cfg.base_seed, run)
    try:
        rep = run_pipeline(game, policy, spec, n, seed, cfg.likelihood_threshold,
                           cfg.episode_cap_factor * n)
    except InsufficientTrajectories as exc:
        return RunResult(spec_text, n, run, seed, str(exc), [], {}, {}, {})
    return RunResult(spec_text, n, run, seed, None, [s.labels for s in rep.strategies],
                     {e.label: v for e, v in rep.table.items()}, rep.timings, rep.lengths)


@dataclass
class Group:
    final: str
    members: list[Labels]
    found: float

    @property
    def flagged(self) -> bool:
        return len(self.members) > 1

    @property
    def representative(self) -> Labels:
        return self.members[0]


def canonical_group(per_run: Sequence[Iterable[Labels] | None], runs: int | None = None) -> list[Group]:
    """Merge strategies equal up to the order of all but their final event.

    ``per_run`` holds each run's strategy set (None for a failed run). A
    group's Found-% counts runs containing any member; members are listed by
    their own Found-% (descending), then lexicographically.
    """
    runs = runs or len(per_run)
    single = Counter(s for strategies in per_run if strategies for s in set(strategies))
    keyed: dict[tuple, list[Labels]] = {}
    for s in single:
        keyed.setdefault((tuple(sorted(s[:-1])), s[-1]), []).append(s)
    groups = []
    for key, members in keyed.items():
        members.sort(key=lambda s: (-single[s], s))
        hits = sum(1 for strategies in per_run if strategies and any(m in set(strategies) for m in members))
        groups.append(Group(key[1], members, 100.0 * hits / runs if runs else 0.0))
    groups.sort(key=lambda g: (-g.found, g.representative))
    return groups


def likelihood_cell(avg: float, lo: float, hi: float) -> str:
    return f"{avg:.2f}({lo:.2f},{hi:.2f})"


@dataclass
class CellReport:
    """Aggregate over all runs for one (spec, sample size)."""

    spec: str
    samples: int
    results: list[RunResult]

    @property
    def runs(self) -> int:
        return len(self.results)

    @property
    def failed(self) -> int:
        return sum(r.failure is not None for r in self.results)

    @property
    def per_run(self) -> list[list[Labels] | None]:
        return [None if r.failure else r.strategies for r in self.results]

    def found(self) -> dict[Labels, float]:
        c = Counter(s for r in self.results for s in set(r.strategies))
        return {s: 100.0 * k / self.runs for s, k in sorted(c.items(), key=lambda kv: (-kv[1], kv[0]))}

    def likelihood_stats(self) -> dict[str, tuple[float, float, float, int]]:
        vals: dict[str, list[float]] = {}
        for r in self.results:
            for e, v in r.likelihoods.items():
                vals.setdefault(e, []).append(v)
        return {e: (float(np.mean(v)), min(v), max(v), len(v)) for e, v in sorted(vals.items())}

    def mean_timings(self) -> dict[str, float]:
        ok = [r for r in self.results if r.timings]
        return {s: float(np.mean([r.timings[s] for r in ok])) if ok else 0.0 for s in STAGES}

    def histograms(self, bin_width: int) -> dict[str, Any]:
        pooled = {k: [x for r in self.results for x in r.lengths.get(k, [])]
                  for k in ("positive", "negative", "normalized")}
        top = max((max(v) for v in pooled.values() if v), default=0)
        edges = np.arange(0, top + bin_width + 1, bin_width)
        return {"edges": edges.tolist(),
                **{k: np.histogram(v, bins=edges)[0].tolist() for k, v in pooled.items()}}

    def headline(self, threshold: float, grouped: bool) -> list[dict[str, Any]]:
        cut = 100.0 * threshold
        if grouped:
            rows = [{"strategy": list(g.representative), "found": g.found, "grouped": g.flagged,
                     "members": [list(m) for m in g.members]}
                    for g in canonical_group(self.per_run, self.runs)]
        else:
            rows = [{"strategy": list(s), "found": f, "grouped": False, "members": [list(s)]}
                    for s, f in self.found().items()]
        return [r for r in rows if r["found"] >= cut - 1e-9]


@dataclass
class AggregateReport:
    config: ExperimentConfig
    cells: list[CellReport]

    def headline(self, threshold: float | None = None) -> list[dict[str, Any]]:
        th = self.config.report_threshold if threshold is None else threshold
        return [{"spec": c.spec, "samples": c.samples, **row}
                for c in self.cells for row in c.headline(th, self.config.canonical_grouping)]

    def raw(self) -> dict[str, Any]:
        """Everything except wall-clock timings, so identical configs give identical bytes."""
        cells = []
        for c in self.cells:
            cells.append({
                "spec": c.spec, "samples": c.samples, "runs": c.runs, "failed": c.failed,
                "found": [{"strategy": list(s), "found": f} for s, f in c.found().items()],
                "likelihoods": {e: {"average": a, "min": lo, "max": hi, "runs": k}
                                for e, (a, lo, hi, k) in c.likelihood_stats().items()},
                "lengths": c.histograms(self.config.bin_width),
                "per_run": [{"run": r.run, "seed": r.seed, "failure": r.failure,
                             "strategies": [list(s) for s in r.strategies]} for r in c.results],
            })
        return {"schema": REPORT_SCHEMA, "config": self.config.to_dict(), "cells": cells,
                "headline": self.headline()}


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> AggregateReport:
    tasks = [(config, spec, n, run) for spec in config.specs for n in config.sample_sizes
             for run in range(config.runs)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [_run_one(t) for t in tasks]
    cells = []
    k = 0
    for spec in config.specs:
        for n in config.sample_sizes:
            cells.append(CellReport(spec, n, results[k:k + config.runs]))
            k += config.runs
    return AggregateReport(config, cells)


# -- export -------------------------------------------------------------------

def _write_csv(path: Path, header: list[str], rows: Iterable[Sequence[Any]]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def export_report(report: AggregateReport, fmt: str, path: str | Path) -> list[Path]:
    """Write the report under directory ``path``. ``fmt`` is ``json``, ``csv`` or ``both``.

    Timings go to their own file; every other file is deterministic.
    """
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        written = []
        if fmt in ("json", "both"):
            p = out / "report.json"
            p.write_text(json.dumps(report.raw(), indent=1, sort_keys=False) + "\n")
            t = out / "timings.json"
            t.write_text(json.dumps([{"spec": c.spec, "samples": c.samples, "timings_ms": c.mean_timings()}
                                     for c in report.cells], indent=1) + "\n")
            written += [p, t]
        if fmt in ("csv", "both"):
            env = report.config.env
            files = {
                "headline.csv": (["env", "spec", "samples", "strategy", "found_pct", "grouped"],
                                 [[env, r["spec"], r["samples"], "{" + ", ".join(r["strategy"]) + "}",
                                   _fmt(r["found"]), "*" if r["grouped"] else ""] for r in report.headline()]),
                "strategies_raw.csv": (["env", "spec", "samples", "strategy", "found_pct"],
                                       [[env, c.spec, c.samples, "{" + ", ".join(s) + "}", _fmt(f)]
                                        for c in report.cells for s, f in c.found().items()]),
                "likelihoods.csv": (["env", "spec", "samples", "event", "average", "min", "max", "runs", "cell"],
                                    [[env, c.spec, c.samples, e, _fmt(a), _fmt(lo), _fmt(hi), k,
                                      likelihood_cell(a, lo, hi)]
                                     for c in report.cells for e, (a, lo, hi, k) in c.likelihood_stats().items()]),
                "lengths.csv": (["env", "spec", "samples", "bin_start", "bin_end", "positive", "negative",
                                 "normalized"],
                                [[env, c.spec, c.samples, h["edges"][i], h["edges"][i + 1], h["positive"][i],
                                  h["negative"][i], h["normalized"][i]]
                                 for c in report.cells for h in [c.histograms(report.config.bin_width)]
                                 for i in range(len(h["edges"]) - 1)]),
                "timings.csv": (["env", "spec", "samples", "stage", "mean_ms", "share"],
                                [[env, c.spec, c.samples, s, f"{ms:.3f}",
                                  f"{ms / total:.4f}" if total else "0"]
                                 for c in report.cells for tm in [c.mean_timings()]
                                 for total in [sum(tm.values())] for s, ms in tm.items()]),
            }
            for name, (header, rows) in files.items():
                p = out / name
                _write_csv(p, header, rows)
                written.append(p)
        if not written:
            raise ValueError(f"unknown export format {fmt!r}")
        return written
    except OSError as exc:
        raise OSError(f"writing report to {out}: {exc}") from exc
