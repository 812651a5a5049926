"""Likelihood statistics versus sample size n, printed as average(min,max) cells."""

import argparse

from stratex.harness import ExperimentConfig, likelihood_cell, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--env", default="dungeon")
    ap.add_argument("--spec", default="kill a monster")
    ap.add_argument("--samples", type=int, nargs="+", default=[10, 25, 50, 100])
    ap.add_argument("--runs", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    cfg = ExperimentConfig(args.env, [args.spec], args.runs, args.samples, args.seed)
    report = run_experiment(cfg, jobs=args.jobs)
    stats = {c.samples: c.likelihood_stats() for c in report.cells}
    events = sorted({e for s in stats.values() for e in s})
    print("event".ljust(26) + "".join(f"n={n}".ljust(18) for n in args.samples))
    for e in events:
        cells = [likelihood_cell(*stats[n][e][:3]) if e in stats[n] else "-" for n in args.samples]
        print(e.ljust(26) + "".join(c.ljust(18) for c in cells))


if __name__ == "__main__":
    main()
