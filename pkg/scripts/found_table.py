"""Found-% tables for the three games (50 runs, n = 100 by default).

    python3 scripts/found_table.py --runs 50 --out results/found
"""

import argparse
from pathlib import Path

from stratex.harness import ExperimentConfig, export_report, run_experiment

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=50)
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--envs", nargs="+", default=["pacman", "dungeon", "bankheist"])
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="results/found")
    args = ap.parse_args()

    for env in args.envs:
        cfg = ExperimentConfig.from_file(CONFIGS / f"{env}_found.json")
        cfg.runs, cfg.sample_sizes = args.runs, [args.samples]
        report = run_experiment(cfg, jobs=args.jobs)
        export_report(report, "both", Path(args.out) / env)
        print(f"== {env}")
        for row in report.headline():
            mark = "*" if row["grouped"] else ""
            print(f"  {row['spec']:<22} {{{', '.join(row['strategy'])}}}  {row['found']:.0f}%{mark}")
        for cell in report.cells:
            if cell.failed:
                print(f"  ({cell.spec}: {cell.failed}/{cell.runs} runs could not collect enough positives)")


if __name__ == "__main__":
    main()
