"""Per-stage wall-clock breakdown of single pipeline runs."""

import argparse

from stratex.agents import ScriptedPolicy
from stratex.core import EventSpec
from stratex.envs import vocabulary
from stratex.harness import run_seed
from stratex.pipeline import STAGES, run_pipeline


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--env", default="dungeon")
    ap.add_argument("--spec", default="kill a monster")
    ap.add_argument("--samples", type=int, nargs="+", default=[50, 100, 200])
    ap.add_argument("--runs", type=int, default=3)
    args = ap.parse_args()

    spec = EventSpec.parse(args.spec, args.env, vocabulary(args.env))
    print("n".ljust(6) + "".join(s.ljust(12) for s in STAGES) + "ii-v share")
    for n in args.samples:
        tot = dict.fromkeys(STAGES, 0.0)
        for run in range(args.runs):
            rep = run_pipeline(args.env, ScriptedPolicy(args.env), spec, n, run_seed(0, run))
            for k, v in rep.timings.items():
                tot[k] += v / args.runs
        whole = sum(tot.values())
        print(str(n).ljust(6) + "".join(f"{tot[s]:.1f}ms".ljust(12) for s in STAGES)
              + f"{1 - tot['collect'] / whole:.2%}")


if __name__ == "__main__":
    main()
