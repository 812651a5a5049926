"""Length histograms of positives, raw negatives and normalised negatives (CSV on stdout)."""

import argparse
import csv
import sys

import numpy as np

from stratex.agents import ScriptedPolicy
from stratex.core import EventSpec
from stratex.envs import vocabulary
from stratex.pipeline import run_pipeline


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--env", default="pacman")
    ap.add_argument("--spec", default="kill a ghost")
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--bin-width", type=int, default=5)
    args = ap.parse_args()

    spec = EventSpec.parse(args.spec, args.env, vocabulary(args.env))
    rep = run_pipeline(args.env, ScriptedPolicy(args.env), spec, args.samples, args.seed)
    top = max(max(v) for v in rep.lengths.values())
    edges = np.arange(0, top + 2 * args.bin_width, args.bin_width)
    hist = {k: np.histogram(v, bins=edges)[0] for k, v in rep.lengths.items()}
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["bin_start", "bin_end", "positive", "negative", "normalized"])
    for i in range(len(edges) - 1):
        w.writerow([edges[i], edges[i + 1], hist["positive"][i], hist["negative"][i], hist["normalized"][i]])
    for k, v in rep.lengths.items():
        print(f"# {k}: mean {np.mean(v):.1f} sd {np.std(v):.1f}", file=sys.stderr)


if __name__ == "__main__":
    main()
