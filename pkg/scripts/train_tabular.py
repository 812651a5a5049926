"""Train the tabular Q-learner, compare it with the random agent, and save the policy as JSON."""

import argparse
import json
import statistics

from stratex.agents import RandomPolicy, rollout, train_tabular
from stratex.envs import make_env
from stratex.seeding import EVAL, derive_seed


def evaluate(env_id, policy, episodes):
    env = make_env(env_id)
    return statistics.fmean(rollout(env, policy, derive_seed(0, EVAL, i)).total_reward for i in range(episodes))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--env", default="pacman")
    ap.add_argument("--episodes", type=int, default=1500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", help="write the policy here")
    args = ap.parse_args()

    pol = train_tabular(args.env, args.episodes, seed=args.seed)
    tail = pol.history[-100:]
    print(f"last 100 training episodes: mean return {statistics.fmean(tail):.1f}")
    print(f"greedy eval  {evaluate(args.env, pol, 100):.1f}")
    print(f"random eval  {evaluate(args.env, RandomPolicy(), 100):.1f}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(pol.to_dict(), fh)


if __name__ == "__main__":
    main()
