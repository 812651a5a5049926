"""Command-line entry point: ``stratex {discover,extract,experiment,replay,matrix}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .agents import RandomPolicy, ScriptedPolicy
from .align import AlignParams, build_matrix, format_matrix, likelihood_weight, reward_weight, traceback
from .core import EventSpec
from .envs import ENVS, ConfigError, GameConfig, InvalidAction, default_config, make_env, vocabulary
from .harness import ExperimentConfig, export_report, run_experiment
from .pipeline import DEFAULT_THRESHOLD, InsufficientTrajectories, discover, run_pipeline
from .serialize import NO_ACTION, load_lines, save_lines


def _game(args) -> GameConfig:
    return GameConfig.from_file(args.game) if args.game else default_config(args.env)


def cmd_discover(args) -> int:
    policy = RandomPolicy() if args.policy == "random" else ScriptedPolicy(args.env)
    r_avg, specs = discover(_game(args), policy, args.samples, args.seed, args.r_avg)
    print(f"r_avg = {r_avg:.2f}")
    for s in sorted(specs, key=str):
        print(s)
    return 0


def cmd_extract(args) -> int:
    game = _game(args)
    spec = EventSpec.parse(args.spec, game.env, vocabulary(game.env))
    policy = RandomPolicy() if args.policy == "random" else ScriptedPolicy(game.env)
    rep = run_pipeline(game, policy, spec, args.samples, args.seed, args.threshold)
    if args.save_trajectories:
        d = Path(args.save_trajectories)
        d.mkdir(parents=True, exist_ok=True)
        for kind, trajs in (("pos", rep.positives), ("neg", rep.negatives)):
            for i, t in enumerate(trajs):
                save_lines(t, d / f"{kind}_{i:03d}.traj")
    text = json.dumps(rep.to_dict(), indent=1)
    if args.out:
        Path(args.out).write_text(text + "\n")
    if args.format == "text":
        print(f"spec: {spec}  samples: {args.samples}  seed: {args.seed}")
        for e, row in rep.table.to_dict().items():
            print(f"  l({e}) = {row['likelihood']:.2f}")
        for s in rep.strategies:
            print(s)
    else:
        print(text)
    return 0


def cmd_experiment(args) -> int:
    if args.config:
        cfg = ExperimentConfig.from_file(args.config)
        doc = cfg.to_dict()
    elif args.env and args.spec:
        doc = {"env": args.env, "specs": []}
    else:
        raise SystemExit("experiment: give --config or both --env and --spec")
    if args.env:
        doc["env"] = args.env
    if args.spec:
        doc["specs"] = args.spec
    if args.samples:
        doc["sample_sizes"] = args.samples
    if args.runs is not None:
        doc["runs"] = args.runs
    if args.seed is not None:
        doc["base_seed"] = args.seed
    if args.threshold is not None:
        doc["report_threshold"] = args.threshold
    if args.group:
        doc["canonical_grouping"] = True
    cfg = ExperimentConfig(**doc)
    report = run_experiment(cfg, jobs=args.jobs)
    out = args.out or "results"
    for p in export_report(report, args.format, out):
        print(p)
    for row in report.headline():
        star = "*" if row["grouped"] else ""
        print(f"{row['spec']}\tn={row['samples']}\t{{{', '.join(row['strategy'])}}}\t{row['found']:.0f}{star}")
    return 0


def cmd_replay(args) -> int:
    t = load_lines(args.trajectory, args.env or "")
    if not t.env:
        raise SystemExit("replay: trajectory file has no env header; pass --env")
    if any(a == NO_ACTION for a in t.actions):
        raise SystemExit("replay: trajectory has no recorded actions to replay")
    env = make_env(_game(argparse.Namespace(game=args.game, env=t.env)))
    env.reset(t.episode_seed)
    print(f"t=0\n{env.render_text()}\n")
    for k, step in enumerate(t.steps, 1):
        _, reward, event, done = env.step(step.action)
        note = "" if event.label == step.event.label else f"  (recorded: {step.event.label})"
        print(f"t={k} action={step.action} event={event.label} reward={reward:g}{note}")
        print(env.render_text() + "\n")
        if done:
            break
    return 0


def cmd_matrix(args) -> int:
    a, b = load_lines(args.a), load_lines(args.b)
    A, B = a.events, b.events
    if args.weight == "reward":
        w = reward_weight([s.reward for s in a.steps], [s.reward for s in b.steps])
    elif args.weight == "likelihood":
        table = json.loads(Path(args.likelihoods).read_text())
        lk = {e: float(table.get(e.label, 1.0)) for e in set(A) | set(B)}
        w = likelihood_weight(A, B, lk)
    else:
        w = None
    mat = build_matrix(A, B, AlignParams(args.match, args.mismatch), w)
    print(format_matrix(mat, [e.label for e in A], [e.label for e in B]))
    print()
    print("{" + ", ".join(e.label for e in traceback(mat, A, B)) + "}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stratex", description="Strategy extraction from game trajectories")
    sub = p.add_subparsers(dest="command", required=True)

    def env_opts(sp, required=True):
        sp.add_argument("--env", choices=sorted(ENVS), required=required)
        sp.add_argument("--game", metavar="FILE", help="JSON game config overriding the defaults")

    d = sub.add_parser("discover", help="find events of interest from rewards")
    env_opts(d)
    d.add_argument("--samples", type=int, default=100, help="episodes N (even)")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--policy", choices=["scripted", "random"], default="scripted")
    d.add_argument("--r-avg", choices=["step", "episode"], default="step",
                   help="average reward per step or per episode")
    d.set_defaults(func=cmd_discover)

    e = sub.add_parser("extract", help="one pipeline run; prints the strategy report")
    env_opts(e)
    e.add_argument("--spec", required=True, help='event of interest, e.g. "kill a ghost x2"')
    e.add_argument("--samples", type=int, default=100)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD, help="likelihood filter threshold")
    e.add_argument("--policy", choices=["scripted", "random"], default="scripted")
    e.add_argument("--format", choices=["json", "text"], default="json")
    e.add_argument("--out", help="also write the JSON report here")
    e.add_argument("--save-trajectories", metavar="DIR", help="write positives/negatives as .traj files")
    e.set_defaults(func=cmd_extract)

    x = sub.add_parser("experiment", help="repeated runs with Found-% tables")
    x.add_argument("--config", help="JSON experiment config")
    x.add_argument("--env", choices=sorted(ENVS))
    x.add_argument("--spec", action="append", help="repeatable")
    x.add_argument("--samples", type=int, action="append", help="repeatable sample size")
    x.add_argument("--runs", type=int)
    x.add_argument("--seed", type=int, help="base seed")
    x.add_argument("--threshold", type=float, help="Found-% reporting threshold as a fraction")
    x.add_argument("--group", action="store_true", help="merge order variants of non-final events")
    x.add_argument("--out", help="output directory (default ./results)")
    x.add_argument("--format", choices=["json", "csv", "both"], default="both")
    x.add_argument("--jobs", type=int, default=1)
    x.set_defaults(func=cmd_experiment)

    r = sub.add_parser("replay", help="re-simulate a saved trajectory as text frames")
    r.add_argument("trajectory")
    r.add_argument("--env", choices=sorted(ENVS))
    r.add_argument("--game", metavar="FILE")
    r.set_defaults(func=cmd_replay)

    m = sub.add_parser("matrix", help="dump the scoring matrix for two saved trajectories")
    m.add_argument("a")
    m.add_argument("b")
    m.add_argument("--weight", choices=["reward", "likelihood", "unit"], default="reward")
    m.add_argument("--likelihoods", help="JSON {event: likelihood} for --weight likelihood")
    m.add_argument("--match", type=float, default=1.0)
    m.add_argument("--mismatch", type=float, default=-1.0)
    m.set_defaults(func=cmd_matrix)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InvalidAction, InsufficientTrajectories, ValueError, OSError) as exc:
        print(f"stratex {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
