"""The extraction pipeline: collect, normalise, score, filter, cluster, align."""

from __future__ import annotations

import random
import statistics
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from .agents import Policy, RandomPolicy, rollout
from .align import AlignParams, align_weighted
from .core import Event, EventSpec, Step, Strategy, Trajectory, satisfies
from .envs import GameConfig, make_env
from .seeding import DISCOVERY, NEGATIVE, NORMALISE, POSITIVE, derive_rng, derive_seed

DEFAULT_THRESHOLD = 0.1
CAP_FACTOR = 100
STAGES = ("collect", "normalize", "likelihood", "cluster", "extract")


class InsufficientTrajectories(RuntimeError):
    def __init__(self, kind: str, achieved: int, requested: int, episodes: int):
        super().__init__(f"collected {achieved}/{requested} {kind} trajectories in {episodes} episodes")
        self.kind = kind
        self.achieved = achieved
        self.requested = requested
        self.episodes = episodes


class InsufficientPositives(InsufficientTrajectories):
    def __init__(self, achieved: int, requested: int, episodes: int):
        super().__init__("positive", achieved, requested, episodes)


class InsufficientNegatives(InsufficientTrajectories):
    def __init__(self, achieved: int, requested: int, episodes: int):
        super().__init__("negative", achieved, requested, episodes)


class EmptyDatasetError(RuntimeError):
    pass


# -- stage (0): events of interest --------------------------------------------

def discover_from_episodes(episodes: Sequence[Sequence[tuple[Event, float]]],
                           mode: str = "step") -> tuple[float, set[EventSpec]]:
    """Split episodes in half: the first half sets ``r_avg``, and any event in
    the second half with a single-step reward strictly above it becomes a spec.

    ``mode="step"`` averages reward per step over the first half;
    ``mode="episode"`` averages whole-episode returns.
    """
    half = len(episodes) // 2
    first, second = episodes[:half], episodes[half:]
    if mode == "episode":
        r_avg = statistics.fmean(sum(r for _, r in ep) for ep in first) if first else 0.0
    elif mode == "step":
        rewards = [r for ep in first for _, r in ep]
        r_avg = statistics.fmean(rewards) if rewards else 0.0
    else:
        raise ValueError(f"unknown r_avg mode {mode!r}")
    found = {e for ep in second for e, r in ep if r > r_avg}
    return r_avg, {EventSpec.single(e) for e in found}


def discover_events(config: GameConfig | str, policy: Policy, N: int = 100, seed: int = 0,
                    mode: str = "step") -> set[EventSpec]:
    return discover(config, policy, N, seed, mode)[1]


def discover(config: GameConfig | str, policy: Policy, N: int = 100, seed: int = 0,
             mode: str = "step") -> tuple[float, set[EventSpec]]:
    if N < 2 or N % 2:
        raise ValueError(f"N must be even and >= 2, got {N}")
    env = make_env(config)
    episodes = []
    for i in range(N):
        t = rollout(env, policy, derive_seed(seed, DISCOVERY, i))
        episodes.append([(s.event, s.reward) for s in t.steps])
    return discover_from_episodes(episodes, mode)


# -- stage (i): collection ------------------------------------------------------

class _Tracker:
    """Incremental check of a spec over a growing step list."""

    def __init__(self, spec: EventSpec):
        self.left = {e: c for e, c in spec.requirements}
        self.remaining = len(self.left)

    def __call__(self, steps: list[Step]) -> bool:
        ev = steps[-1].event
        n = self.left.get(ev)
        if n:
            self.left[ev] = n - 1
            if n == 1:
                self.remaining -= 1
        return self.remaining == 0


def collect_positive(config: GameConfig | str, policy: Policy, spec: EventSpec, n: int,
                     episode_cap: int | None = None, seed: int = 0) -> list[Trajectory]:
    """Episodes that reach ``spec``, cut at the step that completes it."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cap = episode_cap or CAP_FACTOR * n
    env = make_env(config)
    out = []
    for i in range(cap):
        t = rollout(env, policy, derive_seed(seed, POSITIVE, i), _Tracker(spec))
        idx = satisfies(t, spec)
        if idx is not None:
            out.append(t.truncated(idx))
            if len(out) == n:
                return out
    raise InsufficientPositives(len(out), n, cap)


def collect_negative(config: GameConfig | str, spec: EventSpec, n: int, episode_cap: int | None = None,
                     seed: int = 0, policy: Policy | None = None) -> list[Trajectory]:
    """Whole random-agent episodes that never reach ``spec``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cap = episode_cap or CAP_FACTOR * n
    policy = policy or RandomPolicy()
    env = make_env(config)
    out = []
    for i in range(cap):
        t = rollout(env, policy, derive_seed(seed, NEGATIVE, i))
        if satisfies(t, spec) is None:
            out.append(t)
            if len(out) == n:
                return out
    raise InsufficientNegatives(len(out), n, cap)


# -- stage (ii): normalisation -------------------------------------------------

def same_distribution(a: Sequence[int], b: Sequence[int], tol: float = 1e-9) -> bool:
    return (abs(statistics.fmean(a) - statistics.fmean(b)) <= tol
            and abs(statistics.pstdev(a) - statistics.pstdev(b)) <= tol)


def needs_normalizing(pos: Sequence[Trajectory], neg: Sequence[Trajectory]) -> bool:
    lp, ln = [len(t) for t in pos], [len(t) for t in neg]
    return not (same_distribution(lp, ln) or statistics.fmean(ln) < statistics.fmean(lp))


def normalize(pos: Sequence[Trajectory], neg: Sequence[Trajectory], rng: random.Random,
              max_retries: int = 100) -> list[Trajectory]:
    """Resample negatives so their lengths follow the positives' length distribution.

    Each new negative is the prefix, of a length drawn from the positives, of
    a random negative at least that long. Returned unchanged when the
    distributions already agree or negatives are shorter on average.
    """
    if not pos or not neg:
        raise ValueError("normalize needs non-empty positive and negative sets")
    if not needs_normalizing(pos, neg):
        return list(neg)
    lengths = [len(t) for t in pos]
    longest = max(neg, key=len)
    out = []
    while len(out) < len(pos):
        for _ in range(max_retries):
            target = rng.choice(lengths)
            pool = [t for t in neg if len(t) >= target]
            if pool:
                out.append(rng.choice(pool).truncated(target - 1))
                break
        else:
            out.append(longest.truncated(target - 1))
    return out


# -- stage (iii): likelihoods and filtering ---------------------------------------

def presence(trajs: Iterable[Trajectory]) -> tuple[Counter, int]:
    c: Counter = Counter()
    total = 0
    for t in trajs:
        c.update({s.event for s in t.steps})
        total += 1
    return c, total


@dataclass
class LikelihoodTable(Mapping[Event, float]):
    """Per-event likelihood with the presence fractions it came from.

    Lookups of unseen events return 1.
    """

    scores: dict[Event, float]
    f_pos: dict[Event, float] = field(default_factory=dict)
    f_neg: dict[Event, float] = field(default_factory=dict)

    def __getitem__(self, e: Event) -> float:
        return self.scores.get(e, 1.0)

    def get(self, e: Event, default: float = 1.0) -> float:
        return self.scores.get(e, default)

    def __iter__(self):
        return iter(self.scores)

    def __len__(self) -> int:
        return len(self.scores)

    def __contains__(self, e: object) -> bool:
        return e in self.scores

    def to_dict(self) -> dict[str, dict[str, float]]:
        return {e.label: {"likelihood": v, "f_pos": self.f_pos.get(e, 0.0), "f_neg": self.f_neg.get(e, 0.0)}
                for e, v in sorted(self.scores.items())}


def event_likelihood(f_pos: Fraction | float, f_neg: Fraction | float) -> float:
    """``max(0, f_pos - f_neg)``; 1 if the event never occurs in negatives, 0 if never in positives.

    Pass exact fractions to get a correctly rounded difference.
    """
    if f_neg == 0:
        return 1.0
    if f_pos == 0:
        return 0.0
    return float(max(0, f_pos - f_neg))


def likelihoods(pos: Sequence[Trajectory], neg: Sequence[Trajectory]) -> LikelihoodTable:
    if not pos:
        raise ValueError("likelihoods need at least one positive trajectory")
    cp, np_ = presence(pos)
    cn, nn = presence(neg)
    events = set(cp) | set(cn)
    values = {e: event_likelihood(Fraction(cp[e], np_), Fraction(cn[e], nn) if nn else 0) for e in events}
    f_pos = {e: cp[e] / np_ for e in cp}
    f_neg = {e: cn[e] / nn for e in cn}
    return LikelihoodTable(values, f_pos, f_neg)


def filter_events(pos: Sequence[Trajectory], table: Mapping[Event, float],
                  threshold: float = DEFAULT_THRESHOLD) -> list[Trajectory]:
    """Drop steps whose event likelihood is below ``threshold``; drop emptied trajectories."""
    if not 0 <= threshold <= 1:
        raise ValueError("threshold must lie in [0, 1]")
    out = []
    for t in pos:
        kept = tuple(s for s in t.steps if table.get(s.event, 1.0) >= threshold)
        if kept:
            out.append(Trajectory(kept, t.episode_seed, t.env))
    if pos and not out:
        raise EmptyDatasetError(f"every event fell below the likelihood threshold {threshold}")
    return out


# -- stage (iv): clustering ---------------------------------------------------

@dataclass(frozen=True)
class Cluster:
    anchor: Event
    members: tuple[int, ...]   # indices into the filtered positives


def cluster(filtered: Sequence[Trajectory]) -> list[Cluster]:
    """One cluster per event; a trajectory joins every cluster whose event it contains."""
    members: dict[Event, list[int]] = {}
    for i, t in enumerate(filtered):
        for e in dict.fromkeys(s.event for s in t.steps):
            members.setdefault(e, []).append(i)
    return [Cluster(e, tuple(idx)) for e, idx in sorted(members.items())]


# -- stage (v): extraction ------------------------------------------------------

def shortest(idx: Sequence[int], seqs: Sequence[Sequence[Event]]) -> int:
    return min(idx, key=lambda i: (len(seqs[i]), [e.label for e in seqs[i]], i))


def extract(clusters: Sequence[Cluster], filtered: Sequence[Trajectory], table: Mapping[Event, float],
            params: AlignParams | None = None) -> list[Strategy]:
    """For each cluster, align its shortest member against every other member.

    Returns the distinct non-empty strategies in discovery order.
    """
    seqs = [t.events for t in filtered]
    found: dict[Strategy, None] = {}
    for c in clusters:
        base = shortest(c.members, seqs)
        for j in c.members:
            if j == base:
                continue
            s = align_weighted(seqs[base], seqs[j], table, params)
            if s:
                found.setdefault(s, None)
    return list(found)


# -- whole run ---------------------------------------------------------------

@dataclass
class StrategyReport:
    env: str
    spec: EventSpec
    n: int
    seed: int
    table: LikelihoodTable
    strategies: list[Strategy]
    timings: dict[str, float]          # milliseconds per stage
    lengths: dict[str, list[int]]      # positives / negatives / normalized
    normalized: bool = False
    filtered: list[Trajectory] = field(default_factory=list, repr=False)
    positives: list[Trajectory] = field(default_factory=list, repr=False)
    negatives: list[Trajectory] = field(default_factory=list, repr=False)

    def to_dict(self, timings: bool = True) -> dict[str, Any]:
        doc = {
            "env": self.env,
            "spec": str(self.spec),
            "samples": self.n,
            "seed": self.seed,
            "normalized": self.normalized,
            "likelihoods": self.table.to_dict(),
            "strategies": [list(s.labels) for s in self.strategies],
            "lengths": self.lengths,
        }
        if timings:
            doc["timings_ms"] = self.timings
        return doc


def run_pipeline(config: GameConfig | str, policy: Policy, spec: EventSpec, n: int, seed: int = 0,
                 threshold: float = DEFAULT_THRESHOLD, episode_cap: int | None = None,
                 params: AlignParams | None = None) -> StrategyReport:
    config = make_env(config).config
    timings = {}
    t0 = time.perf_counter()
    pos = collect_positive(config, policy, spec, n, episode_cap, seed)
    neg = collect_negative(config, spec, n, episode_cap, seed)
    t1 = time.perf_counter()
    neg_norm = normalize(pos, neg, derive_rng(seed, NORMALISE))
    t2 = time.perf_counter()
    table = likelihoods(pos, neg_norm)
    filtered = filter_events(pos, table, threshold)
    t3 = time.perf_counter()
    clusters = cluster(filtered)
    t4 = time.perf_counter()
    strategies = extract(clusters, filtered, table, params)
    t5 = time.perf_counter()
    marks = (t0, t1, t2, t3, t4, t5)
    for k, name in enumerate(STAGES):
        timings[name] = 1000 * (marks[k + 1] - marks[k])
    lengths = {"positive": [len(t) for t in pos], "negative": [len(t) for t in neg],
               "normalized": [len(t) for t in neg_norm]}
    return StrategyReport(config.env, spec, n, seed, table, strategies, timings, lengths,
                          needs_normalizing(pos, neg), filtered, pos, neg)
