"""Action-selection policies and the episode runner.

The scripted policies stand in for trained agents: they read the full game
state (not just the observation) and follow shortest paths toward a target
picked from a per-game priority list.
"""

from __future__ import annotations

import json
import random
from collections import defaultdict
from typing import Any, Callable, Iterable, Sequence

from .core import Step, Trajectory
from .envs import GameConfig, GridGame, make_env
from .envs.bankheist import DROP
from .envs.grid import MOVES
from .seeding import AGENT, TRAIN, derive_rng


class Policy:
    kind = ""

    def select_action(self, observation: Any, valid: Sequence[str], rng: random.Random,
                      env: GridGame | None = None) -> str:
        raise NotImplementedError

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind}


def _check(valid: Sequence[str]) -> list[str]:
    if not valid:
        raise ValueError("select_action needs a non-empty valid-action set")
    return sorted(valid)


class RandomPolicy(Policy):
    """Uniform over the valid actions."""

    kind = "random"

    def select_action(self, observation, valid, rng, env=None):
        return rng.choice(_check(valid))


# -- scripted ---------------------------------------------------------------

def _around(grid, cells: Iterable) -> set:
    out = set()
    for p in cells:
        out.add(p)
        out.update(q for _, q in grid.neighbours[p])
    return out


def _path_or_fallback(env: GridGame, targets, danger: set, valid: list[str], rng,
                      hard: set | None = None) -> str | None:
    """Move toward the nearest target avoiding ``danger``; relax to ``hard`` if no safe path."""
    pos = env.state.player
    hard = hard or set()
    for blocked in (danger | hard, hard):
        step = env.grid.first_step(pos, set(targets), blocked.__contains__)
        if step and step[0] in valid:
            return step[0]
    return None


def _safe_move(env: GridGame, danger: set, valid: list[str], rng) -> str:
    pos = env.state.player
    safe = [a for a in valid if a in MOVES and (pos[0] + MOVES[a][0], pos[1] + MOVES[a][1]) not in danger]
    return rng.choice(safe or valid)


def _pacman_action(env, valid, rng, params) -> str:
    s = env.state
    grid = env.grid
    if s.window > 0 and s.ghosts:
        step = grid.first_step(s.player, set(s.ghosts))
        if step and step[0] in valid:
            return step[0]
    danger = set() if s.window > 1 else _around(grid, s.ghosts)
    if s.powerups and s.ghosts:
        a = _path_or_fallback(env, s.powerups, danger, valid, rng, set(s.ghosts))
        if a:
            return a
    if s.dots:
        a = _path_or_fallback(env, s.dots, danger, valid, rng, set(s.ghosts))
        if a:
            return a
    return _safe_move(env, danger, valid, rng)


def _dungeon_action(env, valid, rng, params) -> str:
    s = env.state
    grid = env.grid
    door_shut = set() if s.has_key else {s.door}
    if s.armed and s.monsters:
        step = grid.first_step(s.player, set(s.monsters), door_shut.__contains__,
                               max_dist=params.get("attack_radius", 2))
        if step and step[0] in valid:
            return step[0]
    danger = set() if s.armed else _around(grid, s.monsters)
    hard = door_shut | (set() if s.armed else set(s.monsters))
    if not s.armed and (s.guns or s.swords):
        a = _path_or_fallback(env, s.guns | s.swords, danger, valid, rng, hard)
        if a:
            return a
    target = {s.key} if s.key else {s.door}
    a = _path_or_fallback(env, target, danger, valid, rng, hard)
    return a or _safe_move(env, danger | door_shut, valid, rng)


def _bankheist_action(env, valid, rng, params) -> str:
    s = env.state
    grid = env.grid
    pos = s.player
    blast = set()
    for d in s.dynamite:
        blast |= env.blast(d[0])
    if s.police and not s.dynamite and DROP in valid:
        near = grid.bfs(pos)
        if any(near.get(p, 99) <= params.get("dynamite_distance", 2) for p in s.police):
            return DROP
    danger = _around(grid, s.police) | blast
    if pos in blast:
        safe = [p for p in grid.cells if p not in danger]
        a = _path_or_fallback(env, safe, set(s.police), valid, rng)
        if a:
            return a
    want_fuel = s.fuel < params.get("fuel_threshold", 30) and s.fuels
    for targets in ((s.fuels, s.banks) if want_fuel else (s.banks, s.fuels)):
        if targets:
            a = _path_or_fallback(env, targets, danger, valid, rng, set(s.police) | blast)
            if a:
                return a
    return _safe_move(env, danger, [a for a in valid if a != DROP] or valid, rng)


SCRIPTS: dict[str, Callable] = {"pacman": _pacman_action, "dungeon": _dungeon_action,
                                "bankheist": _bankheist_action}


class ScriptedPolicy(Policy):
    """Greedy goal-directed agent; needs the environment passed to ``select_action``."""

    kind = "scripted"

    def __init__(self, env: str, **params: Any):
        if env not in SCRIPTS:
            raise ValueError(f"no scripted agent for {env!r}")
        self.env = env
        self.params = params

    def select_action(self, observation, valid, rng, env=None):
        valid = _check(valid)
        if env is None:
            raise ValueError("scripted policies read the game state; pass env=")
        return SCRIPTS[self.env](env, valid, rng, self.params)

    def to_dict(self):
        return {"kind": self.kind, "env": self.env, "params": self.params}


# -- tabular ----------------------------------------------------------------

def _clip(v: int, lim: int = 2) -> int:
    return max(-lim, min(lim, v))


def _nearest_rel(pos, cells) -> tuple[int, int]:
    if not cells:
        return (0, 0)
    p = min(cells, key=lambda q: (abs(q[0] - pos[0]) + abs(q[1] - pos[1]), q))
    return (_clip(p[0] - pos[0]), _clip(p[1] - pos[1]))


def featurize(env: GridGame) -> tuple:
    """Small discrete state key for the tabular learner."""
    s = env.state
    if env.env_id == "pacman":
        return (s.player, s.window > 0, _nearest_rel(s.player, s.ghosts),
                _nearest_rel(s.player, s.powerups | s.dots))
    if env.env_id == "dungeon":
        return (s.player, s.armed, s.has_key, _nearest_rel(s.player, s.monsters))
    return (s.player, min(int(s.fuel) // 25, 3), bool(s.dynamite), _nearest_rel(s.player, s.police),
            _nearest_rel(s.player, s.banks))


class TabularPolicy(Policy):
    """Greedy policy over a Q-table keyed by :func:`featurize` (ties broken by ``rng``)."""

    kind = "tabular"

    def __init__(self, env: str, table: dict | None = None):
        self.env = env
        self.table: dict[tuple, dict[str, float]] = table if table is not None else {}
        self.history: list[float] = []

    def values(self, key) -> dict[str, float]:
        return self.table.get(key, {})

    def greedy(self, key, valid: Sequence[str], rng: random.Random) -> str:
        q = self.values(key)
        best = max(q.get(a, 0.0) for a in valid)
        return rng.choice([a for a in valid if q.get(a, 0.0) == best])

    def select_action(self, observation, valid, rng, env=None):
        valid = _check(valid)
        if env is None:
            raise ValueError("tabular policies featurize the game state; pass env=")
        return self.greedy(featurize(env), valid, rng)

    def to_dict(self):
        return {"kind": self.kind, "env": self.env,
                "table": [[json.loads(json.dumps(k)), v] for k, v in sorted(self.table.items(), key=repr)]}


def _tuplify(x):
    return tuple(_tuplify(v) for v in x) if isinstance(x, list) else x


def policy_from_dict(doc: dict[str, Any]) -> Policy:
    kind = doc["kind"]
    if kind == "random":
        return RandomPolicy()
    if kind == "scripted":
        return ScriptedPolicy(doc["env"], **doc.get("params", {}))
    if kind == "tabular":
        return TabularPolicy(doc["env"], {_tuplify(k): dict(v) for k, v in doc["table"]})
    raise ValueError(f"unknown policy kind {kind!r}")


def train_tabular(config: GameConfig | str, episodes: int, alpha: float = 0.2, gamma: float = 0.95,
                  epsilon: float = 0.2, epsilon_min: float = 0.02, seed: int = 0) -> TabularPolicy:
    """One-step Q-learning with epsilon-greedy exploration.

    The per-episode return is appended to ``policy.history``.
    """
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    env = make_env(config)
    policy = TabularPolicy(env.env_id)
    table = defaultdict(dict)
    rng = derive_rng(seed, TRAIN)
    decay = (epsilon_min / epsilon) ** (1 / episodes) if epsilon > 0 else 1.0
    eps = epsilon
    for ep in range(episodes):
        env.reset(rng.getrandbits(32))
        key = featurize(env)
        total = 0.0
        while not env.done:
            valid = env.valid_actions()
            if rng.random() < eps:
                a = rng.choice(valid)
            else:
                a = policy.greedy(key, valid, rng)
            _, r, _, done = env.step(a)
            total += r
            nkey = featurize(env)
            future = 0.0 if done else max((table[nkey].get(b, 0.0) for b in env.valid_actions()), default=0.0)
            q = table[key].get(a, 0.0)
            if alpha:
                table[key][a] = q + alpha * (r + gamma * future - q)
            key = nkey
        policy.history.append(total)
        eps = max(epsilon_min, eps * decay)
    policy.table = {k: v for k, v in table.items() if v}
    return policy


# -- rollouts ---------------------------------------------------------------

def rollout(env: GridGame, policy: Policy, episode_seed: int,
            stop: Callable[[list[Step]], bool] | None = None) -> Trajectory:
    """Play one episode. ``stop`` is checked after every step and may end it early."""
    obs = env.reset(episode_seed)
    rng = derive_rng(episode_seed, AGENT)
    steps: list[Step] = []
    while not env.done:
        valid = env.valid_actions()
        action = policy.select_action(obs, valid, rng, env)
        nobs, reward, event, _ = env.step(action)
        steps.append(Step(obs, action, event, reward, nobs))
        obs = nobs
        if stop is not None and stop(steps):
            break
    return Trajectory(tuple(steps), episode_seed, env.env_id)
