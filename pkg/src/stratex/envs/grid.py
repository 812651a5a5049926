"""Grid geometry, configuration and the shared game interface."""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Iterable

from ..core import Event

Pos = tuple[int, int]

MOVES: dict[str, Pos] = {"up": (-1, 0), "down": (1, 0), "left": (0, -1), "right": (0, 1)}
MOVE_ORDER = ("up", "down", "left", "right")
UNREACHABLE = -1


class ConfigError(ValueError):
    pass


class InvalidAction(ValueError):
    """Raised when an action outside ``valid_actions()`` is stepped."""


def load_layout(name_or_path: str | Path) -> tuple[str, ...]:
    """Read a plain-text grid, either a bundled map name or a file path."""
    p = Path(name_or_path)
    if p.suffix == ".txt" and p.exists():
        text = p.read_text()
    else:
        text = resources.files("stratex.envs.maps").joinpath(f"{name_or_path}.txt").read_text()
    return tuple(line.rstrip("\n") for line in text.splitlines() if line.strip())


@dataclass(frozen=True)
class GameConfig:
    env: str
    layout: tuple[str, ...]
    counts: dict[str, int] = field(default_factory=dict)
    rewards: dict[str, float] = field(default_factory=dict)
    max_steps: int = 500
    options: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.max_steps < 1:
            raise ConfigError("max_steps must be positive")
        if not self.layout:
            raise ConfigError("empty layout")
        width = len(self.layout[0])
        if any(len(row) != width for row in self.layout):
            raise ConfigError("layout is not rectangular")

    def with_overrides(self, **kw: Any) -> GameConfig:
        merged = {}
        for k, v in kw.items():
            cur = getattr(self, k)
            merged[k] = {**cur, **v} if isinstance(cur, dict) else v
        return replace(self, **merged)

    def to_dict(self) -> dict[str, Any]:
        return {"env": self.env, "layout": list(self.layout), "counts": self.counts,
                "rewards": self.rewards, "max_steps": self.max_steps, "options": self.options}

    @classmethod
    def from_file(cls, path: str | Path) -> GameConfig:
        """Load a JSON config; ``layout`` may be inline rows or a map file/name."""
        from . import default_config

        doc = json.loads(Path(path).read_text())
        base = default_config(doc["env"])
        layout = doc.get("layout")
        if isinstance(layout, str):
            ref = Path(path).parent / layout
            layout = load_layout(ref if ref.exists() else layout)
        elif layout is not None:
            layout = tuple(layout)
        kw = {k: doc[k] for k in ("counts", "rewards", "max_steps", "options") if k in doc}
        if layout is not None:
            kw["layout"] = layout
        return base.with_overrides(**kw)


class Grid:
    """Static wall geometry with precomputed neighbour lists."""

    def __init__(self, layout: Iterable[str], wall: str):
        self.rows = list(layout)
        self.height = len(self.rows)
        self.width = len(self.rows[0])
        self.walls = {(r, c) for r, row in enumerate(self.rows) for c, ch in enumerate(row) if ch == wall}
        self.cells = [(r, c) for r in range(self.height) for c in range(self.width) if (r, c) not in self.walls]
        self.neighbours: dict[Pos, list[tuple[str, Pos]]] = {}
        for (r, c) in self.cells:
            nb = []
            for a in MOVE_ORDER:
                dr, dc = MOVES[a]
                q = (r + dr, c + dc)
                if 0 <= q[0] < self.height and 0 <= q[1] < self.width and q not in self.walls:
                    nb.append((a, q))
            self.neighbours[(r, c)] = nb

    def find(self, glyph: str) -> list[Pos]:
        return [(r, c) for r, row in enumerate(self.rows) for c, ch in enumerate(row) if ch == glyph]

    def check_boundary(self) -> None:
        for r in range(self.height):
            for c in range(self.width):
                if (r in (0, self.height - 1) or c in (0, self.width - 1)) and (r, c) not in self.walls:
                    raise ConfigError(f"outer boundary must be wall, open cell at {(r, c)}")

    def bfs(self, start: Pos, blocked: Callable[[Pos], bool] | None = None) -> dict[Pos, int]:
        dist = {start: 0}
        queue = deque([start])
        nbrs = self.neighbours
        while queue:
            p = queue.popleft()
            d = dist[p] + 1
            for _, q in nbrs[p]:
                if q not in dist and not (blocked and blocked(q)):
                    dist[q] = d
                    queue.append(q)
        return dist

    def first_step(self, start: Pos, targets: set[Pos] | frozenset[Pos],
                   blocked: Callable[[Pos], bool] | None = None,
                   max_dist: int | None = None) -> tuple[str, Pos, int] | None:
        """First move along a shortest path to the nearest target.

        Returns (action, target, distance) or None when nothing is reachable.
        Targets are never treated as blocked. Ties resolve by move order.
        """
        if not targets:
            return None
        first: dict[Pos, str] = {start: ""}
        dist = {start: 0}
        queue = deque([start])
        while queue:
            p = queue.popleft()
            if p in targets and p != start:
                return first[p], p, dist[p]
            if max_dist is not None and dist[p] >= max_dist:
                continue
            for a, q in self.neighbours[p]:
                if q in dist:
                    continue
                if blocked and q not in targets and blocked(q):
                    continue
                dist[q] = dist[p] + 1
                first[q] = first[p] or a
                queue.append(q)
        return None


class GridGame:
    """Common episode bookkeeping. Subclasses implement the rules."""

    env_id = ""
    vocabulary: tuple[str, ...] = ()
    actions: tuple[str, ...] = MOVE_ORDER

    def __init__(self, config: GameConfig):
        self.config = config
        self.events = {label: Event(self.env_id, label) for label in self.vocabulary}
        self.rng = random.Random(0)
        self.t = 0
        self.done = True

    def reward_of(self, label: str) -> float:
        return float(self.config.rewards.get(label, 0.0))

    def reset(self, episode_seed: int):
        self.rng = random.Random(episode_seed)
        self.t = 0
        self.done = False
        self._reset()
        return self.observe()

    def step(self, action: str):
        """Advance one step: returns (observation, reward, event, done)."""
        if self.done:
            raise InvalidAction("episode is over; call reset()")
        if action not in self.valid_actions():
            raise InvalidAction(f"action {action!r} not valid here (valid: {sorted(self.valid_actions())})")
        label, reward, done = self._step(action)
        self.t += 1
        if self.t >= self.config.max_steps:
            done = True
        self.done = done
        return self.observe(), reward, self.events[label], done

    def _reset(self) -> None:
        raise NotImplementedError

    def _step(self, action: str) -> tuple[str, float, bool]:
        raise NotImplementedError

    def valid_actions(self) -> list[str]:
        raise NotImplementedError

    def observe(self):
        raise NotImplementedError

    def render_text(self) -> str:
        raise NotImplementedError

    def snapshot(self) -> Any:
        """Hashable copy of the mutable state, for determinism checks."""
        raise NotImplementedError

    def _random_move(self, pos: Pos, avoid: Callable[[Pos], bool] | None = None) -> Pos:
        opts = [q for _, q in self.grid.neighbours[pos] if not (avoid and avoid(q))]
        return self.rng.choice(opts) if opts else pos
