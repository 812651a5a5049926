"""Trajectory files: a line format for single trajectories and JSON for datasets.

Field names are listed in docs/schemas.md.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable

from .core import Event, Step, Trajectory

DATASET_SCHEMA = "stratex.dataset/1"
NO_ACTION = "-"


def dumps_lines(t: Trajectory) -> str:
    lines = [f"# env: {t.env}", f"# episode_seed: {t.episode_seed}"]
    lines += [f"{s.action}\t{s.event.label}\t{float(s.reward)!r}" for s in t.steps]
    return "\n".join(lines) + "\n"


def loads_lines(text: str, env: str = "") -> Trajectory:
    meta: dict[str, str] = {}
    steps = []
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        if line.startswith("#"):
            key, _, val = line[1:].partition(":")
            meta[key.strip()] = val.strip()
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"line {n}: expected 'action<TAB>event<TAB>reward', got {line!r}")
        action, label, reward = parts
        steps.append((action, label, float(reward)))
    env = meta.get("env", env)
    return Trajectory(tuple(Step(None, a, Event(env, lab), r) for a, lab, r in steps),
                      int(meta.get("episode_seed", 0)), env)


def save_lines(t: Trajectory, path: str | Path) -> None:
    Path(path).write_text(dumps_lines(t))


def load_lines(path: str | Path, env: str = "") -> Trajectory:
    return loads_lines(Path(path).read_text(), env)


def trajectory_to_dict(t: Trajectory) -> dict[str, Any]:
    return {"env": t.env, "episode_seed": t.episode_seed,
            "steps": [{"action": s.action, "event": s.event.label, "reward": s.reward} for s in t.steps]}


def trajectory_from_dict(doc: dict[str, Any]) -> Trajectory:
    env = doc.get("env", "")
    steps = tuple(Step(None, s["action"], Event(env, s["event"]), float(s["reward"])) for s in doc["steps"])
    return Trajectory(steps, int(doc.get("episode_seed", 0)), env)


def save_dataset(path: str | Path, trajectories: Iterable[Trajectory], **meta: Any) -> None:
    doc = {"schema": DATASET_SCHEMA, "meta": meta,
           "trajectories": [trajectory_to_dict(t) for t in trajectories]}
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def load_dataset(path: str | Path) -> tuple[list[Trajectory], dict[str, Any]]:
    doc = json.loads(Path(path).read_text())
    if doc.get("schema") != DATASET_SCHEMA:
        raise ValueError(f"{path}: not a {DATASET_SCHEMA} document")
    return [trajectory_from_dict(t) for t in doc["trajectories"]], doc.get("meta", {})
