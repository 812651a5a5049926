"""Domain types shared across the package: events, trajectories, goals and strategies."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Sequence


@dataclass(frozen=True, slots=True, order=True)
class Event:
    """A symbolic occurrence in an environment, e.g. ``collect power-up``."""

    env: str
    label: str

    def __post_init__(self) -> None:
        if not self.label:
            raise ValueError("event label must be non-empty")

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True, slots=True)
class Step:
    pre_state: Any
    action: str
    event: Event
    reward: float
    post_state: Any = None


@dataclass(frozen=True, slots=True)
class Trajectory:
    """Ordered steps of (part of) one episode.

    ``episode_seed`` together with the actions is enough to replay the
    episode, since environment dynamics only draw from the episode seed.
    """

    steps: tuple[Step, ...]
    episode_seed: int = 0
    env: str = ""

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def events(self) -> list[Event]:
        return [s.event for s in self.steps]

    @property
    def actions(self) -> list[str]:
        return [s.action for s in self.steps]

    @property
    def total_reward(self) -> float:
        return sum(s.reward for s in self.steps)

    def truncated(self, index: int) -> Trajectory:
        """Keep steps ``0..index`` inclusive."""
        return Trajectory(self.steps[: index + 1], self.episode_seed, self.env)


def events_of(t: Trajectory) -> list[Event]:
    return [s.event for s in t.steps]


def is_subtrajectory(candidate: Sequence[Hashable], seq: Sequence[Hashable]) -> bool:
    """True if ``candidate`` is ``seq`` with zero or more elements deleted."""
    it = iter(seq)
    return all(any(c == x for x in it) for c in candidate)


_COUNT_RE = re.compile(r"^(.*?)\s*(?:[x×\*]\s*(\d+))?$")


@dataclass(frozen=True, slots=True)
class EventSpec:
    """An event of interest: a multiset of (event, count) requirements."""

    requirements: tuple[tuple[Event, int], ...]

    def __post_init__(self) -> None:
        if not self.requirements:
            raise ValueError("an event-of-interest spec needs at least one requirement")
        merged: Counter[Event] = Counter()
        for event, count in self.requirements:
            if count < 1:
                raise ValueError(f"requirement count must be >= 1, got {count} for {event}")
            merged[event] += count
        object.__setattr__(self, "requirements", tuple(sorted(merged.items())))

    @classmethod
    def single(cls, event: Event, count: int = 1) -> EventSpec:
        return cls(((event, count),))

    @classmethod
    def parse(cls, text: str, env: str, vocabulary: Iterable[str] | None = None) -> EventSpec:
        """Parse ``"rob bank x2 + destroy police car"`` style goal strings.

        Conjunctions may be written with ``+``, ``,`` or `` and ``; counts as
        ``x2``, ``×2`` or ``*2`` after the label.
        """
        vocab = set(vocabulary) if vocabulary is not None else None
        reqs = []
        for part in re.split(r"\s*(?:\+|,|\band\b)\s*", text.strip()):
            if not part:
                continue
            m = _COUNT_RE.match(part)
            label, count = m.group(1).strip(), int(m.group(2) or 1)
            if vocab is not None and label not in vocab:
                raise ValueError(f"unknown event {label!r} for environment {env!r}")
            reqs.append((Event(env, label), count))
        return cls(tuple(reqs))

    @property
    def final_events(self) -> frozenset[Event]:
        return frozenset(e for e, _ in self.requirements)

    def __str__(self) -> str:
        return " + ".join(e.label if c == 1 else f"{e.label} x{c}" for e, c in self.requirements)


def satisfies(t: Trajectory | Sequence[Event], spec: EventSpec) -> int | None:
    """Index of the earliest step at which every requirement is met, else None."""
    events = t.events if isinstance(t, Trajectory) else t
    outstanding = {e: c for e, c in spec.requirements}
    remaining = len(outstanding)
    for i, ev in enumerate(events):
        left = outstanding.get(ev)
        if left:
            outstanding[ev] = left - 1
            if left == 1:
                remaining -= 1
                if remaining == 0:
                    return i
    return None


@dataclass(frozen=True, slots=True)
class Strategy:
    """An ordered event sequence produced by traceback.

    An empty strategy is what alignment returns when no cell scores above
    zero; callers treat it as "no candidate".
    """

    events: tuple[Event, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.events)

    def __bool__(self) -> bool:
        return bool(self.events)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(e.label for e in self.events)

    def __str__(self) -> str:
        return "{" + ", ".join(self.labels) + "}"
