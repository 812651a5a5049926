"""Symbolic grid games that emit one labelled event per step."""

from __future__ import annotations

from .bankheist import BankHeist
from .dungeon import DungeonCrawler
from .grid import MOVES, UNREACHABLE, ConfigError, GameConfig, Grid, GridGame, InvalidAction, load_layout
from .pacman import Pacman

ENVS: dict[str, type[GridGame]] = {cls.env_id: cls for cls in (Pacman, DungeonCrawler, BankHeist)}

DEFAULT_REWARDS = {
    "pacman": {"move": 0, "collect dot": 10, "collect power-up": 50, "kill a ghost": 200},
    "dungeon": {"move": 0, "collect weapon (gun)": 25, "collect weapon (sword)": 25,
                "collect key": 25, "kill a monster": 50, "unlock door": 100},
    "bankheist": {"move": 0, "rob bank": 50, "drop dynamite": 0, "destroy police car": 50,
                  "collect fuel": 20},
}
DEFAULT_COUNTS = {
    "pacman": {"ghosts": 3},
    "dungeon": {"monsters": 6, "guns": 3, "swords": 3},
    "bankheist": {"banks": 1, "fuel_tanks": 1},
}


def default_config(env: str) -> GameConfig:
    if env not in ENVS:
        raise ConfigError(f"unknown environment {env!r}; choose from {sorted(ENVS)}")
    return GameConfig(env, load_layout(env), dict(DEFAULT_COUNTS[env]), dict(DEFAULT_REWARDS[env]))


def make_env(config: GameConfig | str) -> GridGame:
    if isinstance(config, str):
        config = default_config(config)
    if config.env not in ENVS:
        raise ConfigError(f"unknown environment {config.env!r}")
    return ENVS[config.env](config)


def vocabulary(env: str) -> tuple[str, ...]:
    if env not in ENVS:
        raise ConfigError(f"unknown environment {env!r}")
    return ENVS[env].vocabulary


__all__ = ["ENVS", "BankHeist", "ConfigError", "DungeonCrawler", "GameConfig", "Grid", "GridGame",
           "InvalidAction", "MOVES", "Pacman", "UNREACHABLE", "default_config", "load_layout",
           "make_env", "vocabulary"]
