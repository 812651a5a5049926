"""Text Pacman: dots, power-ups and randomly wandering ghosts."""

from __future__ import annotations

from dataclasses import dataclass, field

from .grid import ConfigError, GameConfig, Grid, GridGame, Pos

EMPTY, WALL, DOT, POWER, GHOST, PLAYER, PLAYER_POWERED = 0, 1, 2, 3, 4, 5, 6

MOVE, DOT_EV, POWER_EV, KILL = "move", "collect dot", "collect power-up", "kill a ghost"


@dataclass
class PacmanState:
    player: Pos
    ghosts: list[Pos]
    dots: set[Pos]
    powerups: set[Pos]
    window: int = 0          # powered steps remaining, 0..power_window
    kills_in_window: int = 0
    alive: bool = True
    score: float = 0.0
    kills: int = 0
    ghost_starts: list[Pos] = field(default_factory=list)


class Pacman(GridGame):
    env_id = "pacman"
    vocabulary = (MOVE, DOT_EV, POWER_EV, KILL)

    def __init__(self, config: GameConfig):
        super().__init__(config)
        self.grid = Grid(config.layout, "#")
        self.grid.check_boundary()
        starts = self.grid.find("C")
        if len(starts) != 1:
            raise ConfigError("pacman layout needs exactly one 'C'")
        self.start = starts[0]
        ghosts = self.grid.find("M")
        n = config.counts.get("ghosts", len(ghosts))
        if n > len(ghosts):
            raise ConfigError(f"layout has {len(ghosts)} ghost starts, {n} requested")
        self.ghost_starts = ghosts[:n]
        self.window_len = int(config.options.get("power_window", 5))
        self.respawn = bool(config.options.get("ghost_respawn", False))
        self.state: PacmanState | None = None

    def _reset(self) -> None:
        rows = self.grid.rows
        dots = {(r, c) for r, row in enumerate(rows) for c, ch in enumerate(row) if ch in ".M"}
        self.state = PacmanState(self.start, list(self.ghost_starts), dots, set(self.grid.find("O")),
                                 ghost_starts=list(self.ghost_starts))

    def valid_actions(self) -> list[str]:
        if self.done:
            return []
        return [a for a, _ in self.grid.neighbours[self.state.player]]

    def _collide(self, s: PacmanState, powered: bool) -> str | None:
        """Resolve ghost contact at the player's cell. At most one kill per call."""
        if s.player not in s.ghosts:
            return None
        if not powered:
            s.alive = False
            return None
        idx = s.ghosts.index(s.player)
        if self.respawn:
            s.ghosts[idx] = s.ghost_starts[idx]
        else:
            del s.ghosts[idx]
            del s.ghost_starts[idx]
        return KILL

    def _step(self, action: str) -> tuple[str, float, bool]:
        s = self.state
        powered = s.window > 0
        old = s.player
        dr, dc = {"up": (-1, 0), "down": (1, 0), "left": (0, -1), "right": (0, 1)}[action]
        s.player = (old[0] + dr, old[1] + dc)

        label = MOVE
        if s.player in s.powerups:
            s.powerups.discard(s.player)
            label = POWER_EV
        elif s.player in s.dots:
            s.dots.discard(s.player)
            label = DOT_EV

        killed = self._collide(s, powered)
        if s.alive:
            s.ghosts = [self._random_move(g) for g in s.ghosts]
            if s.player in s.ghosts:
                if not powered:
                    s.alive = False
                elif not killed:
                    killed = self._collide(s, powered)

        if killed:
            label = KILL
            reward = self.reward_of(KILL) * 2 ** s.kills_in_window
            s.kills_in_window += 1
            s.kills += 1
        else:
            reward = self.reward_of(label)

        if powered:
            s.window -= 1
        if label == POWER_EV:
            s.window = self.window_len
            s.kills_in_window = 0
        elif s.window == 0:
            s.kills_in_window = 0

        s.score += reward
        done = not s.alive or (not s.dots and not s.powerups)
        return label, reward, done

    def observe(self) -> tuple[tuple[int, ...], ...]:
        s = self.state
        g = [[WALL if (r, c) in self.grid.walls else EMPTY for c in range(self.grid.width)]
             for r in range(self.grid.height)]
        for r, c in s.dots:
            g[r][c] = DOT
        for r, c in s.powerups:
            g[r][c] = POWER
        for r, c in s.ghosts:
            g[r][c] = GHOST
        g[s.player[0]][s.player[1]] = PLAYER_POWERED if s.window > 0 else PLAYER
        return tuple(map(tuple, g))

    def render_text(self) -> str:
        glyph = {EMPTY: " ", WALL: "#", DOT: ".", POWER: "O", GHOST: "M", PLAYER: "C", PLAYER_POWERED: "C"}
        return "\n".join("".join(glyph[v] for v in row) for row in self.observe())

    def snapshot(self):
        s = self.state
        return (s.player, tuple(s.ghosts), frozenset(s.dots), frozenset(s.powerups),
                s.window, s.kills_in_window, s.alive, s.score)
