"""Dungeon Crawler: fetch the key and leave through the door, fighting monsters with weapons."""

from __future__ import annotations

from dataclasses import dataclass, field

from .grid import MOVES, UNREACHABLE, ConfigError, GameConfig, Grid, GridGame, Pos

MOVE = "move"
GUN, SWORD = "collect weapon (gun)", "collect weapon (sword)"
KEY, KILL, DOOR = "collect key", "kill a monster", "unlock door"

# observation order for the distance vector
TARGETS = ("gun", "sword", "monster", "key", "door")


@dataclass
class DungeonState:
    player: Pos
    monsters: list[Pos]
    guns: set[Pos]
    swords: set[Pos]
    key: Pos | None
    door: Pos
    held: list[str] = field(default_factory=list)   # weapons, oldest first
    has_key: bool = False
    alive: bool = True
    escaped: bool = False
    score: float = 0.0

    @property
    def armed(self) -> bool:
        return bool(self.held)


class DungeonCrawler(GridGame):
    env_id = "dungeon"
    vocabulary = (MOVE, GUN, SWORD, KEY, KILL, DOOR)

    def __init__(self, config: GameConfig):
        super().__init__(config)
        self.grid = Grid(config.layout, "X")
        self.grid.check_boundary()
        found = {g: self.grid.find(g) for g in "ok|"}
        for g, cells in found.items():
            if len(cells) != 1:
                raise ConfigError(f"dungeon layout needs exactly one {g!r}")
        self.start, self.key_pos, self.door_pos = found["o"][0], found["k"][0], found["|"][0]
        self.n_monsters = config.counts.get("monsters", 6)
        self.n_guns = config.counts.get("guns", 3)
        self.n_swords = config.counts.get("swords", 3)
        safe = int(config.options.get("spawn_safe_radius", 2))
        near_start = self.grid.bfs(self.start)
        reserved = {self.start, self.key_pos, self.door_pos}
        self.item_cells = [p for p in self.grid.cells if p not in reserved]
        self.monster_cells = [p for p in self.item_cells if near_start.get(p, 10**9) > safe]
        if len(self.item_cells) < self.n_guns + self.n_swords:
            raise ConfigError("not enough empty cells for weapons")
        if len(self.monster_cells) < self.n_monsters:
            raise ConfigError("not enough empty cells for monsters")
        self.state: DungeonState | None = None

    def _reset(self) -> None:
        rng = self.rng
        items = rng.sample(self.item_cells, self.n_guns + self.n_swords)
        monsters = rng.sample(self.monster_cells, self.n_monsters)
        self.state = DungeonState(self.start, monsters, set(items[:self.n_guns]),
                                  set(items[self.n_guns:]), self.key_pos, self.door_pos)

    def passable(self, p: Pos) -> bool:
        return p != self.state.door or self.state.has_key

    def valid_actions(self) -> list[str]:
        if self.done:
            return []
        return [a for a, q in self.grid.neighbours[self.state.player] if self.passable(q)]

    def _contact(self, s: DungeonState) -> bool:
        """Resolve a monster on the player's cell; True if one was killed."""
        if s.player not in s.monsters:
            return False
        if not s.armed:
            s.alive = False
            return False
        s.monsters.remove(s.player)
        s.held.pop(0)
        return True

    def _step(self, action: str) -> tuple[str, float, bool]:
        s = self.state
        dr, dc = MOVES[action]
        s.player = (s.player[0] + dr, s.player[1] + dc)
        label = MOVE
        if s.player == s.door:
            s.escaped = True
            label = DOOR
        elif s.player == s.key:
            s.key, s.has_key = None, True
            label = KEY
        elif s.player in s.guns:
            s.guns.discard(s.player)
            s.held.append("gun")
            label = GUN
        elif s.player in s.swords:
            s.swords.discard(s.player)
            s.held.append("sword")
            label = SWORD

        killed = False
        if not s.escaped:
            killed = self._contact(s)
            if s.alive:
                door = s.door
                s.monsters = [self._random_move(m, lambda q: q == door) for m in s.monsters]
                if not killed:
                    killed = self._contact(s)
                elif s.player in s.monsters and not s.armed:
                    s.alive = False
        if killed:
            label = KILL
        reward = self.reward_of(label)
        s.score += reward
        return label, reward, s.escaped or not s.alive

    def distances(self) -> dict[str, int]:
        s = self.state
        dist = self.grid.bfs(s.player)
        groups = {"gun": s.guns, "sword": s.swords, "monster": s.monsters,
                  "key": [s.key] if s.key else [], "door": [s.door]}
        out = {}
        for name in TARGETS:
            ds = [dist[p] for p in groups[name] if p in dist]
            out[name] = min(ds) if ds else UNREACHABLE
        return out

    def observe(self) -> tuple[int, ...]:
        d = self.distances()
        return tuple(d[k] for k in TARGETS)

    def render_text(self) -> str:
        s = self.state
        rows = [["X" if (r, c) in self.grid.walls else "." for c in range(self.grid.width)]
                for r in range(self.grid.height)]
        layers = [(s.guns, "g"), (s.swords, "s"), ([s.key] if s.key else [], "k"),
                  ([s.door], "|"), (s.monsters, "Z"), ([s.player], "o")]
        for cells, ch in layers:
            for r, c in cells:
                rows[r][c] = ch
        return "\n".join("".join(r) for r in rows)

    def snapshot(self):
        s = self.state
        return (s.player, tuple(s.monsters), frozenset(s.guns), frozenset(s.swords),
                s.key, tuple(s.held), s.has_key, s.alive, s.escaped, s.score)
