"""Bank Heist: rob banks, dodge police cars, manage fuel and dynamite."""

from __future__ import annotations

from dataclasses import dataclass, field

from .grid import MOVES, MOVE_ORDER, ConfigError, GameConfig, Grid, GridGame, Pos

MOVE, ROB, DYNAMITE, DESTROY, FUEL = "move", "rob bank", "drop dynamite", "destroy police car", "collect fuel"
DROP = "dynamite"
INVALID_BENEFIT = -100.0


@dataclass
class BankHeistState:
    player: Pos
    banks: set[Pos]
    fuels: set[Pos]
    police: list[Pos] = field(default_factory=list)
    dynamite: list[list] = field(default_factory=list)   # [pos, fuse]
    fuel: float = 100.0
    robbed: int = 0
    alive: bool = True
    score: float = 0.0


class BankHeist(GridGame):
    env_id = "bankheist"
    vocabulary = (MOVE, ROB, DYNAMITE, DESTROY, FUEL)
    actions = MOVE_ORDER + (DROP,)

    def __init__(self, config: GameConfig):
        super().__init__(config)
        self.grid = Grid(config.layout, "#")
        self.grid.check_boundary()
        starts = self.grid.find("C")
        if len(starts) != 1:
            raise ConfigError("bank heist layout needs exactly one 'C'")
        self.start = starts[0]
        self.bank_starts = self.grid.find("B")[: config.counts.get("banks", 1)]
        self.fuel_starts = self.grid.find("F")[: config.counts.get("fuel_tanks", 1)]
        o = config.options
        self.max_fuel = float(o.get("max_fuel", 100))
        self.move_cost = float(o.get("move_cost", 1))
        self.dynamite_cost = float(o.get("dynamite_cost", 5))
        self.fuse = int(o.get("fuse", 3))
        self.banks_to_win = int(o.get("banks_to_win", 5))
        self.police_bias = float(o.get("police_bias", 0.5))
        self.police_spawn_distance = int(o.get("police_spawn_distance", 4))
        self.respawn_fuel = bool(o.get("respawn_fuel", True))
        self.dynamite_needs_police = bool(o.get("dynamite_needs_police", True))
        self.state: BankHeistState | None = None

    def _reset(self) -> None:
        self.state = BankHeistState(self.start, set(self.bank_starts), set(self.fuel_starts),
                                    fuel=self.max_fuel)

    def blast(self, p: Pos) -> set[Pos]:
        return {p, *(q for _, q in self.grid.neighbours[p])}

    def valid_actions(self) -> list[str]:
        if self.done:
            return []
        s = self.state
        acts = [a for a, _ in self.grid.neighbours[s.player]] if s.fuel >= self.move_cost else []
        armed = s.police or not self.dynamite_needs_police
        if armed and s.fuel >= self.dynamite_cost and all(d[0] != s.player for d in s.dynamite):
            acts.append(DROP)
        return acts

    def _empty_cells(self, min_dist: int = 0) -> list[Pos]:
        s = self.state
        taken = {s.player, *s.banks, *s.fuels, *s.police, *(d[0] for d in s.dynamite)}
        dist = self.grid.bfs(s.player) if min_dist else {}
        return [p for p in self.grid.cells if p not in taken and dist.get(p, min_dist) >= min_dist]

    def _spawn(self, min_dist: int = 0) -> Pos | None:
        cells = self._empty_cells(min_dist) or self._empty_cells()
        return self.rng.choice(cells) if cells else None

    def _step(self, action: str) -> tuple[str, float, bool]:
        s = self.state
        rewards = {}
        won = False
        dropped = None
        if action == DROP:
            s.fuel -= self.dynamite_cost
            dropped = s.player
            rewards[DYNAMITE] = self.reward_of(DYNAMITE)
        else:
            s.fuel -= self.move_cost
            dr, dc = MOVES[action]
            s.player = (s.player[0] + dr, s.player[1] + dc)
            if s.player in s.banks:
                s.banks.discard(s.player)
                s.robbed += 1
                rewards[ROB] = self.reward_of(ROB) * s.robbed
                won = s.robbed >= self.banks_to_win
                if not won:
                    bank = self._spawn()
                    if bank:
                        s.banks.add(bank)
                    car = self._spawn(self.police_spawn_distance)
                    if car:
                        s.police.append(car)
            elif s.player in s.fuels:
                s.fuels.discard(s.player)
                s.fuel = self.max_fuel
                rewards[FUEL] = self.reward_of(FUEL)
                if self.respawn_fuel:
                    tank = self._spawn()
                    if tank:
                        s.fuels.add(tank)
        s.fuel = min(max(s.fuel, 0.0), self.max_fuel)

        if s.player in s.police:
            s.alive = False
        if s.alive and not won:
            moved = []
            for car in s.police:
                step = self.grid.first_step(car, {s.player}) if self.rng.random() < self.police_bias else None
                if step:
                    dr, dc = MOVES[step[0]]
                    moved.append((car[0] + dr, car[1] + dc))
                else:
                    moved.append(self._random_move(car))
            s.police = moved

            destroyed = 0
            live = []
            for d in s.dynamite:
                d[1] -= 1
                if d[1] > 0:
                    live.append(d)
                    continue
                zone = self.blast(d[0])
                before = len(s.police)
                s.police = [p for p in s.police if p not in zone]
                destroyed += before - len(s.police)
                if s.player in zone:
                    s.alive = False
            s.dynamite = live
            if dropped:
                s.dynamite.append([dropped, self.fuse])
            if destroyed:
                rewards[DESTROY] = self.reward_of(DESTROY) * destroyed
            if s.player in s.police:
                s.alive = False

        for label in (DESTROY, ROB, FUEL, DYNAMITE):
            if label in rewards:
                break
        else:
            label = MOVE
        reward = rewards.get(label, self.reward_of(MOVE))
        s.score += reward
        out_of_fuel = s.fuel < self.move_cost and s.fuel < self.dynamite_cost
        return label, reward, won or not s.alive or out_of_fuel

    def benefits(self) -> dict[str, float]:
        """Heuristic value of each action for the next step (invalid actions get a sentinel)."""
        s = self.state
        valid = set(self.valid_actions())
        danger = set()
        for d in s.dynamite:
            danger |= self.blast(d[0])
        police_near = set()
        for p in s.police:
            police_near |= self.blast(p)
        out = {}
        for a in self.actions:
            if a not in valid:
                out[a] = INVALID_BENEFIT
            elif a == DROP:
                close = sum(1 for p in s.police if abs(p[0] - s.player[0]) + abs(p[1] - s.player[1]) <= 2)
                out[a] = self.reward_of(DESTROY) * close - self.dynamite_cost
            else:
                q = (s.player[0] + MOVES[a][0], s.player[1] + MOVES[a][1])
                gain = self.reward_of(ROB) * (s.robbed + 1) if q in s.banks else 0.0
                if q in s.fuels:
                    gain += self.reward_of(FUEL) * (1 - s.fuel / self.max_fuel)
                step = self.grid.first_step(q, s.banks) if q not in s.banks else None
                closeness = 10.0 / (1 + step[2]) if step else (10.0 if q in s.banks else 0.0)
                penalty = 20.0 * (q in police_near) + 20.0 * (q in danger)
                out[a] = gain + closeness - penalty
        return out

    def observe(self) -> tuple[float, ...]:
        b = self.benefits()
        return tuple(b[a] for a in self.actions)

    def render_text(self) -> str:
        s = self.state
        rows = [["#" if (r, c) in self.grid.walls else "." for c in range(self.grid.width)]
                for r in range(self.grid.height)]
        layers = [(s.fuels, "F"), (s.banks, "B"), ([d[0] for d in s.dynamite], "D"),
                  (s.police, "P"), ([s.player], "C")]
        for cells, ch in layers:
            for r, c in cells:
                rows[r][c] = ch
        return "\n".join("".join(r) for r in rows)

    def snapshot(self):
        s = self.state
        return (s.player, frozenset(s.banks), frozenset(s.fuels), tuple(s.police),
                tuple(tuple(d) for d in s.dynamite), s.fuel, s.robbed, s.alive, s.score)
