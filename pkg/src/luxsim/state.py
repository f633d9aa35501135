"""Authoritative game state and pure state queries."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rules import (
    RESOURCES,
    RuleConstants,
    TEAM_NAMES,
    city_tile_upkeep,
)

# Board resource codes (res_kind array).
EMPTY_CODE = 0
RESOURCE_CODES = {kind: i + 1 for i, kind in enumerate(RESOURCES)}
CODE_TO_RESOURCE = {i + 1: kind for i, kind in enumerate(RESOURCES)}

# Direction letters and their (dx, dy) deltas; x grows east, y grows south.
DIRECTIONS = ("N", "E", "S", "W")
DIR_DELTAS = {"N": (0, -1), "E": (1, 0), "S": (0, 1), "W": (-1, 0), "C": (0, 0)}


@dataclass(slots=True)
class Unit:
    id: int
    team: int
    kind: int  # WORKER or CART
    x: int
    y: int
    cooldown: float = 0.0
    wood: int = 0
    coal: int = 0
    uranium: int = 0

    @property
    def cargo_total(self) -> int:
        return self.wood + self.coal + self.uranium

    def cargo(self) -> dict:
        return {"wood": self.wood, "coal": self.coal, "uranium": self.uranium}

    def cargo_fuel(self, constants: RuleConstants) -> int:
        fv = constants.fuel_value
        return (
            self.wood * fv["wood"]
            + self.coal * fv["coal"]
            + self.uranium * fv["uranium"]
        )

    def can_act(self) -> bool:
        return self.cooldown < 1

    def pos(self) -> tuple[int, int]:
        return (self.x, self.y)


@dataclass(slots=True)
class CityTile:
    team: int
    x: int
    y: int
    cooldown: float = 0.0
    city_id: int = -1

    def can_act(self) -> bool:
        return self.cooldown < 1

    def pos(self) -> tuple[int, int]:
        return (self.x, self.y)


@dataclass(slots=True)
class City:
    id: int
    team: int
    fuel: int = 0
    tiles: set = field(default_factory=set)  # of (x, y)


@dataclass(slots=True)
class TeamState:
    research_points: int = 0


@dataclass
class Outcome:
    winner: str  # "A", "B" or "Draw"
    reason: str  # "citytile-count" | "unit-count" | "elimination" | "draw"
    citytiles: tuple[int, int] = (0, 0)
    units: tuple[int, int] = (0, 0)
    turn: int = 0

    def to_dict(self) -> dict:
        return {
            "winner": self.winner,
            "reason": self.reason,
            "citytiles": list(self.citytiles),
            "units": list(self.units),
            "turn": self.turn,
        }


class GameState:
    """Complete world state for one turn.

    A GameState is a value: nothing in it is shared with other states, and any
    number of independent games may run concurrently as long as a single state
    is never mutated from two threads at once.
    """

    def __init__(self, width: int, height: int, constants: RuleConstants):
        self.width = width
        self.height = height
        self.constants = constants
        self.turn = 0
        self.res_kind = np.zeros((height, width), dtype=np.int8)
        self.res_amt = np.zeros((height, width), dtype=np.int64)
        # Road levels are exact multiples of 0.25, so float64 holds them
        # without drift.  Cells under a CityTile are pinned at road_max.
        self.road = np.zeros((height, width), dtype=np.float64)
        self.units: dict[int, Unit] = {}
        self.citytiles: dict[tuple[int, int], CityTile] = {}
        self.cities: dict[int, City] = {}
        self.teams = (TeamState(), TeamState())
        self.next_unit_id = 0
        self.next_city_id = 0
        # Derived occupancy index: cell -> list of unit ids, kept in sync by
        # the mutators below.
        self.units_by_cell: dict[tuple[int, int], list[int]] = {}
        # Provenance of the map, carried into replays.
        self.map_meta: dict = {}

    # -- basic queries -----------------------------------------------------

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def units_at(self, x: int, y: int) -> list[int]:
        return self.units_by_cell.get((x, y), [])

    def citytile_at(self, x: int, y: int) -> CityTile | None:
        return self.citytiles.get((x, y))

    def road_level(self, x: int, y: int) -> float:
        if (x, y) in self.citytiles:
            return self.constants.road_max
        return float(self.road[y, x])

    def team_unit_count(self, team: int) -> int:
        return sum(1 for u in self.units.values() if u.team == team)

    def team_citytile_count(self, team: int) -> int:
        return sum(1 for ct in self.citytiles.values() if ct.team == team)

    def team_fuel(self, team: int) -> int:
        return sum(c.fuel for c in self.cities.values() if c.team == team)

    def adjacent_friendly_tiles(self, x: int, y: int, team: int) -> int:
        n = 0
        for dx, dy in ((0, -1), (1, 0), (0, 1), (-1, 0)):
            ct = self.citytiles.get((x + dx, y + dy))
            if ct is not None and ct.team == team:
                n += 1
        return n

    def tile_upkeep(self, x: int, y: int) -> int:
        ct = self.citytiles[(x, y)]
        return city_tile_upkeep(
            self.adjacent_friendly_tiles(x, y, ct.team), self.constants
        )

    def city_upkeep(self, city: City) -> int:
        return sum(self.tile_upkeep(x, y) for (x, y) in city.tiles)

    # -- mutators keeping the occupancy index consistent -------------------

    def add_unit(self, team: int, kind: int, x: int, y: int) -> Unit:
        unit = Unit(self.next_unit_id, team, kind, x, y)
        self.next_unit_id += 1
        self.units[unit.id] = unit
        self.units_by_cell.setdefault((x, y), []).append(unit.id)
        return unit

    def remove_unit(self, unit_id: int) -> None:
        unit = self.units.pop(unit_id)
        cell = self.units_by_cell[(unit.x, unit.y)]
        cell.remove(unit_id)
        if not cell:
            del self.units_by_cell[(unit.x, unit.y)]

    def move_unit(self, unit_id: int, x: int, y: int) -> None:
        unit = self.units[unit_id]
        cell = self.units_by_cell[(unit.x, unit.y)]
        cell.remove(unit_id)
        if not cell:
            del self.units_by_cell[(unit.x, unit.y)]
        unit.x, unit.y = x, y
        self.units_by_cell.setdefault((x, y), []).append(unit_id)

    def add_citytile(self, team: int, x: int, y: int) -> CityTile:
        """Create a CityTile, merging any adjacent friendly Cities.

        Pooled fuel of merged components is summed.
        """
        if (x, y) in self.citytiles:
            raise ValueError(f"cell ({x},{y}) already has a CityTile")
        tile = CityTile(team, x, y)
        self.citytiles[(x, y)] = tile
        neighbours = set()
        for dx, dy in ((0, -1), (1, 0), (0, 1), (-1, 0)):
            ct = self.citytiles.get((x + dx, y + dy))
            if ct is not None and ct.team == team:
                neighbours.add(ct.city_id)
        if not neighbours:
            city = City(self.next_city_id, team, 0, {(x, y)})
            self.next_city_id += 1
            self.cities[city.id] = city
            tile.city_id = city.id
        else:
            keep_id = min(neighbours)
            keep = self.cities[keep_id]
            for other_id in neighbours - {keep_id}:
                other = self.cities.pop(other_id)
                keep.fuel += other.fuel
                for pos in other.tiles:
                    self.citytiles[pos].city_id = keep_id
                keep.tiles |= other.tiles
            keep.tiles.add((x, y))
            tile.city_id = keep_id
        self.road[y, x] = self.constants.road_max
        return tile

    def remove_city(self, city_id: int) -> list[tuple[int, int]]:
        """Remove a City and all its tiles; their road levels reset to 0."""
        city = self.cities.pop(city_id)
        for (x, y) in city.tiles:
            del self.citytiles[(x, y)]
            self.road[y, x] = 0.0
        return sorted(city.tiles, key=lambda p: (p[1], p[0]))

    # -- bookkeeping -------------------------------------------------------

    def copy(self) -> "GameState":
        clone = GameState.__new__(GameState)
        clone.width = self.width
        clone.height = self.height
        clone.constants = self.constants
        clone.turn = self.turn
        clone.res_kind = self.res_kind.copy()
        clone.res_amt = self.res_amt.copy()
        clone.road = self.road.copy()
        clone.units = {
            uid: Unit(u.id, u.team, u.kind, u.x, u.y, u.cooldown, u.wood, u.coal, u.uranium)
            for uid, u in self.units.items()
        }
        clone.citytiles = {
            pos: CityTile(ct.team, ct.x, ct.y, ct.cooldown, ct.city_id)
            for pos, ct in self.citytiles.items()
        }
        clone.cities = {
            cid: City(c.id, c.team, c.fuel, set(c.tiles))
            for cid, c in self.cities.items()
        }
        clone.teams = (
            TeamState(self.teams[0].research_points),
            TeamState(self.teams[1].research_points),
        )
        clone.next_unit_id = self.next_unit_id
        clone.next_city_id = self.next_city_id
        clone.units_by_cell = {pos: list(ids) for pos, ids in self.units_by_cell.items()}
        clone.map_meta = dict(self.map_meta)
        return clone


def city_components(state: GameState) -> list[City]:
    """Partition all CityTiles into maximal same-team 4-connected components.

    This is the from-scratch query; the engine maintains the same partition
    incrementally in ``state.cities``.  Fuel is carried over from the state's
    city bookkeeping.
    """
    seen: set[tuple[int, int]] = set()
    out: list[City] = []
    for pos in sorted(state.citytiles, key=lambda p: (p[1], p[0])):
        if pos in seen:
            continue
        team = state.citytiles[pos].team
        component = set()
        stack = [pos]
        seen.add(pos)
        while stack:
            (x, y) = stack.pop()
            component.add((x, y))
            for dx, dy in ((0, -1), (1, 0), (0, 1), (-1, 0)):
                npos = (x + dx, y + dy)
                ct = state.citytiles.get(npos)
                if ct is not None and ct.team == team and npos not in seen:
                    seen.add(npos)
                    stack.append(npos)
        city_id = state.citytiles[pos].city_id
        fuel = state.cities[city_id].fuel if city_id in state.cities else 0
        out.append(City(city_id, team, fuel, component))
    return out


def check_invariants(state: GameState) -> None:
    """Raise AssertionError on any violated state invariant.

    Co-location: movement never stacks units on a bare cell, but a City
    collapsing at night can leave previously stacked units standing on the
    now-bare cells.  Such remnant stacks are always same-team, which is what
    is checked here; enemy units can never share a cell.
    """
    c = state.constants
    for (x, y), ids in state.units_by_cell.items():
        assert ids, f"empty occupancy entry at {(x, y)}"
        teams = {state.units[i].team for i in ids}
        assert len(teams) == 1, f"mixed-team stack at {(x, y)}"
        ct = state.citytiles.get((x, y))
        if ct is not None:
            assert ct.team in teams, f"unit on enemy CityTile at {(x, y)}"
    for u in state.units.values():
        assert state.in_bounds(u.x, u.y), f"unit {u.id} off board"
        assert u.cooldown >= 0, f"unit {u.id} negative cooldown"
        assert u.wood >= 0 and u.coal >= 0 and u.uranium >= 0
        assert u.cargo_total <= c.unit_capacity(u.kind), f"unit {u.id} over capacity"
        assert u.cooldown == round(u.cooldown * 4) / 4, "cooldown not a 0.25 multiple"
    for team in (0, 1):
        rp = state.teams[team].research_points
        assert 0 <= rp <= c.research_cap
    for city in state.cities.values():
        assert city.fuel >= 0
        assert city.tiles, f"city {city.id} has no tiles"
        for pos in city.tiles:
            ct = state.citytiles.get(pos)
            assert ct is not None and ct.city_id == city.id and ct.team == city.team
    for pos, ct in state.citytiles.items():
        assert ct.city_id in state.cities and pos in state.cities[ct.city_id].tiles
        assert ct.cooldown >= 0
        upkeep = state.tile_upkeep(*pos)
        assert upkeep in (3, 8, 13, 18, 23), f"impossible upkeep {upkeep}"
    # city partition: recomputed components match the incremental ones
    recomputed = city_components(state)
    assert sum(len(c2.tiles) for c2 in recomputed) == len(state.citytiles)
    by_id = {c2.id: c2 for c2 in recomputed}
    assert by_id.keys() == state.cities.keys()
    for cid, comp in by_id.items():
        assert comp.tiles == state.cities[cid].tiles
    road = state.road
    assert ((road >= 0) & (road <= c.road_max)).all(), "road out of range"
    assert (road * 4 == np.round(road * 4)).all(), "road not a 0.25 multiple"
    assert (state.res_amt >= 0).all()
    # occupancy index consistent with unit positions
    for uid, u in state.units.items():
        assert uid in state.units_by_cell.get((u.x, u.y), []), "occupancy desync"


def team_name(team: int) -> str:
    return TEAM_NAMES[team]
