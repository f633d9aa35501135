"""Scripted baseline policies.

All builtin agents emit only mask-valid actions, so the engine never drops
anything they submit.  The greedy heuristics are deliberately simple and
frozen; they exist as a stable sanity baseline, not as a strong player.
"""

from __future__ import annotations

import random

from .actions import (
    Action,
    BUILD_CITY,
    BUILD_WORKER,
    MOVE,
    RESEARCH,
    citytile_channel_to_action,
    unit_channel_to_action,
)
from .masks import citytile_mask, unit_mask
from .rules import RESOURCES, WORKER
from .state import DIR_DELTAS, GameState, RESOURCE_CODES


class Agent:
    """A policy producing one team's actions each turn."""

    name = "agent"

    def act(self, state: GameState, team: int) -> list:
        raise NotImplementedError

    def close(self) -> None:
        pass


class NullAgent(Agent):
    name = "null"

    def act(self, state: GameState, team: int) -> list:
        return []


class RandomAgent(Agent):
    """Samples uniformly among mask-valid channels for every own actor.

    Deterministic given (seed, turn): the per-turn stream is reseeded so the
    action sequence does not depend on call history.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.name = f"random:{seed}"

    def act(self, state: GameState, team: int) -> list:
        rng = random.Random(f"{self.seed}:{state.turn}")
        actions = []
        for uid in sorted(state.units):
            unit = state.units[uid]
            if unit.team != team:
                continue
            mask = unit_mask(state, unit)
            channels = [i for i in range(len(mask)) if mask[i]]
            actions.append(unit_channel_to_action(unit.kind, rng.choice(channels), uid))
        for pos in sorted(state.citytiles, key=lambda p: (p[1], p[0])):
            tile = state.citytiles[pos]
            if tile.team != team:
                continue
            mask = citytile_mask(state, tile)
            channels = [i for i in range(len(mask)) if mask[i]]
            actions.append(citytile_channel_to_action(rng.choice(channels), pos))
        return actions


class GreedyAgent(Agent):
    """Collect resources, build CityTiles, shelter and deposit before night.

    Workers build when their cargo is full, otherwise walk toward the nearest
    collectable resource (ties broken row-major); when night approaches they
    route to the nearest friendly CityTile, depositing their cargo as fuel.
    CityTiles build Workers while the unit cap allows, then research.
    """

    name = "greedy"
    # Turn-in-cycle after which workers head home to deposit and shelter.
    HOME_BY = 24

    def act(self, state: GameState, team: int) -> list:
        c = state.constants
        rp = state.teams[team].research_points
        collectable = {
            RESOURCE_CODES[kind]
            for kind in RESOURCES
            if rp >= c.research_prereq[kind]
        }
        resource_cells = [
            (x, y)
            for y in range(state.height)
            for x in range(state.width)
            if state.res_kind[y, x] in collectable and state.res_amt[y, x] > 0
        ]
        home_cells = sorted(
            (pos for pos, ct in state.citytiles.items() if ct.team == team),
            key=lambda p: (p[1], p[0]),
        )
        going_home = (state.turn % c.cycle_length) >= self.HOME_BY

        actions = []
        claimed: set = set()  # cells own workers intend to occupy this turn
        for uid in sorted(state.units):
            unit = state.units[uid]
            if unit.team != team or not unit.can_act():
                continue
            if unit.kind != WORKER:
                continue
            mask = unit_mask(state, unit)
            action = self._worker_action(
                state, unit, mask, resource_cells, home_cells, going_home, claimed
            )
            if action is not None:
                actions.append(action)

        for pos in sorted(state.citytiles, key=lambda p: (p[1], p[0])):
            tile = state.citytiles[pos]
            if tile.team != team or not tile.can_act():
                continue
            mask = citytile_mask(state, tile)
            if mask[0]:
                actions.append(Action("citytile", BUILD_WORKER, pos=pos))
            elif mask[2]:
                actions.append(Action("citytile", RESEARCH, pos=pos))
        return actions

    def _worker_action(
        self, state, unit, mask, resource_cells, home_cells, going_home, claimed
    ):
        c = state.constants
        full = unit.cargo_total >= c.unit_capacity(unit.kind)
        on_resource = state.res_kind[unit.y, unit.x] != 0
        if full and mask[5]:
            return Action("unit", BUILD_CITY, unit_id=unit.id)
        if full:
            # walk to the nearest empty cell to found a CityTile on
            target = self._nearest(
                state,
                unit,
                [
                    (x, y)
                    for y in range(state.height)
                    for x in range(state.width)
                    if state.res_kind[y, x] == 0
                    and (x, y) not in state.citytiles
                    and not state.units_at(x, y)
                ],
            )
        elif going_home and unit.cargo_total > 0 and home_cells:
            target = self._nearest(state, unit, home_cells)
        else:
            target = self._nearest(state, unit, resource_cells)
            if target is not None and self._adjacent_to_resource(state, unit):
                return None  # stay put and let automatic collection run
        if target is None or target == (unit.x, unit.y):
            return None
        return self._step_toward(state, unit, mask, target, claimed)

    @staticmethod
    def _adjacent_to_resource(state, unit) -> bool:
        rp = state.teams[unit.team].research_points
        c = state.constants
        for dx, dy in ((0, 0), (0, -1), (1, 0), (0, 1), (-1, 0)):
            x, y = unit.x + dx, unit.y + dy
            if not state.in_bounds(x, y):
                continue
            code = state.res_kind[y, x]
            if code and state.res_amt[y, x] > 0:
                kind = RESOURCES[code - 1]
                if rp >= c.research_prereq[kind]:
                    return True
        return False

    @staticmethod
    def _nearest(state, unit, cells):
        best = None
        best_key = None
        for (x, y) in cells:
            d = abs(x - unit.x) + abs(y - unit.y)
            key = (d, y, x)  # row-major tie-break
            if best_key is None or key < best_key:
                best, best_key = (x, y), key
        return best

    @staticmethod
    def _step_toward(state, unit, mask, target, claimed):
        tx, ty = target
        options = []
        for i, direction in enumerate(("N", "E", "S", "W")):
            if not mask[i]:
                continue
            dx, dy = DIR_DELTAS[direction]
            x, y = unit.x + dx, unit.y + dy
            if (x, y) in claimed and (x, y) not in state.citytiles:
                continue
            d = abs(tx - x) + abs(ty - y)
            options.append((d, i, direction, (x, y)))
        if not options:
            return None
        options.sort()
        d, _, direction, cell = options[0]
        if d >= abs(tx - unit.x) + abs(ty - unit.y):
            return None  # no progress available; wait
        claimed.add(cell)
        return Action("unit", MOVE, unit_id=unit.id, direction=direction)


def make_agent(spec: str) -> Agent:
    """Build an agent from its CLI name.

    Builtins: ``null``, ``random[:seed]``, ``greedy``.  Anything prefixed
    ``external:`` launches the given command speaking the stdio protocol.
    """
    if spec == "null":
        return NullAgent()
    if spec == "greedy":
        return GreedyAgent()
    if spec == "random" or spec.startswith("random:"):
        seed = int(spec.partition(":")[2]) if ":" in spec else 0
        return RandomAgent(seed)
    if spec.startswith("external:"):
        from .protocol import ExternalAgent

        return ExternalAgent(spec.partition(":")[2])
    raise ValueError(f"unknown agent: {spec!r}")
