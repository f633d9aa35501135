"""Observation tensor encoding and per-cell action-map decoding.

The observation is a triple:

* ``global_onehot`` (51): cycle index one-hot (9) + turn-in-cycle one-hot
  (40) + night flag one-hot (2).  Exactly three ones.
* ``global_scalars`` (18): normalized team statistics, own team first.
* ``planes`` (OBS_PLANE_COUNT x H x W): per-cell features, plane order fixed
  below as a stable wire contract (OBS_LAYOUT_VERSION bumps on any change).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .actions import (
    Action,
    MOVE,
    NOOP,
    citytile_channel_to_action,
    unit_channel_to_action,
)
from .masks import ActionMask
from .rules import COAL, URANIUM, WOOD, WORKER, is_night, night_turns_remaining
from .state import GameState, RESOURCE_CODES

logger = logging.getLogger(__name__)

OBS_LAYOUT_VERSION = 1
GLOBAL_ONEHOT_DIM = 51
GLOBAL_SCALAR_DIM = 18

PLANE_NAMES = (
    "no_worker",
    "own_worker",
    "enemy_worker",
    "no_cart",
    "own_cart",
    "enemy_cart",
    "no_citytile",
    "own_citytile",
    "enemy_citytile",
    "road_level",
    "worker_cooldown",
    "worker_can_act",
    "cart_cooldown",
    "cart_can_act",
    "citytile_cooldown",
    "citytile_can_act",
    "is_resource",
    "wood_amount",
    "wood_can_regrow",
    "coal_amount",
    "uranium_amount",
    "worker_cargo_wood",
    "worker_cargo_coal",
    "worker_cargo_uranium",
    "worker_cargo_full",
    "cart_cargo_wood",
    "cart_cargo_coal",
    "cart_cargo_uranium",
    "citytile_fuel_cost",
    "citytile_avg_fuel",
    "citytile_survives_tonight",
    "citytile_fuel_needed",
    "worker_at_citytile",
    "cart_at_citytile",
    "x_rel",
    "y_rel",
)
OBS_PLANE_COUNT = len(PLANE_NAMES)
PLANE_INDEX = {name: i for i, name in enumerate(PLANE_NAMES)}


@dataclass
class Observation:
    global_onehot: np.ndarray  # (51,) float32
    global_scalars: np.ndarray  # (18,) float32
    planes: np.ndarray  # (OBS_PLANE_COUNT, h, w) float32


def encode_observation(state: GameState, team: int) -> Observation:
    """Encode the state from one team's perspective (own/enemy swapped)."""
    c = state.constants
    enemy = 1 - team
    onehot = np.zeros(GLOBAL_ONEHOT_DIM, dtype=np.float32)
    cycle, in_cycle = divmod(state.turn, c.cycle_length)
    onehot[min(cycle, 8)] = 1.0
    onehot[9 + in_cycle] = 1.0
    onehot[49 + (1 if is_night(state.turn, c) else 0)] = 1.0

    tiles = [state.team_citytile_count(0), state.team_citytile_count(1)]
    units = [state.team_unit_count(0), state.team_unit_count(1)]
    rp = [state.teams[0].research_points, state.teams[1].research_points]
    fuel = [state.team_fuel(0), state.team_fuel(1)]
    cost = [0, 0]
    for pos, tile in state.citytiles.items():
        cost[tile.team] += state.tile_upkeep(*pos)
    avg_fuel = [fuel[t] / tiles[t] if tiles[t] else 0.0 for t in (0, 1)]
    avg_cost = [cost[t] / tiles[t] if tiles[t] else 0.0 for t in (0, 1)]
    coal_ok = [rp[t] >= c.research_prereq[COAL] for t in (0, 1)]
    uran_ok = [rp[t] >= c.research_prereq[URANIUM] for t in (0, 1)]
    scalars = np.array(
        [
            tiles[team] / 100,
            tiles[enemy] / 100,
            units[team] / 100,
            units[enemy] / 100,
            rp[team] / 200,
            rp[enemy] / 200,
            fuel[team] / 2300,
            fuel[enemy] / 2300,
            avg_fuel[team] / 230,
            avg_fuel[enemy] / 230,
            cost[team] / 230,
            cost[enemy] / 230,
            avg_cost[team] / 23,
            avg_cost[enemy] / 23,
            float(coal_ok[team]),
            float(coal_ok[enemy]),
            float(uran_ok[team]),
            float(uran_ok[enemy]),
        ],
        dtype=np.float32,
    )

    h, w = state.height, state.width
    p = np.zeros((OBS_PLANE_COUNT, h, w), dtype=np.float32)
    ix = PLANE_INDEX
    p[ix["no_worker"]] = 1.0
    p[ix["no_cart"]] = 1.0
    p[ix["no_citytile"]] = 1.0

    wood_code = RESOURCE_CODES[WOOD]
    res_mask = state.res_kind != 0
    p[ix["is_resource"]][res_mask] = 1.0
    p[ix["wood_amount"]] = np.where(state.res_kind == wood_code, state.res_amt, 0) / 100
    p[ix["wood_can_regrow"]] = (
        (state.res_kind == wood_code)
        & (state.res_amt > 0)
        & (state.res_amt < c.wood_regrowth_cap)
    ).astype(np.float32)
    p[ix["coal_amount"]] = (
        np.where(state.res_kind == RESOURCE_CODES[COAL], state.res_amt, 0) / 100
    )
    p[ix["uranium_amount"]] = (
        np.where(state.res_kind == RESOURCE_CODES[URANIUM], state.res_amt, 0) / 100
    )
    p[ix["road_level"]] = state.road / c.road_max

    night_left = night_turns_remaining(state.turn, c)
    for pos, tile in state.citytiles.items():
        x, y = pos
        p[ix["no_citytile"], y, x] = 0.0
        key = "own_citytile" if tile.team == team else "enemy_citytile"
        p[ix[key], y, x] = 1.0
        p[ix["road_level"], y, x] = 1.0
        p[ix["citytile_cooldown"], y, x] = tile.cooldown / 10
        p[ix["citytile_can_act"], y, x] = float(tile.can_act())
        upkeep = state.tile_upkeep(x, y)
        p[ix["citytile_fuel_cost"], y, x] = upkeep / 100
        city = state.cities[tile.city_id]
        p[ix["citytile_avg_fuel"], y, x] = city.fuel / len(city.tiles) / 230
        needed = max(0, state.city_upkeep(city) * night_left - city.fuel)
        p[ix["citytile_fuel_needed"], y, x] = needed / 230
        p[ix["citytile_survives_tonight"], y, x] = float(needed == 0)

    # Per-cell unit planes describe the lowest-id unit of each kind there.
    for uid in sorted(state.units):
        unit = state.units[uid]
        x, y = unit.x, unit.y
        at_city = (x, y) in state.citytiles
        if unit.kind == WORKER:
            if p[ix["no_worker"], y, x] == 0.0:
                continue
            p[ix["no_worker"], y, x] = 0.0
            key = "own_worker" if unit.team == team else "enemy_worker"
            p[ix[key], y, x] = 1.0
            p[ix["worker_cooldown"], y, x] = unit.cooldown / 10
            p[ix["worker_can_act"], y, x] = float(unit.can_act())
            p[ix["worker_cargo_wood"], y, x] = unit.wood / 100
            p[ix["worker_cargo_coal"], y, x] = unit.coal / 100
            p[ix["worker_cargo_uranium"], y, x] = unit.uranium / 100
            p[ix["worker_cargo_full"], y, x] = float(
                unit.cargo_total >= c.worker_capacity
            )
            p[ix["worker_at_citytile"], y, x] = float(at_city)
        else:
            if p[ix["no_cart"], y, x] == 0.0:
                continue
            p[ix["no_cart"], y, x] = 0.0
            key = "own_cart" if unit.team == team else "enemy_cart"
            p[ix[key], y, x] = 1.0
            p[ix["cart_cooldown"], y, x] = unit.cooldown / 10
            p[ix["cart_can_act"], y, x] = float(unit.can_act())
            p[ix["cart_cargo_wood"], y, x] = unit.wood / 100
            p[ix["cart_cargo_coal"], y, x] = unit.coal / 100
            p[ix["cart_cargo_uranium"], y, x] = unit.uranium / 100
            p[ix["cart_at_citytile"], y, x] = float(at_city)

    xs = (np.arange(w, dtype=np.float32) - (w - 1) / 2) / w
    ys = (np.arange(h, dtype=np.float32) - (h - 1) / 2) / h
    p[ix["x_rel"]] = np.broadcast_to(xs, (h, w))
    p[ix["y_rel"]] = np.broadcast_to(ys[:, None], (h, w))
    return Observation(onehot, scalars, p)


@dataclass
class ActionMaps:
    """Per-cell channel choices emitted by a pixel-to-pixel policy."""

    worker: np.ndarray  # (h, w) int
    cart: np.ndarray  # (h, w) int
    citytile: np.ndarray  # (h, w) int


def decode_action_maps(
    maps: ActionMaps, state: GameState, team: int, mask: ActionMask
) -> list:
    """Translate per-cell channel choices into engine actions.

    Only cells holding an own actor are read.  A chosen channel that fails
    the valid-action mask decodes to the safe default (move Center / noop)
    and is logged, so the result never contains an engine-rejected action.
    """
    shape = (state.height, state.width)
    for name, arr in (("worker", maps.worker), ("cart", maps.cart), ("citytile", maps.citytile)):
        if arr.shape != shape:
            raise ValueError(f"{name} map shape {arr.shape} != board {shape}")
    actions: list[Action] = []
    for ids, plane, choices in (
        (mask.worker_ids, mask.worker, maps.worker),
        (mask.cart_ids, mask.cart, maps.cart),
    ):
        for (x, y), uid in sorted(ids.items(), key=lambda kv: kv[1]):
            channel = int(choices[y, x])
            kind = state.units[uid].kind
            if not 0 <= channel < plane.shape[2]:
                raise ValueError(f"channel {channel} out of range at ({x},{y})")
            if not plane[y, x, channel]:
                logger.debug(
                    "masked channel %d for unit %d at (%d,%d); using Center",
                    channel, uid, x, y,
                )
                actions.append(Action("unit", MOVE, unit_id=uid, direction="C"))
            else:
                actions.append(unit_channel_to_action(kind, channel, uid))
    for pos, tile in sorted(state.citytiles.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        if tile.team != team:
            continue
        x, y = pos
        channel = int(maps.citytile[y, x])
        if not 0 <= channel < mask.citytile.shape[2]:
            raise ValueError(f"citytile channel {channel} out of range at ({x},{y})")
        if not mask.citytile[y, x, channel]:
            logger.debug("masked channel %d for citytile (%d,%d); using noop", channel, x, y)
            actions.append(Action("citytile", NOOP, pos=pos))
        else:
            actions.append(citytile_channel_to_action(channel, pos))
    return actions
