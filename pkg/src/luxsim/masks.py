"""Action validation and per-team valid-action masks.

``validate_action`` and the masks are two views of one predicate: the mask of
an actor is exactly the set of channels whose decoded action validates.  Both
are built on the same per-actor check so they cannot drift apart.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .actions import (
    Action,
    BUILD_CART,
    BUILD_CITY,
    BUILD_WORKER,
    CART_CHANNELS,
    CITYTILE_CHANNELS,
    MOVE,
    NOOP,
    PILLAGE,
    RESEARCH,
    TRANSFER,
    WORKER_CHANNELS,
    citytile_channel_to_action,
    unit_channel_count,
    unit_channel_to_action,
)
from .rules import WORKER
from .state import DIR_DELTAS, CityTile, GameState, Unit

OK = None


def _unit_action_check(state: GameState, unit: Unit, action: Action) -> str | None:
    """None if the action is legal for this unit, else a reason code."""
    c = state.constants
    if action.verb == MOVE and action.direction == "C":
        return OK  # standing still is always allowed
    if not unit.can_act():
        return "cannot-act"
    if action.verb == MOVE:
        dx, dy = DIR_DELTAS[action.direction]
        x, y = unit.x + dx, unit.y + dy
        if not state.in_bounds(x, y):
            return "off-board"
        ct = state.citytile_at(x, y)
        if ct is not None:
            return OK if ct.team == unit.team else "enemy-city"
        if state.units_at(x, y):
            return "occupied"
        return OK
    if action.verb == BUILD_CITY:
        if unit.kind != WORKER:
            return "bad-verb"
        if unit.cargo_total != c.unit_capacity(unit.kind):
            return "insufficient-resources"
        if state.res_kind[unit.y, unit.x] != 0 or (unit.x, unit.y) in state.citytiles:
            return "cell-not-empty"
        return OK
    if action.verb == PILLAGE:
        if unit.kind != WORKER:
            return "bad-verb"
        if (unit.x, unit.y) in state.citytiles:
            return "no-road"  # CityTiles pin their road level
        if state.road[unit.y, unit.x] <= 0:
            return "no-road"
        return OK
    if action.verb == TRANSFER:
        dx, dy = DIR_DELTAS[action.direction]
        x, y = unit.x + dx, unit.y + dy
        target = None
        for uid in state.units_at(x, y) if state.in_bounds(x, y) else ():
            other = state.units[uid]
            if other.team == unit.team:
                target = other
                break
        if target is None:
            return "no-transfer-target"
        if getattr(unit, action.resource) <= 0:
            return "empty-transfer"
        return OK
    return "bad-verb"


def _citytile_action_check(state: GameState, tile: CityTile, action: Action) -> str | None:
    if action.verb == NOOP:
        return OK
    if not tile.can_act():
        return "cannot-act"
    if action.verb in (BUILD_WORKER, BUILD_CART):
        if state.team_unit_count(tile.team) >= state.team_citytile_count(tile.team):
            return "unit-cap"
        return OK
    if action.verb == RESEARCH:
        if state.teams[tile.team].research_points >= state.constants.research_cap:
            return "research-maxed"
        return OK
    return "bad-verb"


def validate_action(state: GameState, action: Action) -> tuple[bool, str | None]:
    """Check one action against the start-of-turn state.

    Returns ``(True, None)`` or ``(False, reason_code)``.
    """
    if action.actor == "unit":
        unit = state.units.get(action.unit_id)
        if unit is None:
            return (False, "unknown-actor")
        reason = _unit_action_check(state, unit, action)
    else:
        tile = state.citytiles.get(tuple(action.pos))
        if tile is None:
            return (False, "unknown-actor")
        reason = _citytile_action_check(state, tile, action)
    return (True, None) if reason is OK else (False, reason)


def unit_mask(state: GameState, unit: Unit) -> np.ndarray:
    """Boolean vector over the unit's action channels."""
    n = unit_channel_count(unit.kind)
    mask = np.zeros(n, dtype=bool)
    for channel in range(n):
        action = unit_channel_to_action(unit.kind, channel, unit.id)
        mask[channel] = _unit_action_check(state, unit, action) is OK
    return mask


def citytile_mask(state: GameState, tile: CityTile) -> np.ndarray:
    mask = np.zeros(CITYTILE_CHANNELS, dtype=bool)
    for channel in range(CITYTILE_CHANNELS):
        action = citytile_channel_to_action(channel, tile.pos())
        mask[channel] = _citytile_action_check(state, tile, action) is OK
    return mask


@dataclass
class ActionMask:
    """Per-cell validity planes for a team's pixel-to-pixel action heads.

    Cells without an own actor of the relevant type are all-False.  When
    several own units of one type stand on a cell (stacked on a CityTile),
    the cell represents the lowest-id one; the others receive no orders
    through the per-cell interface.
    """

    team: int
    worker: np.ndarray  # (h, w, 19) bool
    cart: np.ndarray  # (h, w, 17) bool
    citytile: np.ndarray  # (h, w, 4) bool
    # cell -> unit id represented there, per unit kind
    worker_ids: dict
    cart_ids: dict


def valid_actions(state: GameState, team: int) -> ActionMask:
    h, w = state.height, state.width
    mask = ActionMask(
        team=team,
        worker=np.zeros((h, w, WORKER_CHANNELS), dtype=bool),
        cart=np.zeros((h, w, CART_CHANNELS), dtype=bool),
        citytile=np.zeros((h, w, CITYTILE_CHANNELS), dtype=bool),
        worker_ids={},
        cart_ids={},
    )
    for unit in sorted(
        (u for u in state.units.values() if u.team == team), key=lambda u: u.id
    ):
        plane, ids = (
            (mask.worker, mask.worker_ids)
            if unit.kind == WORKER
            else (mask.cart, mask.cart_ids)
        )
        if (unit.x, unit.y) in ids:
            continue  # stacked: cell already represents the lowest id
        ids[(unit.x, unit.y)] = unit.id
        plane[unit.y, unit.x] = unit_mask(state, unit)
    for pos, tile in state.citytiles.items():
        if tile.team == team:
            mask.citytile[pos[1], pos[0]] = citytile_mask(state, tile)
    return mask
