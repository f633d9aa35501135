"""Discrete actions, the canonical channel layout, and the text wire form.

Channel layout (frozen wire contract):

* Worker, 19 channels: 0-4 move N/E/S/W/C, 5 build CityTile, 6 pillage,
  7-18 transfer (direction N/E/S/W x resource wood/coal/uranium).
* Cart, 17 channels: 0-4 move, 5-16 transfer.
* CityTile, 4 channels: 0 build worker, 1 build cart, 2 research, 3 noop.
"""

from __future__ import annotations

from dataclasses import dataclass

from .rules import RESOURCES, WORKER
from .state import DIRECTIONS

WORKER_CHANNELS = 19
CART_CHANNELS = 17
CITYTILE_CHANNELS = 4

MOVE_DIR_ORDER = ("N", "E", "S", "W", "C")

# Verbs
MOVE = "move"
BUILD_CITY = "build_city"
PILLAGE = "pillage"
TRANSFER = "transfer"
BUILD_WORKER = "build_worker"
BUILD_CART = "build_cart"
RESEARCH = "research"
NOOP = "noop"


class ActionParseError(ValueError):
    pass


@dataclass(frozen=True)
class Action:
    """One order for one unit or CityTile."""

    actor: str  # "unit" | "citytile"
    verb: str
    unit_id: int | None = None
    pos: tuple | None = None  # citytile (x, y)
    direction: str | None = None
    resource: str | None = None

    def to_text(self) -> str:
        if self.actor == "unit":
            if self.verb == MOVE:
                return f"u {self.unit_id} move {self.direction}"
            if self.verb == BUILD_CITY:
                return f"u {self.unit_id} bcity"
            if self.verb == PILLAGE:
                return f"u {self.unit_id} pillage"
            if self.verb == TRANSFER:
                return f"u {self.unit_id} transfer {self.direction} {self.resource}"
        else:
            x, y = self.pos
            short = {
                BUILD_WORKER: "bworker",
                BUILD_CART: "bcart",
                RESEARCH: "research",
                NOOP: "noop",
            }[self.verb]
            return f"ct {x} {y} {short}"
        raise ValueError(f"unencodable action: {self}")


def parse_action(text: str) -> Action:
    parts = text.split()
    try:
        if parts[0] == "u":
            uid = int(parts[1])
            verb = parts[2]
            if verb == "move":
                direction = parts[3]
                if direction not in MOVE_DIR_ORDER:
                    raise ActionParseError(f"bad direction: {direction}")
                return Action("unit", MOVE, unit_id=uid, direction=direction)
            if verb == "bcity":
                return Action("unit", BUILD_CITY, unit_id=uid)
            if verb == "pillage":
                return Action("unit", PILLAGE, unit_id=uid)
            if verb == "transfer":
                direction, resource = parts[3], parts[4]
                if direction not in DIRECTIONS:
                    raise ActionParseError(f"bad transfer direction: {direction}")
                if resource not in RESOURCES:
                    raise ActionParseError(f"bad resource: {resource}")
                return Action(
                    "unit", TRANSFER, unit_id=uid, direction=direction, resource=resource
                )
        elif parts[0] == "ct":
            x, y = int(parts[1]), int(parts[2])
            verb = {
                "bworker": BUILD_WORKER,
                "bcart": BUILD_CART,
                "research": RESEARCH,
                "noop": NOOP,
            }[parts[3]]
            return Action("citytile", verb, pos=(x, y))
    except ActionParseError:
        raise
    except (IndexError, ValueError, KeyError):
        pass
    raise ActionParseError(f"unparseable action: {text!r}")


def unit_channel_count(kind: int) -> int:
    return WORKER_CHANNELS if kind == WORKER else CART_CHANNELS


def unit_channel_to_action(kind: int, channel: int, unit_id: int) -> Action:
    """Translate a policy head channel index into an Action."""
    n = unit_channel_count(kind)
    if not 0 <= channel < n:
        raise ValueError(f"channel {channel} out of range for kind {kind}")
    if channel < 5:
        return Action("unit", MOVE, unit_id=unit_id, direction=MOVE_DIR_ORDER[channel])
    if kind == WORKER:
        if channel == 5:
            return Action("unit", BUILD_CITY, unit_id=unit_id)
        if channel == 6:
            return Action("unit", PILLAGE, unit_id=unit_id)
        base = 7
    else:
        base = 5
    idx = channel - base
    return Action(
        "unit",
        TRANSFER,
        unit_id=unit_id,
        direction=DIRECTIONS[idx // 3],
        resource=RESOURCES[idx % 3],
    )


def unit_action_to_channel(action: Action, kind: int) -> int:
    if action.verb == MOVE:
        return MOVE_DIR_ORDER.index(action.direction)
    if kind == WORKER:
        if action.verb == BUILD_CITY:
            return 5
        if action.verb == PILLAGE:
            return 6
        base = 7
    else:
        base = 5
    if action.verb != TRANSFER:
        raise ValueError(f"verb {action.verb} illegal for unit kind {kind}")
    return base + DIRECTIONS.index(action.direction) * 3 + RESOURCES.index(action.resource)


CITYTILE_VERBS = (BUILD_WORKER, BUILD_CART, RESEARCH, NOOP)


def citytile_channel_to_action(channel: int, pos: tuple) -> Action:
    if not 0 <= channel < CITYTILE_CHANNELS:
        raise ValueError(f"citytile channel {channel} out of range")
    return Action("citytile", CITYTILE_VERBS[channel], pos=pos)


def citytile_action_to_channel(action: Action) -> int:
    return CITYTILE_VERBS.index(action.verb)
