"""Rule constants and pure rule queries.

All tunable numbers of the game live in one :class:`RuleConstants` record so a
variant ruleset is a config file away.  Constants can be overridden from a
plain ``key=value`` text file (see :func:`load_constants`).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

# Team indices.
TEAM_A = 0
TEAM_B = 1
TEAM_NAMES = ("A", "B")

# Unit kinds.
WORKER = 0
CART = 1
UNIT_KIND_NAMES = ("worker", "cart")

# Resource kinds, in increasing fuel efficiency.  0 on the board means "no
# resource"; the names index this tuple directly.
WOOD = "wood"
COAL = "coal"
URANIUM = "uranium"
RESOURCES = (WOOD, COAL, URANIUM)

# Collection iterates most-efficient resource first.
COLLECTION_ORDER = (URANIUM, COAL, WOOD)
# Night consumption burns the least efficient resource first.
NIGHT_BURN_ORDER = (WOOD, COAL, URANIUM)

DEFAULT_MAP_SIZES = (12, 16, 24, 32)
OVERSIZE_MAP_SIZES = (48, 64, 128)


@dataclass(frozen=True)
class RuleConstants:
    """Every rule number of the game in one immutable record."""

    fuel_value: dict = field(
        default_factory=lambda: {WOOD: 1, COAL: 10, URANIUM: 40}
    )
    collection_rate: dict = field(
        default_factory=lambda: {WOOD: 20, COAL: 5, URANIUM: 2}
    )
    research_prereq: dict = field(
        default_factory=lambda: {WOOD: 0, COAL: 50, URANIUM: 200}
    )

    citytile_cooldown: int = 10
    worker_cooldown: int = 2
    cart_cooldown: int = 3
    # At night the cooldown gained from acting is multiplied by this factor.
    night_cooldown_factor: int = 2

    worker_capacity: int = 100
    cart_capacity: int = 2000

    # Fuel burned per night turn by units outside a friendly CityTile.  The
    # defaults follow the worked night-consumption example (and the original
    # game); see the README for the variant override.
    worker_upkeep: int = 4
    cart_upkeep: int = 10

    city_upkeep_base: int = 23
    city_upkeep_discount: int = 5  # per 4-adjacent friendly CityTile

    wood_regrowth_rate: float = 0.025
    wood_regrowth_cap: int = 500

    road_per_cart_stop: float = 0.75
    road_pillage: float = 0.5
    road_max: float = 6.0

    cycle_length: int = 40
    day_length: int = 30
    episode_length: int = 360
    research_cap: int = 200

    turn_time_budget_s: float = 3.0
    time_pool_s: float = 60.0

    @property
    def night_length(self) -> int:
        return self.cycle_length - self.day_length

    def unit_base_cooldown(self, kind: int) -> int:
        return self.worker_cooldown if kind == WORKER else self.cart_cooldown

    def unit_capacity(self, kind: int) -> int:
        return self.worker_capacity if kind == WORKER else self.cart_capacity

    def unit_upkeep(self, kind: int) -> int:
        return self.worker_upkeep if kind == WORKER else self.cart_upkeep

    def validate(self) -> None:
        if not 0 < self.day_length < self.cycle_length:
            raise ValueError("day_length must lie strictly inside the cycle")
        if self.episode_length != 9 * self.cycle_length:
            raise ValueError("episode_length must be 9 cycles")
        for name, table in (
            ("fuel_value", self.fuel_value),
            ("collection_rate", self.collection_rate),
        ):
            for kind in RESOURCES:
                if table[kind] <= 0:
                    raise ValueError(f"{name}[{kind}] must be positive")
        if self.research_prereq[WOOD] != 0:
            raise ValueError("wood must need no research")

    def as_flat_dict(self) -> dict:
        """Flat ``key -> value`` view using dotted keys for the tables."""
        out = {}
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if isinstance(value, dict):
                for kind in RESOURCES:
                    out[f"{f.name}.{kind}"] = value[kind]
            else:
                out[f.name] = value
        return out


def constants_from_flat_dict(entries: dict) -> RuleConstants:
    """Build a RuleConstants from dotted ``key -> value`` entries.

    Unknown keys raise, so typos in config files fail loudly.
    """
    base = RuleConstants()
    kwargs: dict = {}
    tables = {"fuel_value", "collection_rate", "research_prereq"}
    for key, raw in entries.items():
        if "." in key:
            table, _, kind = key.partition(".")
            if table not in tables or kind not in RESOURCES:
                raise KeyError(f"unknown constants key: {key}")
            kwargs.setdefault(table, dict(getattr(base, table)))[kind] = int(raw)
        else:
            fields = {f.name: f for f in dataclasses.fields(RuleConstants)}
            if key not in fields or key in tables:
                raise KeyError(f"unknown constants key: {key}")
            current = getattr(base, key)
            kwargs[key] = type(current)(raw)
    constants = dataclasses.replace(base, **kwargs)
    constants.validate()
    return constants


def load_constants(path: str) -> RuleConstants:
    """Load constants overrides from a ``key=value`` text file.

    Blank lines and ``#`` comments are ignored.  Keys not present keep their
    defaults.
    """
    entries: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, _, value = line.partition("=")
            entries[key.strip()] = value.strip()
    return constants_from_flat_dict(entries)


def is_night(turn: int, constants: RuleConstants | None = None) -> bool:
    """True on night turns (the last 10 turns of each 40-turn cycle)."""
    c = constants or _DEFAULTS
    if not 0 <= turn < c.episode_length:
        raise ValueError(f"turn {turn} outside [0, {c.episode_length})")
    return (turn % c.cycle_length) >= c.day_length


def night_turns_remaining(turn: int, constants: RuleConstants | None = None) -> int:
    """Night turns left in the current cycle; the full night while it is day."""
    c = constants or _DEFAULTS
    t = turn % c.cycle_length
    if t < c.day_length:
        return c.night_length
    return c.cycle_length - t


def fuel_value(kind: str, amount: int, constants: RuleConstants | None = None) -> int:
    """Fuel obtained by converting `amount` units of a resource."""
    if amount < 0:
        raise ValueError("amount must be non-negative")
    c = constants or _DEFAULTS
    return amount * c.fuel_value[kind]


def city_tile_upkeep(n_adj: int, constants: RuleConstants | None = None) -> int:
    """Per-night fuel cost of one CityTile with `n_adj` adjacent friendly tiles."""
    if not 0 <= n_adj <= 4:
        raise ValueError("n_adj must be in [0, 4]")
    c = constants or _DEFAULTS
    return c.city_upkeep_base - c.city_upkeep_discount * n_adj


_DEFAULTS = RuleConstants()
