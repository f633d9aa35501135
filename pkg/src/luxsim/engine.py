"""The turn-resolution state machine.

One turn runs eight steps in a fixed order: CityTile actions, unit actions,
road building, resource collection, resource drops on CityTiles, night
consumption, wood regrowth, cooldown recovery.  ``resolve_turn`` mutates the
given state in place and returns the events log explaining every delta.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import _kernels
from .actions import (
    Action,
    BUILD_CART,
    BUILD_CITY,
    BUILD_WORKER,
    MOVE,
    NOOP,
    PILLAGE,
    RESEARCH,
    TRANSFER,
)
from .mapgen import GameMap
from .masks import validate_action
from .rules import (
    CART,
    COLLECTION_ORDER,
    NIGHT_BURN_ORDER,
    RESOURCES,
    RuleConstants,
    WORKER,
    is_night,
)
from .state import (
    DIR_DELTAS,
    GameState,
    Outcome,
    RESOURCE_CODES,
    team_name,
)


class TurnError(ValueError):
    """Structurally malformed turn input."""


@dataclass
class CollectionReport:
    """Per-kind accounting of one turn's resource collection, in resource units.

    Invariant: removed == delivered + converted + wasted for every kind.
    """

    removed: dict = field(default_factory=lambda: {k: 0 for k in RESOURCES})
    delivered: dict = field(default_factory=lambda: {k: 0 for k in RESOURCES})
    converted: dict = field(default_factory=lambda: {k: 0 for k in RESOURCES})
    wasted: dict = field(default_factory=lambda: {k: 0 for k in RESOURCES})
    # what each team took off the board (delivered + converted), per kind
    team_collected: list = field(
        default_factory=lambda: [{k: 0 for k in RESOURCES}, {k: 0 for k in RESOURCES}]
    )
    # fuel created by CityTile auto-collection, per team
    team_converted_fuel: list = field(default_factory=lambda: [0, 0])

    def check(self) -> None:
        for k in RESOURCES:
            assert (
                self.removed[k]
                == self.delivered[k] + self.converted[k] + self.wasted[k]
            ), f"collection not conserved for {k}: {self}"


@dataclass
class TurnEvents:
    """Everything that happened in one resolved turn."""

    turn: int
    dropped: list = field(default_factory=list)  # (team, action_text, reason)
    skipped_builds: list = field(default_factory=list)  # (x, y)
    units_built: list = field(default_factory=list)  # (team, kind, unit_id, x, y)
    research: list = field(default_factory=lambda: [0, 0])
    transfers: list = field(default_factory=list)  # (src, dst, resource, amount)
    moves: list = field(default_factory=list)  # (unit_id, from, to)
    cancelled_moves: list = field(default_factory=list)  # (unit_id, reason)
    citytiles_built: list = field(default_factory=list)  # (team, x, y, builder_id)
    pillages: list = field(default_factory=list)  # (unit_id, x, y)
    road_changes: list = field(default_factory=list)  # (x, y, new_level)
    collection: CollectionReport = field(default_factory=CollectionReport)
    deposits: list = field(default_factory=list)  # (unit_id, city_id, fuel)
    fuel_deposited: list = field(default_factory=lambda: [0, 0])
    fuel_converted: list = field(default_factory=lambda: [0, 0])
    unit_deaths: list = field(default_factory=list)  # (team, kind, unit_id, x, y)
    city_deaths: list = field(default_factory=list)  # (team, city_id, tiles)
    regrowth: int = 0


def initial_state(game_map: GameMap, constants: RuleConstants) -> GameState:
    """Starting state: the map's resources plus one CityTile + Worker per team."""
    state = GameState(game_map.width, game_map.height, constants)
    for (x, y), (kind, amount) in game_map.resources.items():
        state.res_kind[y, x] = RESOURCE_CODES[kind]
        state.res_amt[y, x] = amount
    for team, x, y in sorted(game_map.spawns):
        state.add_citytile(team, x, y)
        state.add_unit(team, WORKER, x, y)
    state.map_meta = {"axis": game_map.axis}
    return state


def resolve_movement(state: GameState, intents: dict) -> dict:
    """Resolve simultaneous move intents (unit id -> direction N/E/S/W).

    Friendly-CityTile destinations admit any number of movers.  Two or more
    movers into the same bare cell all cancel; a mover into a cell whose
    start-of-turn occupant does not itself move away cancels, and such
    cancellations cascade to a fixpoint.  Cycles of mutually moving units,
    including two-unit swaps, succeed.
    """
    dests = {}
    friendly_city_dest = {}
    for uid, direction in intents.items():
        unit = state.units[uid]
        dx, dy = DIR_DELTAS[direction]
        cell = (unit.x + dx, unit.y + dy)
        dests[uid] = cell
        ct = state.citytiles.get(cell)
        friendly_city_dest[uid] = ct is not None and ct.team == unit.team
    cancelled: dict = {}
    while True:
        changed = False
        by_dest: dict = {}
        for uid, cell in dests.items():
            if uid not in cancelled and not friendly_city_dest[uid]:
                by_dest.setdefault(cell, []).append(uid)
        for cell, ids in by_dest.items():
            if len(ids) >= 2:
                for uid in ids:
                    cancelled[uid] = "collision"
                changed = True
        for uid, cell in dests.items():
            if uid in cancelled or friendly_city_dest[uid]:
                continue
            for occupant in state.units_at(*cell):
                if occupant != uid and (occupant not in dests or occupant in cancelled):
                    cancelled[uid] = "occupied"
                    changed = True
                    break
        if not changed:
            break
    return {
        uid: ("moved", dests[uid]) if uid not in cancelled else ("cancelled", cancelled[uid])
        for uid in intents
    }


def collect_resources(state: GameState) -> CollectionReport:
    """Resolution step 4: automatic mining, iterating uranium, coal, then wood.

    Collectors are Workers standing off CityTiles plus CityTiles hosting at
    least one Worker (which collect at Worker rate and convert straight to
    fuel).  Tiles allocate to simultaneous requests by integer water-filling;
    indivisible remainders and over-capacity grants are wasted.
    """
    c = state.constants
    report = CollectionReport()
    workers = sorted(
        (
            u
            for u in state.units.values()
            if u.kind == WORKER and (u.x, u.y) not in state.citytiles
        ),
        key=lambda u: u.id,
    )
    hosting = sorted(
        (
            tile
            for pos, tile in state.citytiles.items()
            if any(state.units[i].kind == WORKER for i in state.units_at(*pos))
        ),
        key=lambda t: (t.y, t.x),
    )
    for kind in COLLECTION_ORDER:
        code = RESOURCE_CODES[kind]
        prereq = c.research_prereq[kind]
        rate = c.collection_rate[kind]
        tile_requests: dict = {}  # cell -> [(collector_key, amount)]
        spaces: dict = {}

        def adjacent_tiles(x, y):
            cells = []
            for dx, dy in ((0, 0), (0, -1), (1, 0), (0, 1), (-1, 0)):
                cx, cy = x + dx, y + dy
                if (
                    state.in_bounds(cx, cy)
                    and state.res_kind[cy, cx] == code
                    and state.res_amt[cy, cx] > 0
                ):
                    cells.append((cx, cy))
            return cells

        for unit in workers:
            if state.teams[unit.team].research_points < prereq:
                continue
            space = c.unit_capacity(unit.kind) - unit.cargo_total
            if space <= 0:
                continue
            cells = adjacent_tiles(unit.x, unit.y)
            if not cells:
                continue
            per_tile = min(rate, -(-space // len(cells)))
            spaces[("u", unit.id)] = space
            for cell in cells:
                tile_requests.setdefault(cell, []).append((("u", unit.id), per_tile))
        for tile in hosting:
            if state.teams[tile.team].research_points < prereq:
                continue
            cells = adjacent_tiles(tile.x, tile.y)
            for cell in cells:
                tile_requests.setdefault(cell, []).append(
                    (("c", (tile.x, tile.y)), rate)
                )

        grant_totals: dict = {}
        for cell in sorted(tile_requests, key=lambda p: (p[1], p[0])):
            requests = tile_requests[cell]
            amount = int(state.res_amt[cell[1], cell[0]])
            grants, wasted = _kernels.water_fill(amount, [a for _, a in requests])
            removed = sum(grants) + wasted
            state.res_amt[cell[1], cell[0]] = amount - removed
            report.removed[kind] += removed
            report.wasted[kind] += wasted
            for (key, _), grant in zip(requests, grants):
                if grant:
                    grant_totals[key] = grant_totals.get(key, 0) + grant

        for key, total in grant_totals.items():
            if key[0] == "u":
                unit = state.units[key[1]]
                take = min(spaces[key], total)
                setattr(unit, kind, getattr(unit, kind) + take)
                report.delivered[kind] += take
                report.wasted[kind] += total - take
                report.team_collected[unit.team][kind] += take
            else:
                tile = state.citytiles[key[1]]
                fuel = total * c.fuel_value[kind]
                state.cities[tile.city_id].fuel += fuel
                report.converted[kind] += total
                report.team_collected[tile.team][kind] += total
                report.team_converted_fuel[tile.team] += fuel
    return report


def deposit_resources(state: GameState, events: TurnEvents | None = None) -> None:
    """Resolution step 5: units on friendly CityTiles convert cargo to fuel."""
    c = state.constants
    for uid in sorted(state.units):
        unit = state.units[uid]
        tile = state.citytiles.get((unit.x, unit.y))
        if tile is None or tile.team != unit.team:
            continue
        fuel = unit.cargo_fuel(c)
        if fuel <= 0:
            continue
        state.cities[tile.city_id].fuel += fuel
        unit.wood = unit.coal = unit.uranium = 0
        if events is not None:
            events.deposits.append((uid, tile.city_id, fuel))
            events.fuel_deposited[unit.team] += fuel


def apply_night(state: GameState, events: TurnEvents | None = None) -> list:
    """Resolution step 6: fuel burn and darkness deaths on a night turn.

    Units burn whole resource units, least efficient first; a unit that
    cannot cover its upkeep is removed (its cargo vanishes with it).  Unit
    upkeep is evaluated before City removal, so a unit standing on a tile of
    a City that dies this very step is still sheltered tonight.  A City that
    cannot pay the sum of its per-tile upkeeps is removed whole and its
    cells' road levels reset to 0.
    """
    c = state.constants
    if not is_night(state.turn, c):
        raise TurnError(f"apply_night called on day turn {state.turn}")
    deaths = []
    for uid in sorted(state.units):
        unit = state.units[uid]
        tile = state.citytiles.get((unit.x, unit.y))
        if tile is not None and tile.team == unit.team:
            continue
        upkeep = c.unit_upkeep(unit.kind)
        if unit.cargo_fuel(c) < upkeep:
            deaths.append((unit.team, unit.kind, uid, unit.x, unit.y))
            state.remove_unit(uid)
            continue
        need = upkeep
        for kind in NIGHT_BURN_ORDER:
            if need <= 0:
                break
            have = getattr(unit, kind)
            if not have:
                continue
            value = c.fuel_value[kind]
            take = min(have, -(-need // value))
            setattr(unit, kind, have - take)
            need -= take * value
    for cid in sorted(state.cities):
        city = state.cities[cid]
        upkeep = state.city_upkeep(city)
        if city.fuel >= upkeep:
            city.fuel -= upkeep
        else:
            tiles = state.remove_city(cid)
            if events is not None:
                events.city_deaths.append((city.team, cid, tiles))
    if events is not None:
        events.unit_deaths.extend(deaths)
    return deaths


def regrow_wood(state: GameState) -> int:
    """Resolution step 7: live wood cells below the cap regrow by 2.5%, ceil."""
    return _kernels.regrow_wood(
        state.res_kind,
        state.res_amt,
        RESOURCE_CODES["wood"],
        state.constants.wood_regrowth_rate,
        state.constants.wood_regrowth_cap,
    )


def _accept_actions(state: GameState, actions_a, actions_b, events: TurnEvents):
    """Validate both teams' action lists against the start-of-turn state.

    Invalid actions are dropped and logged, never fatal: match play must be
    robust to hostile agents.  Returns (unit_actions, citytile_actions).
    """
    unit_actions: dict = {}
    ct_actions: dict = {}
    for team, submitted in ((0, actions_a), (1, actions_b)):
        if not isinstance(submitted, (list, tuple)):
            raise TurnError(f"team {team_name(team)} actions must be a list")
        for action in submitted:
            if not isinstance(action, Action):
                raise TurnError(f"not an Action: {action!r}")
            ok, reason = validate_action(state, action)
            if ok:
                if action.actor == "unit":
                    owner = state.units[action.unit_id].team
                    key, book = action.unit_id, unit_actions
                else:
                    pos = tuple(action.pos)
                    owner = state.citytiles[pos].team
                    key, book = pos, ct_actions
                if owner != team:
                    ok, reason = False, "not-owned"
                elif key in book:
                    ok, reason = False, "duplicate-actor"
                else:
                    book[key] = action
                    continue
            events.dropped.append((team, action.to_text(), reason))
    return unit_actions, ct_actions


def resolve_turn(state: GameState, actions_a: list, actions_b: list) -> TurnEvents:
    """Advance the state by one full turn.  Mutates `state`; returns events."""
    c = state.constants
    if state.turn >= c.episode_length:
        raise TurnError(f"episode already over at turn {state.turn}")
    events = TurnEvents(turn=state.turn)
    night = is_night(state.turn, c)
    cd_factor = c.night_cooldown_factor if night else 1

    unit_actions, ct_actions = _accept_actions(state, actions_a, actions_b, events)

    # 1. CityTile actions, row-major tile order.
    unit_counts = [state.team_unit_count(0), state.team_unit_count(1)]
    tile_counts = [state.team_citytile_count(0), state.team_citytile_count(1)]
    for pos in sorted(ct_actions, key=lambda p: (p[1], p[0])):
        action = ct_actions[pos]
        if action.verb == NOOP:
            continue
        tile = state.citytiles[pos]
        team = tile.team
        if action.verb in (BUILD_WORKER, BUILD_CART):
            # validated against start of turn; re-check the cap at execution
            if unit_counts[team] >= tile_counts[team]:
                events.skipped_builds.append(pos)
                continue
            kind = WORKER if action.verb == BUILD_WORKER else CART
            unit = state.add_unit(team, kind, *pos)
            unit_counts[team] += 1
            events.units_built.append((team, kind, unit.id, pos[0], pos[1]))
        elif action.verb == RESEARCH:
            ts = state.teams[team]
            ts.research_points = min(c.research_cap, ts.research_points + 1)
            events.research[team] += 1
        tile.cooldown += c.citytile_cooldown * cd_factor

    # 2. Unit actions.
    by_verb: dict = {}
    for uid, action in unit_actions.items():
        by_verb.setdefault(action.verb, {})[uid] = action

    for uid in sorted(by_verb.get(TRANSFER, ())):
        action = by_verb[TRANSFER][uid]
        unit = state.units[uid]
        dx, dy = DIR_DELTAS[action.direction]
        target = None
        for oid in state.units_at(unit.x + dx, unit.y + dy):
            if state.units[oid].team == unit.team:
                target = state.units[oid]
                break
        amount = getattr(unit, action.resource)
        space = c.unit_capacity(target.kind) - target.cargo_total
        moved = min(amount, space)
        setattr(unit, action.resource, amount - moved)
        setattr(target, action.resource, getattr(target, action.resource) + moved)
        events.transfers.append((uid, target.id, action.resource, moved))
        unit.cooldown += c.unit_base_cooldown(unit.kind) * cd_factor

    intents = {}
    for uid, action in by_verb.get(MOVE, {}).items():
        unit = state.units[uid]
        if not unit.can_act():
            continue  # a Center order for a cooling-down unit is a no-op
        if action.direction == "C":
            unit.cooldown += c.unit_base_cooldown(unit.kind) * cd_factor
        else:
            intents[uid] = action.direction
    results = resolve_movement(state, intents)
    for uid in sorted(intents):
        status, detail = results[uid]
        unit = state.units[uid]
        if status == "moved":
            origin = (unit.x, unit.y)
            state.move_unit(uid, *detail)
            unit.cooldown += c.unit_base_cooldown(unit.kind) * cd_factor
            events.moves.append((uid, origin, detail))
        else:
            events.cancelled_moves.append((uid, detail))

    for uid in sorted(by_verb.get(BUILD_CITY, ())):
        unit = state.units[uid]
        if (unit.x, unit.y) in state.citytiles:
            # stacked builders (city-collapse remnants) both validated against
            # the start-of-turn state; only the first build can land
            events.skipped_builds.append((unit.x, unit.y))
            continue
        unit.wood = unit.coal = unit.uranium = 0
        state.add_citytile(unit.team, unit.x, unit.y)
        unit.cooldown += c.unit_base_cooldown(unit.kind) * cd_factor
        events.citytiles_built.append((unit.team, unit.x, unit.y, uid))

    for uid in sorted(by_verb.get(PILLAGE, ())):
        unit = state.units[uid]
        new_level = max(0.0, state.road[unit.y, unit.x] - c.road_pillage)
        state.road[unit.y, unit.x] = new_level
        unit.cooldown += c.unit_base_cooldown(unit.kind) * cd_factor
        events.pillages.append((uid, unit.x, unit.y))
        events.road_changes.append((unit.x, unit.y, new_level))

    # 3. Roads: every Cart ending the step on a bare cell upgrades it.
    for uid in sorted(state.units):
        unit = state.units[uid]
        if unit.kind == CART and (unit.x, unit.y) not in state.citytiles:
            level = min(c.road_max, state.road[unit.y, unit.x] + c.road_per_cart_stop)
            if level != state.road[unit.y, unit.x]:
                state.road[unit.y, unit.x] = level
                events.road_changes.append((unit.x, unit.y, level))

    # 4. Resource collection.
    events.collection = collect_resources(state)
    events.fuel_converted = list(events.collection.team_converted_fuel)

    # 5. Resource drops on CityTiles.
    deposit_resources(state, events)

    # 6. Night consumption.
    if night:
        apply_night(state, events)

    # 7. Wood regrowth.
    events.regrowth = regrow_wood(state)

    # 8. Cooldown recovery: -1, plus the road level under each unit.
    for unit in state.units.values():
        level = state.road_level(unit.x, unit.y)
        unit.cooldown = max(0.0, unit.cooldown - 1.0 - level)
    for tile in state.citytiles.values():
        tile.cooldown = max(0.0, tile.cooldown - 1.0)

    state.turn += 1
    return events


def check_game_end(state: GameState) -> Outcome | None:
    """Outcome once the game is over, else None."""
    tiles = (state.team_citytile_count(0), state.team_citytile_count(1))
    units = (state.team_unit_count(0), state.team_unit_count(1))
    if state.turn >= state.constants.episode_length:
        if tiles[0] != tiles[1]:
            winner = team_name(0 if tiles[0] > tiles[1] else 1)
            return Outcome(winner, "citytile-count", tiles, units, state.turn)
        if units[0] != units[1]:
            winner = team_name(0 if units[0] > units[1] else 1)
            return Outcome(winner, "unit-count", tiles, units, state.turn)
        return Outcome("Draw", "draw", tiles, units, state.turn)
    alive = [tiles[t] > 0 or units[t] > 0 for t in (0, 1)]
    if alive[0] and alive[1]:
        return None
    if not alive[0] and not alive[1]:
        return Outcome("Draw", "draw", tiles, units, state.turn)
    winner = team_name(0 if alive[0] else 1)
    return Outcome(winner, "elimination", tiles, units, state.turn)
