"""Replay files: seed, map, config, per-turn actions, per-turn checksums.

A replay is sufficient for bit-exact re-simulation: the header carries the
constants snapshot and the serialized map, the body both teams' action texts
per turn, the footer the outcome and a checksum of the state after every
turn.  Verification replays the body and compares every checksum.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .actions import parse_action
from .engine import initial_state, resolve_turn
from .mapgen import parse_map, serialize_map
from .rules import RuleConstants, constants_from_flat_dict
from .state import GameState, Outcome

REPLAY_FORMAT_VERSION = 1
ENGINE_VERSION = "1.0.0"


def state_checksum(state: GameState) -> str:
    """Stable SHA-256 over a canonical state serialization.

    Units are ordered by id, CityTiles row-major, board cells row-major; any
    single-bit divergence between two simulations flips the digest.
    """
    parts = [
        f"t{state.turn}",
        f"rp{state.teams[0].research_points},{state.teams[1].research_points}",
    ]
    for uid in sorted(state.units):
        u = state.units[uid]
        parts.append(
            f"u{u.id}:{u.team}:{u.kind}:{u.x}:{u.y}:{u.cooldown}:{u.wood}:{u.coal}:{u.uranium}"
        )
    for pos in sorted(state.citytiles, key=lambda p: (p[1], p[0])):
        ct = state.citytiles[pos]
        parts.append(f"c{ct.x}:{ct.y}:{ct.team}:{ct.cooldown}:{ct.city_id}")
    for cid in sorted(state.cities):
        city = state.cities[cid]
        parts.append(f"C{cid}:{city.team}:{city.fuel}")
    kind = state.res_kind
    amt = state.res_amt
    road = state.road
    for y in range(state.height):
        for x in range(state.width):
            if kind[y, x] or road[y, x]:
                parts.append(f"b{x}:{y}:{kind[y, x]}:{amt[y, x]}:{road[y, x]}")
    blob = ";".join(parts).encode()
    return hashlib.sha256(blob).hexdigest()


@dataclass
class Replay:
    constants: RuleConstants
    map_text: str
    agents: tuple  # (name A, name B)
    seed: int
    turns: list  # [{"A": [action texts], "B": [...]}, ...]
    checksums: list  # state checksum after each turn
    outcome: Outcome | None = None
    metrics: dict | None = None

    def to_json(self) -> str:
        doc = {
            "format_version": REPLAY_FORMAT_VERSION,
            "engine_version": ENGINE_VERSION,
            "constants": {
                k: v for k, v in sorted(self.constants.as_flat_dict().items())
            },
            "map": json.loads(self.map_text),
            "agents": list(self.agents),
            "seed": self.seed,
            "turns": self.turns,
            "outcome": self.outcome.to_dict() if self.outcome else None,
            "checksums": self.checksums,
            "metrics": self.metrics,
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"

    @staticmethod
    def from_json(text: str) -> "Replay":
        doc = json.loads(text)
        version = doc.get("format_version")
        if version != REPLAY_FORMAT_VERSION:
            raise ValueError(
                f"replay format version {version} unsupported "
                f"(this engine reads version {REPLAY_FORMAT_VERSION})"
            )
        outcome = None
        if doc.get("outcome"):
            o = doc["outcome"]
            outcome = Outcome(
                o["winner"], o["reason"], tuple(o["citytiles"]), tuple(o["units"]), o["turn"]
            )
        return Replay(
            constants=constants_from_flat_dict(doc["constants"]),
            map_text=json.dumps(doc["map"], separators=(",", ":")) + "\n",
            agents=tuple(doc["agents"]),
            seed=doc["seed"],
            turns=doc["turns"],
            checksums=doc["checksums"],
            outcome=outcome,
            metrics=doc.get("metrics"),
        )


@dataclass
class VerifyResult:
    ok: bool
    first_divergent_turn: int | None = None
    detail: str = ""


def resimulate(replay: Replay):
    """Yield (turn_index, state, events) replaying the recorded actions."""
    game_map = parse_map(replay.map_text, allow_oversize=True)
    state = initial_state(game_map, replay.constants)
    for i, turn in enumerate(replay.turns):
        actions_a = [parse_action(t) for t in turn["A"]]
        actions_b = [parse_action(t) for t in turn["B"]]
        events = resolve_turn(state, actions_a, actions_b)
        yield i, state, events


def verify_replay(replay: Replay) -> VerifyResult:
    """Re-simulate and compare every per-turn checksum."""
    if len(replay.checksums) != len(replay.turns):
        return VerifyResult(False, None, "checksum count differs from turn count")
    for i, state, _events in resimulate(replay):
        actual = state_checksum(state)
        if actual != replay.checksums[i]:
            return VerifyResult(
                False, i, f"checksum mismatch at turn {i}: {actual} != {replay.checksums[i]}"
            )
    return VerifyResult(True)


def dump_replay(replay: Replay) -> str:
    """Human-readable per-turn dump: one block per turn plus a header block."""
    game_map = parse_map(replay.map_text, allow_oversize=True)
    out = [
        f"replay: agents={replay.agents} seed={replay.seed} "
        f"size={game_map.width} turns={len(replay.turns)}"
    ]
    for i, state, events in resimulate(replay):
        lines = [f"-- turn {i} --"]
        lines.append(
            f"tiles A={state.team_citytile_count(0)} B={state.team_citytile_count(1)} "
            f"units A={state.team_unit_count(0)} B={state.team_unit_count(1)} "
            f"fuel A={state.team_fuel(0)} B={state.team_fuel(1)}"
        )
        for team, text, reason in events.dropped:
            lines.append(f"dropped [{'AB'[team]}] {text}: {reason}")
        for uid, origin, dest in events.moves:
            lines.append(f"move u{uid} {origin}->{dest}")
        for uid, reason in events.cancelled_moves:
            lines.append(f"cancelled u{uid}: {reason}")
        for team, kind, uid, x, y in events.units_built:
            lines.append(f"built unit u{uid} [{'AB'[team]}] at ({x},{y})")
        for team, x, y, uid in events.citytiles_built:
            lines.append(f"built citytile [{'AB'[team]}] at ({x},{y})")
        for team, kind, uid, x, y in events.unit_deaths:
            lines.append(f"death u{uid} [{'AB'[team]}] at ({x},{y})")
        for team, cid, tiles in events.city_deaths:
            lines.append(f"city {cid} [{'AB'[team]}] fell: {len(tiles)} tiles")
        out.append("\n".join(lines))
    if replay.outcome:
        out.append(f"outcome: {replay.outcome.winner} ({replay.outcome.reason})")
    return "\n".join(out) + "\n"
