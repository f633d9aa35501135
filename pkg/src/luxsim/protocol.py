"""Stdio line protocol for external agents, with the per-turn time budget.

One JSON message per line.  Handshake: the engine sends ``hello`` carrying
the rule constants and the map-independent state schema version; the agent
answers ``ready``.  Every turn the engine sends the full state document and
a valid-action summary; the agent answers with a list of action texts.

Budget: each reply may take the per-turn limit (3 s) for free; overshoot
drains a per-match pool (60 s).  Once the pool is gone, exceeding the limit
freezes the agent for the rest of the match.
"""

from __future__ import annotations

import json
import logging
import queue
import subprocess
import threading
import time

from .actions import ActionParseError, parse_action
from .agents import Agent
from .masks import citytile_mask, unit_mask
from .rules import RuleConstants, constants_from_flat_dict
from .state import CODE_TO_RESOURCE, GameState, RESOURCE_CODES

logger = logging.getLogger(__name__)

PROTOCOL_VERSION = 1


def state_to_doc(state: GameState) -> dict:
    """Full observation-state document; lossless (see state_from_doc)."""
    resources = []
    roads = []
    for y in range(state.height):
        for x in range(state.width):
            code = int(state.res_kind[y, x])
            if code:
                resources.append(
                    {"x": x, "y": y, "kind": CODE_TO_RESOURCE[code], "amount": int(state.res_amt[y, x])}
                )
            level = float(state.road[y, x])
            if level and (x, y) not in state.citytiles:
                roads.append({"x": x, "y": y, "level": level})
    return {
        "turn": state.turn,
        "width": state.width,
        "height": state.height,
        "research": [state.teams[0].research_points, state.teams[1].research_points],
        "resources": resources,
        "roads": roads,
        "units": [
            {
                "id": u.id,
                "team": u.team,
                "kind": u.kind,
                "x": u.x,
                "y": u.y,
                "cooldown": u.cooldown,
                "cargo": {"wood": u.wood, "coal": u.coal, "uranium": u.uranium},
            }
            for _, u in sorted(state.units.items())
        ],
        "citytiles": [
            {
                "team": ct.team,
                "x": ct.x,
                "y": ct.y,
                "cooldown": ct.cooldown,
                "city_id": ct.city_id,
            }
            for _, ct in sorted(state.citytiles.items(), key=lambda kv: (kv[0][1], kv[0][0]))
        ],
        "cities": [
            {"id": c.id, "team": c.team, "fuel": c.fuel}
            for _, c in sorted(state.cities.items())
        ],
        "next_unit_id": state.next_unit_id,
        "next_city_id": state.next_city_id,
    }


def state_from_doc(doc: dict, constants: RuleConstants) -> GameState:
    """Rebuild a GameState from its document form."""
    state = GameState(doc["width"], doc["height"], constants)
    state.turn = doc["turn"]
    state.teams[0].research_points = doc["research"][0]
    state.teams[1].research_points = doc["research"][1]
    for r in doc["resources"]:
        state.res_kind[r["y"], r["x"]] = RESOURCE_CODES[r["kind"]]
        state.res_amt[r["y"], r["x"]] = r["amount"]
    for r in doc["roads"]:
        state.road[r["y"], r["x"]] = r["level"]
    from .state import City, CityTile, Unit

    for u in doc["units"]:
        unit = Unit(
            u["id"], u["team"], u["kind"], u["x"], u["y"], u["cooldown"],
            u["cargo"]["wood"], u["cargo"]["coal"], u["cargo"]["uranium"],
        )
        state.units[unit.id] = unit
        state.units_by_cell.setdefault((unit.x, unit.y), []).append(unit.id)
    for entry in doc["citytiles"]:
        tile = CityTile(
            entry["team"], entry["x"], entry["y"], entry["cooldown"], entry["city_id"]
        )
        state.citytiles[(tile.x, tile.y)] = tile
        state.road[tile.y, tile.x] = constants.road_max
    for entry in doc["cities"]:
        city = City(entry["id"], entry["team"], entry["fuel"], set())
        state.cities[city.id] = city
    for pos, tile in state.citytiles.items():
        state.cities[tile.city_id].tiles.add(pos)
    state.next_unit_id = doc["next_unit_id"]
    state.next_city_id = doc["next_city_id"]
    return state


def mask_summary(state: GameState, team: int) -> dict:
    """Valid channel indices per own actor, for mask-aware external agents."""
    units = {}
    for uid in sorted(state.units):
        unit = state.units[uid]
        if unit.team == team:
            mask = unit_mask(state, unit)
            units[str(uid)] = [i for i in range(len(mask)) if mask[i]]
    citytiles = {}
    for pos in sorted(state.citytiles, key=lambda p: (p[1], p[0])):
        tile = state.citytiles[pos]
        if tile.team == team:
            mask = citytile_mask(state, tile)
            citytiles[f"{pos[0]},{pos[1]}"] = [i for i in range(len(mask)) if mask[i]]
    return {"units": units, "citytiles": citytiles}


class ExternalAgent(Agent):
    """Adapter running an external agent process over the stdio protocol.

    A frozen agent (crashed, or out of time with an empty pool) submits no
    further actions but its units still live and die by the normal rules.
    """

    def __init__(
        self,
        command: str,
        constants: RuleConstants | None = None,
        turn_limit: float | None = None,
        pool: float | None = None,
    ):
        self.command = command
        self.name = f"external:{command}"
        c = constants or RuleConstants()
        self.turn_limit = turn_limit if turn_limit is not None else c.turn_time_budget_s
        self.pool = pool if pool is not None else c.time_pool_s
        self.frozen = False
        self.proc: subprocess.Popen | None = None
        self._lines: queue.Queue = queue.Queue()
        self._started = False

    # -- process management ------------------------------------------------

    def _start(self, state: GameState, team: int) -> None:
        self._started = True
        try:
            self.proc = subprocess.Popen(
                self.command,
                shell=True,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            logger.warning("external agent failed to launch: %s", exc)
            self.frozen = True
            return
        threading.Thread(target=self._reader, daemon=True).start()
        hello = {
            "type": "hello",
            "version": PROTOCOL_VERSION,
            "team": team,
            "constants": state.constants.as_flat_dict(),
        }
        reply = self._exchange(hello, self.turn_limit + self.pool)
        if reply is None or reply.get("type") != "ready":
            logger.warning("external agent handshake failed; freezing")
            self.frozen = True

    def _reader(self) -> None:
        try:
            for line in self.proc.stdout:
                self._lines.put(line)
        except ValueError:
            pass
        self._lines.put(None)  # EOF sentinel

    def _exchange(self, message: dict, timeout: float) -> dict | None:
        """Send one message and wait for one JSON reply line."""
        try:
            self.proc.stdin.write(json.dumps(message, sort_keys=True) + "\n")
            self.proc.stdin.flush()
        except (OSError, ValueError, AttributeError):
            return None
        try:
            line = self._lines.get(timeout=timeout)
        except queue.Empty:
            return None
        if line is None:
            return None
        try:
            return json.loads(line)
        except json.JSONDecodeError:
            logger.warning("external agent sent malformed JSON line")
            return {}

    # -- Agent interface ---------------------------------------------------

    def act(self, state: GameState, team: int) -> list:
        if not self._started:
            self._start(state, team)
        if self.frozen:
            return []
        message = {
            "type": "turn",
            "turn": state.turn,
            "state": state_to_doc(state),
            "valid": mask_summary(state, team),
        }
        budget = self.turn_limit + self.pool
        started = time.monotonic()
        reply = self._exchange(message, budget)
        elapsed = time.monotonic() - started
        if elapsed > self.turn_limit:
            self.pool = max(0.0, self.pool - (elapsed - self.turn_limit))
        if reply is None:
            logger.warning("external agent froze at turn %d", state.turn)
            self.frozen = True
            return []
        actions = []
        for text in reply.get("actions", []):
            try:
                action = parse_action(text)
            except ActionParseError as exc:
                logger.warning("dropped unparseable action line: %s", exc)
                continue
            actions.append(action)
        return actions

    def close(self) -> None:
        if self.proc is not None:
            try:
                self.proc.stdin.close()
            except OSError:
                pass
            try:
                self.proc.wait(timeout=2)
            except subprocess.TimeoutExpired:
                self.proc.kill()


def agent_loop(policy, stdin=None, stdout=None) -> None:
    """Run a policy as an external agent over stdio.

    `policy(state, team) -> list[Action]` is called once per turn message.
    Used by ``python3 -m luxsim.external`` and usable by third-party agents.
    """
    import sys

    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    constants = RuleConstants()
    team = 0
    for line in stdin:
        message = json.loads(line)
        if message["type"] == "hello":
            constants = constants_from_flat_dict(message["constants"])
            team = message["team"]
            reply = {"type": "ready", "name": getattr(policy, "name", "external")}
        elif message["type"] == "turn":
            state = state_from_doc(message["state"], constants)
            actions = policy.act(state, team) if isinstance(policy, Agent) else policy(state, team)
            reply = {"type": "actions", "actions": [a.to_text() for a in actions]}
        else:
            reply = {"type": "error", "detail": f"unknown message {message['type']}"}
        stdout.write(json.dumps(reply, sort_keys=True) + "\n")
        stdout.flush()
