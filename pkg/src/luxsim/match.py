"""Match runner and batch evaluation harness."""

from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass, field

from .agents import Agent, make_agent
from .engine import check_game_end, initial_state, resolve_turn
from .mapgen import MapGenConfig, generate_map, parse_map, serialize_map
from .metrics import EpisodeTrace, scalar_metrics_row
from .replay import Replay, state_checksum
from .rules import RuleConstants, WOOD
from .state import Outcome, check_invariants


@dataclass
class MatchConfig:
    agent_a: str = "null"
    agent_b: str = "null"
    map_size: int = 12
    map_file: str | None = None
    seed: int = 0
    allow_oversize: bool = False
    constants: RuleConstants = field(default_factory=RuleConstants)
    check_invariants: bool = False


@dataclass
class MatchResult:
    outcome: Outcome
    replay: Replay
    trace: EpisodeTrace
    metrics: dict  # per team name


def load_or_generate_map(config: MatchConfig):
    if config.map_file:
        with open(config.map_file, "r", encoding="utf-8") as fh:
            return parse_map(fh.read(), allow_oversize=config.allow_oversize)
    return generate_map(
        MapGenConfig(
            seed=config.seed, size=config.map_size, allow_oversize=config.allow_oversize
        )
    )


def run_match(
    config: MatchConfig,
    agent_a: Agent | None = None,
    agent_b: Agent | None = None,
) -> MatchResult:
    """Play one full match, recording replay, trace and metrics."""
    game_map = load_or_generate_map(config)
    agents = (agent_a or make_agent(config.agent_a), agent_b or make_agent(config.agent_b))
    state = initial_state(game_map, config.constants)
    trace = EpisodeTrace.from_initial_state(state)
    wood_cum = [0, 0]
    turns = []
    checksums = []
    outcome = check_game_end(state)
    try:
        while outcome is None:
            actions = [agents[team].act(state, team) for team in (0, 1)]
            turns.append(
                {"A": [a.to_text() for a in actions[0]], "B": [a.to_text() for a in actions[1]]}
            )
            events = resolve_turn(state, actions[0], actions[1])
            for team in (0, 1):
                wood_cum[team] += events.collection.team_collected[team][WOOD]
            trace.append_state(state, tuple(wood_cum))
            checksums.append(state_checksum(state))
            if config.check_invariants:
                check_invariants(state)
                events.collection.check()
            outcome = check_game_end(state)
    finally:
        for agent in agents:
            agent.close()
    metrics = {
        "A": scalar_metrics_row(trace, 0),
        "B": scalar_metrics_row(trace, 1),
    }
    replay = Replay(
        constants=config.constants,
        map_text=serialize_map(game_map),
        agents=(agents[0].name, agents[1].name),
        seed=config.seed,
        turns=turns,
        checksums=checksums,
        outcome=outcome,
        metrics=metrics,
    )
    return MatchResult(outcome, replay, trace, metrics)


def wilson_interval(successes: float, n: int, z: float = 1.96) -> tuple:
    """95% Wilson score interval for a proportion."""
    if n == 0:
        return (0.0, 1.0)
    p = successes / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    margin = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, center - margin), min(1.0, center + margin))


@dataclass
class EvalRow:
    agent_a: str
    agent_b: str
    size: int
    episodes: int
    wins_a: int
    wins_b: int
    draws: int
    win_rate_a: float  # draws count 1/2
    ci_low: float
    ci_high: float


def _play_one(args) -> tuple:
    agent_a, agent_b, size, seed, swapped, constants = args
    config = MatchConfig(
        agent_a=agent_b if swapped else agent_a,
        agent_b=agent_a if swapped else agent_b,
        map_size=size,
        seed=seed,
        constants=constants,
    )
    outcome = run_match(config).outcome
    if outcome.winner == "Draw":
        return (seed, "draw")
    won_first_slot = outcome.winner == "A"
    a_won = won_first_slot != swapped
    return (seed, "a" if a_won else "b")


def evaluate(
    agent_a: str,
    agent_b: str,
    episodes: int,
    sizes: tuple = (12,),
    jobs: int = 1,
    base_seed: int = 0,
    constants: RuleConstants | None = None,
) -> list:
    """Run N matches per size with distinct seeds, alternating sides.

    Results merge deterministically by seed order regardless of parallelism.
    """
    constants = constants or RuleConstants()
    rows = []
    for size in sizes:
        tasks = [
            (agent_a, agent_b, size, base_seed + i, i % 2 == 1, constants)
            for i in range(episodes)
        ]
        if jobs > 1:
            with multiprocessing.Pool(jobs) as pool:
                results = pool.map(_play_one, tasks)
        else:
            results = [_play_one(t) for t in tasks]
        results.sort()
        wins_a = sum(1 for _, r in results if r == "a")
        wins_b = sum(1 for _, r in results if r == "b")
        draws = sum(1 for _, r in results if r == "draw")
        score = wins_a + draws / 2
        low, high = wilson_interval(score, episodes)
        rows.append(
            EvalRow(
                agent_a, agent_b, size, episodes, wins_a, wins_b, draws,
                score / episodes, low, high,
            )
        )
    return rows


def eval_rows_csv(rows: list) -> str:
    header = (
        "agent_a,agent_b,size,episodes,wins_a,wins_b,draws,"
        "win_rate_a,wilson_low,wilson_high"
    )
    lines = [header]
    for r in rows:
        lines.append(
            f"{r.agent_a},{r.agent_b},{r.size},{r.episodes},{r.wins_a},{r.wins_b},"
            f"{r.draws},{r.win_rate_a:.4f},{r.ci_low:.4f},{r.ci_high:.4f}"
        )
    return "\n".join(lines) + "\n"
