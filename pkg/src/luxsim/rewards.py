"""The three curriculum reward phases.

Phase 1 shapes dense per-turn rewards for basic skills, phase 2 pays the
terminal CityTile margin as a square root, phase 3 is plain win/lose.
Phases 2 and 3 are zero-sum between the teams; phase 1 is non-negative.
"""

from __future__ import annotations

import math
from enum import Enum

from .engine import TurnEvents
from .state import GameState, Outcome, team_name


class RewardPhase(Enum):
    DENSE = 1
    SCALED = 2
    WIN_LOSE = 3


# Dense reward weights per counted behavior.
RESEARCH_WEIGHT = 0.01
UNIT_BUILT_WEIGHT = 0.5
FUEL_WEIGHT = 0.0001
CITYTILE_BUILT_WEIGHT = 1.0


def phase1_reward(
    prev_state: GameState,
    next_state: GameState,
    team: int,
    events: TurnEvents | None = None,
) -> float:
    """Dense per-turn shaping reward; decreases never contribute.

    When the turn's events log is available it is used for exact built/deposit
    counts; otherwise the counts fall back to clamped state deltas (which
    cannot see a unit built and lost within the same turn).
    """
    rp_gain = max(
        0,
        next_state.teams[team].research_points - prev_state.teams[team].research_points,
    )
    if events is not None:
        units_built = sum(1 for t, *_ in events.units_built if t == team)
        tiles_built = sum(1 for t, *_ in events.citytiles_built if t == team)
        fuel_gain = events.fuel_deposited[team]
    else:
        units_built = max(
            0, next_state.team_unit_count(team) - prev_state.team_unit_count(team)
        )
        tiles_built = max(
            0,
            next_state.team_citytile_count(team) - prev_state.team_citytile_count(team),
        )
        fuel_gain = max(0, next_state.team_fuel(team) - prev_state.team_fuel(team))
    return (
        RESEARCH_WEIGHT * rp_gain
        + UNIT_BUILT_WEIGHT * units_built
        + FUEL_WEIGHT * fuel_gain
        + CITYTILE_BUILT_WEIGHT * tiles_built
    )


def phase2_reward(outcome: Outcome, final_state: GameState, team: int) -> float:
    """Terminal reward: +/- sqrt of the CityTile-count margin; 0 on draw."""
    if outcome is None:
        raise ValueError("phase2_reward is defined only at episode end")
    n_self = final_state.team_citytile_count(team)
    n_op = final_state.team_citytile_count(1 - team)
    magnitude = math.sqrt(abs(n_self - n_op))
    if outcome.winner == "Draw":
        return 0.0
    return magnitude if outcome.winner == team_name(team) else -magnitude


def phase3_reward(outcome: Outcome, team: int) -> float:
    """Terminal reward: +1 win, -1 loss, 0 draw."""
    if outcome is None:
        raise ValueError("phase3_reward is defined only at episode end")
    if outcome.winner == "Draw":
        return 0.0
    return 1.0 if outcome.winner == team_name(team) else -1.0
