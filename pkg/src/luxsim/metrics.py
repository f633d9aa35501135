"""Quantitative behavior metrics computed from episode traces."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .rules import WOOD, WORKER
from .state import GameState

FIVE_DIAGONAL_MIN = 5


@dataclass
class TraceEntry:
    """One turn's snapshot feeding the metrics."""

    turn: int
    citytiles: tuple  # (count A, count B)
    worker_positions: tuple  # ([(x, y)...] A, [(x, y)...] B)
    wood_collected_cum: tuple  # cumulative wood taken off tiles per team
    city_fuel: tuple  # pooled city fuel per team


@dataclass
class EpisodeTrace:
    width: int
    height: int
    initial_wood: int
    entries: list = field(default_factory=list)

    def append_state(self, state: GameState, wood_collected_cum) -> None:
        workers = ([], [])
        for u in state.units.values():
            if u.kind == WORKER:
                workers[u.team].append((u.x, u.y))
        self.entries.append(
            TraceEntry(
                turn=state.turn,
                citytiles=(state.team_citytile_count(0), state.team_citytile_count(1)),
                worker_positions=(sorted(workers[0]), sorted(workers[1])),
                wood_collected_cum=tuple(wood_collected_cum),
                city_fuel=(state.team_fuel(0), state.team_fuel(1)),
            )
        )

    @staticmethod
    def from_initial_state(state: GameState) -> "EpisodeTrace":
        from .state import RESOURCE_CODES

        initial_wood = int(state.res_amt[state.res_kind == RESOURCE_CODES[WOOD]].sum())
        trace = EpisodeTrace(state.width, state.height, initial_wood)
        trace.append_state(state, (0, 0))
        return trace


def city_survival_ratio(trace: EpisodeTrace, team: int) -> float:
    """Final CityTile count over the episode's maximum; 1.0 when max is 0."""
    if not trace.entries:
        raise ValueError("empty trace")
    counts = [e.citytiles[team] for e in trace.entries]
    peak = max(counts)
    if peak == 0:
        return 1.0
    return counts[-1] / peak


def five_diagonal_count(trace: EpisodeTrace, team: int) -> int:
    """Summed over turns: maximal diagonal Worker runs of length >= 5.

    Both diagonal directions count; a maximal run counts once per turn it
    exists (per-turn summation).
    """
    total = 0
    grid = np.zeros((trace.height, trace.width), dtype=np.uint8)
    for entry in trace.entries:
        positions = entry.worker_positions[team]
        if len(positions) < FIVE_DIAGONAL_MIN:
            continue
        grid[:] = 0
        for x, y in positions:
            grid[y, x] = 1
        total += _kernels.diagonal_run_count(grid, FIVE_DIAGONAL_MIN)
    return total


def total_wood_collect(trace: EpisodeTrace, team: int) -> float:
    """Cumulative wood the team took off tiles, over the originally spawned
    wood.  Can exceed 1 thanks to regrowth."""
    if trace.initial_wood <= 0:
        raise ValueError("trace has no initial wood")
    if not trace.entries:
        raise ValueError("empty trace")
    return trace.entries[-1].wood_collected_cum[team] / trace.initial_wood


def fuel_trace(trace: EpisodeTrace, team: int) -> list:
    """Team total city fuel per turn."""
    return [e.city_fuel[team] for e in trace.entries]


SCALAR_METRIC_HEADER = (
    "episode",
    "team",
    "city_survival_ratio",
    "five_diagonal_per_turn_sum",
    "total_wood_collect",
)


def scalar_metrics_row(trace: EpisodeTrace, team: int) -> dict:
    return {
        "city_survival_ratio": city_survival_ratio(trace, team),
        "five_diagonal_per_turn_sum": five_diagonal_count(trace, team),
        "total_wood_collect": total_wood_collect(trace, team)
        if trace.initial_wood > 0
        else float("nan"),
    }


def metrics_csv(rows: list) -> str:
    """Render one CSV with a row per (episode, team)."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SCALAR_METRIC_HEADER, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def series_csv(header: str, series: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("turn", header))
    for turn, value in enumerate(series):
        writer.writerow((turn, value))
    return buf.getvalue()
