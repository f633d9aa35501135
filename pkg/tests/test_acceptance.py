"""Acceptance suite: one test per release criterion.

Each test prints a single ``[ACCEPTANCE] <name>: PASS/FAIL`` line (see
conftest).  Tolerances are stated inline; the fuzz and statistics tests use
fixed seeds so the suite is deterministic.
"""

import math
import random
import time

import numpy as np
from conftest import make_state, put_city, put_resource, put_worker

import scenarios
from test_metrics import brute_force_diagonal_runs

from luxsim.actions import (
    CITYTILE_CHANNELS,
    citytile_channel_to_action,
    unit_channel_count,
    unit_channel_to_action,
)
from luxsim.agents import NullAgent, RandomAgent
from luxsim.cli import bench_state
from luxsim.engine import (
    apply_night,
    check_game_end,
    collect_resources,
    initial_state,
    resolve_turn,
)
from luxsim.mapgen import MapGenConfig, generate_map
from luxsim.masks import citytile_mask, unit_mask, validate_action
from luxsim.match import MatchConfig, evaluate, run_match
from luxsim.metrics import EpisodeTrace, TraceEntry, city_survival_ratio, total_wood_collect
from luxsim.replay import Replay, verify_replay
from luxsim.rewards import phase1_reward, phase2_reward, phase3_reward
from luxsim.rules import RuleConstants
from luxsim._kernels import diagonal_run_count
from luxsim.state import check_invariants


def test_golden_worked_examples():
    # Worker with 60 wood next to 3 wood tiles: receives 40, wastes 2.
    state = make_state()
    unit = put_worker(state, 0, 3, 3, wood=60)
    for pos in ((3, 2), (4, 3), (3, 4)):
        put_resource(state, *pos, "wood", 400)
    report = collect_resources(state)
    assert unit.wood == 100
    assert report.delivered["wood"] == 40 and report.wasted["wood"] == 2

    # 25-wood tile, requests {5, 20, 20, 20}: grants total 23, 2 wasted.
    state = make_state()
    low = put_worker(state, 0, 3, 2, wood=95)
    others = [put_worker(state, 0, *pos) for pos in ((2, 3), (4, 3), (3, 4))]
    put_resource(state, 3, 3, "wood", 25)
    report = collect_resources(state)
    granted = (low.wood - 95) + sum(u.wood for u in others)
    assert granted == 23 and report.wasted["wood"] == 2

    # Night: 1 wood + 5 uranium against Worker upkeep 4 wastes 37 fuel.
    state = make_state()
    state.turn = 30
    unit = put_worker(state, 0, 3, 3, wood=1, uranium=5)
    before = unit.cargo_fuel(state.constants)
    apply_night(state)
    assert before - unit.cargo_fuel(state.constants) - state.constants.worker_upkeep == 37


def test_resolution_order_conformance():
    for scenario in scenarios.ALL_STEPS:
        scenario()


def test_conservation_fuzz():
    # 1,000 random-agent games per size; every turn conserves resources and
    # holds every state invariant; every game ends by turn 360.
    games_per_size = 1000
    for size in (12, 16, 24, 32):
        for seed in range(games_per_size):
            game_map = generate_map(MapGenConfig(seed=seed, size=size))
            state = initial_state(game_map, RuleConstants())
            agents = (RandomAgent(seed), RandomAgent(seed + 10 ** 6))
            while check_game_end(state) is None:
                assert state.turn < 360
                board_before = int(state.res_amt.sum())
                events = resolve_turn(
                    state, agents[0].act(state, 0), agents[1].act(state, 1)
                )
                events.collection.check()
                removed = sum(events.collection.removed.values())
                grown = events.regrowth
                assert int(state.res_amt.sum()) == board_before - removed + grown
                check_invariants(state)
            assert check_game_end(state) is not None


def test_mask_soundness_and_completeness():
    # >= 1e5 sampled mask-valid actions, zero engine rejections; exhaustive
    # mask/validator agreement on 1,000 random playout states.
    sampled = 0
    states_checked = 0
    seed = 0
    while states_checked < 1000 or sampled < 100_000:
        game_map = generate_map(MapGenConfig(seed=seed, size=12))
        state = initial_state(game_map, RuleConstants())
        agents = (RandomAgent(seed), RandomAgent(seed + 777))
        while check_game_end(state) is None:
            if states_checked < 1000:
                for unit in state.units.values():
                    mask = unit_mask(state, unit)
                    for ch in range(unit_channel_count(unit.kind)):
                        action = unit_channel_to_action(unit.kind, ch, unit.id)
                        assert mask[ch] == validate_action(state, action)[0]
                for pos, tile in state.citytiles.items():
                    mask = citytile_mask(state, tile)
                    for ch in range(CITYTILE_CHANNELS):
                        action = citytile_channel_to_action(ch, pos)
                        assert mask[ch] == validate_action(state, action)[0]
                states_checked += 1
            actions = (agents[0].act(state, 0), agents[1].act(state, 1))
            sampled += len(actions[0]) + len(actions[1])
            events = resolve_turn(state, *actions)
            assert events.dropped == [], "engine rejected a mask-valid action"
        seed += 1
    assert sampled >= 100_000 and states_checked >= 1000


def test_determinism_and_replay():
    # 100 matches re-simulate to identical per-turn checksums; replay bodies
    # are byte-identical across reruns.
    for i in range(100):
        size = 12 if i % 2 == 0 else 16
        config = MatchConfig(agent_a="random:1", agent_b="random:2", map_size=size, seed=i)
        result = run_match(config)
        verdict = verify_replay(result.replay)
        assert verdict.ok, f"seed {i}: {verdict.detail}"
        if i < 10:
            again = run_match(config)
            assert again.replay.to_json() == result.replay.to_json()
            assert verify_replay(Replay.from_json(result.replay.to_json())).ok


def test_reward_formulas():
    # Phase 2 equals the signed sqrt CityTile margin to 1e-12 on 100 random
    # terminal states; phases 2/3 are zero-sum; phase-1 weights are exact.
    rng = random.Random(1)
    for _ in range(100):
        state = make_state(8)
        cells = [(x, y) for y in range(8) for x in range(8)]
        rng.shuffle(cells)
        for pos in cells[: rng.randrange(0, 8)]:
            state.add_citytile(0, *pos)
        for pos in cells[8 : 8 + rng.randrange(0, 8)]:
            state.add_citytile(1, *pos)
        put_worker(state, 0, *cells[20])
        state.turn = 360
        outcome = check_game_end(state)
        margin = abs(state.team_citytile_count(0) - state.team_citytile_count(1))
        a2, b2 = phase2_reward(outcome, state, 0), phase2_reward(outcome, state, 1)
        assert abs(abs(a2) - math.sqrt(margin)) <= 1e-12 or outcome.winner == "Draw"
        assert abs(a2 + b2) <= 1e-12
        a3, b3 = phase3_reward(outcome, 0), phase3_reward(outcome, 1)
        assert a3 + b3 == 0.0 and a3 in (-1.0, 0.0, 1.0)
        if outcome.winner == "Draw":
            assert a2 == 0.0 and a3 == 0.0

    # Phase-1 golden: 2 research + 1 unit + 150 fuel + 1 citytile.
    state = make_state()
    put_city(state, 0, (1, 1), (2, 1), (3, 1), fuel=10 ** 6)
    builder = put_worker(state, 0, 4, 4, wood=100)
    depositor = put_worker(state, 0, 1, 2, coal=15)
    from luxsim.actions import Action

    prev = state.copy()
    events = resolve_turn(
        state,
        [
            Action("citytile", "research", pos=(2, 1)),
            Action("citytile", "research", pos=(3, 1)),
            Action("citytile", "build_worker", pos=(1, 1)),
            Action("unit", "build_city", unit_id=builder.id),
            Action("unit", "move", unit_id=depositor.id, direction="N"),
        ],
        [],
    )
    assert events.dropped == []
    expected = 0.01 * 2 + 0.5 * 1 + 0.0001 * 150 + 1.0 * 1
    assert abs(phase1_reward(prev, state, 0, events) - expected) <= 1e-12


def test_metric_oracles():
    # five_diagonal_count against the brute-force scan on 1,000 random boards.
    rng = random.Random(6)
    for _ in range(1000):
        h = rng.randrange(5, 15)
        w = rng.randrange(5, 15)
        grid = np.array(
            [[rng.random() < rng.choice((0.2, 0.45, 0.7)) for _ in range(w)] for _ in range(h)],
            dtype=np.uint8,
        )
        assert diagonal_run_count(grid, 5) == brute_force_diagonal_runs(grid, 5)

    # Hand-computed fixtures for the two scalar metrics.
    def entry(turn, citytiles, wood):
        return TraceEntry(turn, citytiles, ([], []), wood, (0, 0))

    trace = EpisodeTrace(8, 8, 1000, [
        entry(0, (1, 2), (0, 0)),
        entry(1, (6, 2), (100, 40)),
        entry(2, (3, 0), (250, 40)),
    ])
    assert city_survival_ratio(trace, 0) == 3 / 6
    assert city_survival_ratio(trace, 1) == 0.0
    assert total_wood_collect(trace, 0) == 250 / 1000
    assert total_wood_collect(trace, 1) == 40 / 1000
    empty = EpisodeTrace(8, 8, 1000, [entry(0, (0, 0), (0, 0))])
    assert city_survival_ratio(empty, 0) == 1.0


def test_symmetry_fairness():
    # Null vs null ends in a Draw on any generated map.
    null = NullAgent()
    for size in (12, 16, 24, 32):
        for seed in range(3):
            state = initial_state(
                generate_map(MapGenConfig(seed=seed, size=size)), RuleConstants()
            )
            outcome = check_game_end(state)
            while outcome is None:
                resolve_turn(state, null.act(state, 0), null.act(state, 1))
                outcome = check_game_end(state)
            assert outcome.winner == "Draw", f"size {size} seed {seed}"

    # Identical agents over 100 side-alternating matches: CI contains 0.5.
    row = evaluate("random:9", "random:9", episodes=100, sizes=(12,))[0]
    assert row.ci_low <= 0.5 <= row.ci_high, (row.win_rate_a, row.ci_low, row.ci_high)


def test_baseline_ordering():
    # Greedy beats random in at least 90 of 100 size-12 matches.
    row = evaluate("greedy", "random:1", episodes=100, sizes=(12,))[0]
    assert row.wins_a >= 90, f"greedy won only {row.wins_a}/100"


def test_performance():
    # Informational but bounded: density-controlled per-turn cost ratio
    # size-32/size-12 within [1.5, 6.0]; >= 100 random size-12 episodes/min.
    constants = RuleConstants()
    per_turn = {}
    for size in (12, 32):
        agents = (RandomAgent(1), RandomAgent(2))
        state = bench_state(size, constants)
        elapsed = 0.0
        simulated = 0
        seed = 0
        while simulated < 1500:
            if state.turn >= constants.episode_length:
                seed += 1
                state = bench_state(size, constants, seed)
            for unit in state.units.values():
                unit.wood = 60
            actions = (agents[0].act(state, 0), agents[1].act(state, 1))
            t0 = time.perf_counter()
            resolve_turn(state, *actions)
            elapsed += time.perf_counter() - t0
            simulated += 1
        per_turn[size] = elapsed / simulated
    ratio = per_turn[32] / per_turn[12]
    print(f"\nper-turn cost: size 12 {per_turn[12] * 1e3:.3f} ms, "
          f"size 32 {per_turn[32] * 1e3:.3f} ms, ratio {ratio:.2f}x")
    assert 1.5 <= ratio <= 6.0

    episodes = 20
    t0 = time.perf_counter()
    for seed in range(episodes):
        state = initial_state(
            generate_map(MapGenConfig(seed=seed, size=12)), RuleConstants()
        )
        agents = (RandomAgent(seed), RandomAgent(seed + 5000))
        while check_game_end(state) is None:
            resolve_turn(state, agents[0].act(state, 0), agents[1].act(state, 1))
    rate = episodes / (time.perf_counter() - t0) * 60
    print(f"random self-play: {rate:.0f} size-12 episodes/minute")
    assert rate >= 100
