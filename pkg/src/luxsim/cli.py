"""Command-line interface: run / eval / replay / bench / genmap."""

from __future__ import annotations

import argparse
import os
import sys
import time

from .agents import make_agent
from .engine import initial_state, resolve_turn
from .mapgen import MapGenConfig, generate_map, serialize_map
from .match import MatchConfig, eval_rows_csv, evaluate, run_match
from .metrics import metrics_csv
from .replay import Replay, dump_replay, verify_replay
from .rewards import phase2_reward, phase3_reward
from .rules import RuleConstants, WORKER, load_constants

CONSTANTS_ENV = "LUXSIM_CONSTANTS"


def _constants() -> RuleConstants:
    path = os.environ.get(CONSTANTS_ENV)
    if path:
        return load_constants(path)
    return RuleConstants()


def cmd_run(args) -> int:
    config = MatchConfig(
        agent_a=args.agent_a,
        agent_b=args.agent_b,
        map_size=args.map_size,
        map_file=args.map_file,
        seed=args.seed,
        allow_oversize=args.allow_oversize,
        constants=_constants(),
    )
    try:
        result = run_match(config)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    outcome = result.outcome
    print(
        f"outcome: {outcome.winner} ({outcome.reason}) at turn {outcome.turn}; "
        f"citytiles {outcome.citytiles[0]}-{outcome.citytiles[1]}, "
        f"units {outcome.units[0]}-{outcome.units[1]}"
    )
    if args.reward_phase:
        # build a terminal-phase reward report for both teams
        final = None
        if args.reward_phase == 2:
            from .replay import resimulate

            for _, state, _ in resimulate(result.replay):
                final = state
            rewards = [phase2_reward(outcome, final, t) for t in (0, 1)]
        elif args.reward_phase == 3:
            rewards = [phase3_reward(outcome, t) for t in (0, 1)]
        else:
            rewards = None
        if rewards is not None:
            print(f"phase-{args.reward_phase} rewards: A={rewards[0]} B={rewards[1]}")
    for team in ("A", "B"):
        row = result.metrics[team]
        print(
            f"metrics {team}: survival={row['city_survival_ratio']:.3f} "
            f"five_diagonal={row['five_diagonal_per_turn_sum']} "
            f"wood_collect={row['total_wood_collect']:.3f}"
        )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(result.replay.to_json())
        print(f"replay written to {args.out}")
    if args.metrics_csv:
        rows = []
        for team_idx, team in enumerate("AB"):
            row = {"episode": args.seed, "team": team}
            row.update(result.metrics[team])
            rows.append(row)
        with open(args.metrics_csv, "w", encoding="utf-8") as fh:
            fh.write(metrics_csv(rows))
    return 0


def cmd_eval(args) -> int:
    rows = evaluate(
        args.agent_a,
        args.agent_b,
        episodes=args.episodes,
        sizes=tuple(args.sizes),
        jobs=args.jobs,
        base_seed=args.seed,
        constants=_constants(),
    )
    csv_text = eval_rows_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
    print(csv_text, end="")
    return 0


def cmd_replay(args) -> int:
    with open(args.file, "r", encoding="utf-8") as fh:
        try:
            replay = Replay.from_json(fh.read())
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    if args.dump:
        print(dump_replay(replay), end="")
        return 0
    result = verify_replay(replay)
    if result.ok:
        print(f"replay verified: {len(replay.turns)} turns, checksums match")
        return 0
    print(f"verification failed: {result.detail}", file=sys.stderr)
    return 1


def bench_state(size: int, constants: RuleConstants, seed: int = 0):
    """A density-controlled benchmark state: population proportional to area.

    Raw self-play games leave big boards underpopulated (random or scripted
    agents never grow a size-32 economy), which would make per-turn cost look
    size-independent.  The interesting scaling question is the cost of a turn
    at comparable game density, so the benchmark fixes units and CityTiles at
    one per 24 cells per team and keeps them alive for the whole run.
    """
    game_map = generate_map(MapGenConfig(seed=seed, size=size, allow_oversize=True))
    state = initial_state(game_map, constants)
    for team in (0, 1):
        state.teams[team].research_points = constants.research_cap
    free = [
        (x, y)
        for y in range(size)
        for x in range(size)
        if state.res_kind[y, x] == 0 and (x, y) not in state.citytiles
    ]
    n = max(2, size * size // 24)
    for team, cells in ((0, free[:n]), (1, free[-n:])):
        for (x, y) in cells:
            tile = state.add_citytile(team, x, y)
            state.cities[tile.city_id].fuel = 10 ** 9
            state.add_unit(team, WORKER, x, y)
    return state


def cmd_bench(args) -> int:
    constants = _constants()
    per_turn = {}
    for size in args.sizes:
        agent_a = make_agent("random:1")
        agent_b = make_agent("random:2")
        simulated = 0
        seed = 0
        state = bench_state(size, constants, seed)
        elapsed = 0.0
        while simulated < args.turns:
            if state.turn >= constants.episode_length:
                seed += 1
                state = bench_state(size, constants, seed)
            # keep Workers mid-cargo: they keep mining and survive every night
            for unit in state.units.values():
                unit.wood = 60
            actions = (agent_a.act(state, 0), agent_b.act(state, 1))
            started = time.perf_counter()
            resolve_turn(state, *actions)
            elapsed += time.perf_counter() - started
            simulated += 1
        per_turn[size] = elapsed / simulated
        print(
            f"size {size:3d}: {per_turn[size] * 1e3:8.3f} ms/turn "
            f"({simulated / elapsed:9.1f} turns/s)"
        )
    if 12 in per_turn and 32 in per_turn:
        ratio = per_turn[32] / per_turn[12]
        print(f"size-32 / size-12 per-turn cost ratio: {ratio:.2f}x (reference: 2.5x)")
    return 0


def cmd_genmap(args) -> int:
    try:
        game_map = generate_map(
            MapGenConfig(seed=args.seed, size=args.size, allow_oversize=args.allow_oversize)
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = serialize_map(game_map)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    else:
        print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="luxsim",
        description="Deterministic Lux RTS simulation engine. "
        f"Set ${CONSTANTS_ENV} to a key=value file to override rule constants.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="play one match and write a replay")
    p.add_argument("--agent-a", default="null")
    p.add_argument("--agent-b", default="null")
    p.add_argument("--map-size", type=int, default=12)
    p.add_argument("--map-file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reward-phase", type=int, choices=(1, 2, 3), default=None)
    p.add_argument("--out", help="replay output path")
    p.add_argument("--metrics-csv")
    p.add_argument("--allow-oversize", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="win rates over many matches with Wilson CIs")
    p.add_argument("--agent-a", default="greedy")
    p.add_argument("--agent-b", default="random")
    p.add_argument("--episodes", type=int, default=100)
    p.add_argument("--sizes", type=int, nargs="+", default=[12])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("replay", help="verify or dump a replay file")
    p.add_argument("file")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--verify", action="store_true", default=True)
    group.add_argument("--dump", action="store_true")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("bench", help="per-size simulation throughput")
    p.add_argument("--sizes", type=int, nargs="+", default=[12, 32])
    p.add_argument("--turns", type=int, default=2000)
    p.add_argument("--allow-oversize", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("genmap", help="generate a symmetric map file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, default=12)
    p.add_argument("--out")
    p.add_argument("--allow-oversize", action="store_true")
    p.set_defaults(func=cmd_genmap)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
