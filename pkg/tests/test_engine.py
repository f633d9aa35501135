
import pytest

from conftest import make_state, put_city, put_worker

from luxsim.actions import Action
from luxsim.engine import (
    TurnError,
    check_game_end,
    initial_state,
    resolve_turn,
)
from luxsim.mapgen import MapGenConfig, generate_map
from luxsim.replay import state_checksum
from luxsim.rules import CART, RuleConstants
from luxsim.state import check_invariants


def move(uid, d):
    return Action("unit", "move", unit_id=uid, direction=d)


class TestInitialState:
    def test_spawns(self):
        game_map = generate_map(MapGenConfig(seed=0, size=12))
        state = initial_state(game_map, RuleConstants())
        assert state.team_citytile_count(0) == 1
        assert state.team_citytile_count(1) == 1
        assert state.team_unit_count(0) == 1
        assert state.team_unit_count(1) == 1
        for team, x, y in game_map.spawns:
            tile = state.citytiles[(x, y)]
            assert tile.team == team
            assert any(state.units[i].team == team for i in state.units_at(x, y))
        check_invariants(state)


class TestCityTileStep:
    def test_execution_time_cap_recheck(self):
        # two tiles, one unit: both builds validate, only one executes
        state = make_state()
        put_city(state, 0, (2, 2), (3, 2), fuel=100)
        put_worker(state, 0, 5, 5, wood=50)
        actions = [
            Action("citytile", "build_worker", pos=(2, 2)),
            Action("citytile", "build_worker", pos=(3, 2)),
        ]
        events = resolve_turn(state, actions, [])
        assert len(events.units_built) == 1
        assert events.skipped_builds == [(3, 2)]
        # row-major: the (2,2) tile built
        assert events.units_built[0][3:] == (2, 2)

    def test_stacked_builders_build_once(self):
        # a city collapse can leave two full Workers stacked on a bare cell;
        # if both order build_city only the first one lands
        state = make_state()
        first = put_worker(state, 0, 3, 3, wood=100)
        second = put_worker(state, 0, 3, 3, wood=100)
        events = resolve_turn(
            state,
            [
                Action("unit", "build_city", unit_id=first.id),
                Action("unit", "build_city", unit_id=second.id),
            ],
            [],
        )
        assert (3, 3) in state.citytiles
        assert state.team_citytile_count(0) == 1
        assert events.skipped_builds == [(3, 3)]
        # the skipped builder keeps its cargo through the build step and then
        # deposits it into the city it is now standing on
        tile = state.citytiles[(3, 3)]
        assert state.cities[tile.city_id].fuel == 100
        check_invariants(state)

    def test_research_clamped_at_cap(self):
        state = make_state()
        put_city(state, 0, (2, 2), (3, 2), fuel=100)
        state.teams[0].research_points = 199
        actions = [
            Action("citytile", "research", pos=(2, 2)),
            Action("citytile", "research", pos=(3, 2)),
        ]
        resolve_turn(state, actions, [])
        assert state.teams[0].research_points == 200

    def test_noop_costs_no_cooldown(self):
        state = make_state()
        put_city(state, 0, (2, 2), fuel=100)
        resolve_turn(state, [Action("citytile", "noop", pos=(2, 2))], [])
        assert state.citytiles[(2, 2)].cooldown == 0.0


class TestUnitStep:
    def test_center_move_costs_cooldown(self):
        state = make_state()
        unit = put_worker(state, 0, 3, 3)
        resolve_turn(state, [move(unit.id, "C")], [])
        assert unit.cooldown == 1.0

    def test_center_for_cooling_unit_is_noop(self):
        state = make_state()
        unit = put_worker(state, 0, 3, 3, cooldown=3.0)
        resolve_turn(state, [move(unit.id, "C")], [])
        assert unit.cooldown == 2.0  # only the recovery applied

    def test_cancelled_move_gains_no_cooldown(self):
        state = make_state()
        a = put_worker(state, 0, 3, 3)
        b = put_worker(state, 1, 5, 3)
        events = resolve_turn(state, [move(a.id, "E")], [move(b.id, "W")])
        assert len(events.cancelled_moves) == 2
        assert a.cooldown == 0.0 and b.cooldown == 0.0

    def test_transfer_full_stock_capped_by_space(self):
        state = make_state()
        giver = put_worker(state, 0, 3, 3, wood=80)
        taker = put_worker(state, 0, 4, 3, wood=50)
        action = Action("unit", "transfer", unit_id=giver.id, direction="E", resource="wood")
        events = resolve_turn(state, [action], [])
        assert taker.wood == 100
        assert giver.wood == 30  # excess returned
        assert events.transfers == [(giver.id, taker.id, "wood", 50)]
        assert giver.cooldown == 1.0

    def test_transfer_into_cart(self):
        state = make_state()
        giver = put_worker(state, 0, 3, 3, coal=40)
        cart = state.add_unit(0, CART, 4, 3)
        action = Action("unit", "transfer", unit_id=giver.id, direction="E", resource="coal")
        resolve_turn(state, [action], [])
        assert cart.coal == 40 and giver.coal == 0

    def test_pillage_reduces_road(self):
        state = make_state()
        unit = put_worker(state, 0, 3, 3)
        state.road[3, 3] = 2.0
        events = resolve_turn(state, [Action("unit", "pillage", unit_id=unit.id)], [])
        assert state.road[3, 3] == 1.5
        assert events.pillages == [(unit.id, 3, 3)]

    def test_build_city_merges_neighbours(self):
        state = make_state()
        put_city(state, 0, (2, 3), fuel=4)
        put_city(state, 0, (4, 3), fuel=6)
        unit = put_worker(state, 0, 3, 3, wood=100)
        resolve_turn(state, [Action("unit", "build_city", unit_id=unit.id)], [])
        assert len(state.cities) == 1
        city = next(iter(state.cities.values()))
        assert city.tiles == {(2, 3), (3, 3), (4, 3)}
        assert city.fuel == 10
        check_invariants(state)


class TestRoadStep:
    def test_cart_upgrades_cell(self):
        state = make_state()
        state.add_unit(0, CART, 3, 3)
        resolve_turn(state, [], [])
        assert state.road[3, 3] == 0.75

    def test_road_caps_at_six(self):
        state = make_state()
        state.add_unit(0, CART, 3, 3)
        state.road[3, 3] = 5.75
        resolve_turn(state, [], [])
        assert state.road[3, 3] == 6.0

    def test_road_speeds_recovery(self):
        state = make_state()
        state.road[3, 3] = 2.0
        unit = put_worker(state, 0, 3, 3, cooldown=4.0)
        resolve_turn(state, [], [])
        assert unit.cooldown == 1.0  # -1 - road level 2


class TestDroppedActions:
    def test_invalid_action_dropped_not_fatal(self):
        state = make_state(4)
        unit = put_worker(state, 0, 0, 0)
        events = resolve_turn(state, [move(unit.id, "N")], [])
        assert events.dropped == [(0, f"u {unit.id} move N", "off-board")]
        assert unit.pos() == (0, 0)

    def test_not_owned_dropped(self):
        state = make_state()
        unit = put_worker(state, 1, 3, 3)
        events = resolve_turn(state, [move(unit.id, "E")], [])
        assert events.dropped == [(0, f"u {unit.id} move E", "not-owned")]
        assert unit.pos() == (3, 3)

    def test_duplicate_actor_dropped(self):
        state = make_state()
        unit = put_worker(state, 0, 3, 3)
        events = resolve_turn(state, [move(unit.id, "E"), move(unit.id, "S")], [])
        assert [r for _, _, r in events.dropped] == ["duplicate-actor"]
        assert unit.pos() == (4, 3)

    def test_malformed_input_raises(self):
        state = make_state()
        with pytest.raises(TurnError):
            resolve_turn(state, "u 0 move N", [])
        with pytest.raises(TurnError):
            resolve_turn(state, ["u 0 move N"], [])


class TestDeterminism:
    def test_identical_runs_identical_checksums(self):
        game_map = generate_map(MapGenConfig(seed=5, size=12))

        def play():
            from luxsim.agents import RandomAgent

            state = initial_state(game_map, RuleConstants())
            agents = (RandomAgent(1), RandomAgent(2))
            sums = []
            for _ in range(60):
                if check_game_end(state) is not None:
                    break
                resolve_turn(state, agents[0].act(state, 0), agents[1].act(state, 1))
                sums.append(state_checksum(state))
            return sums

        assert play() == play()

    def test_turn_counter_advances(self):
        state = make_state()
        put_worker(state, 0, 1, 1, wood=50)
        put_city(state, 0, (1, 1), fuel=10 ** 6)
        for expected in range(1, 5):
            resolve_turn(state, [], [])
            assert state.turn == expected

    def test_episode_end_rejected(self):
        state = make_state()
        state.turn = 360
        with pytest.raises(TurnError, match="over"):
            resolve_turn(state, [], [])


class TestGameEnd:
    def test_running_game(self):
        state = make_state()
        put_worker(state, 0, 1, 1)
        put_worker(state, 1, 5, 5)
        assert check_game_end(state) is None

    def test_elimination(self):
        state = make_state()
        put_worker(state, 0, 1, 1)
        outcome = check_game_end(state)
        assert outcome.winner == "A" and outcome.reason == "elimination"

    def test_mutual_elimination_draw(self):
        state = make_state()
        outcome = check_game_end(state)
        assert outcome.winner == "Draw"

    def test_timeout_citytile_count_wins(self):
        state = make_state()
        state.turn = 360
        put_city(state, 0, (1, 1))
        put_city(state, 1, (5, 5), (6, 5))
        put_worker(state, 0, 3, 3)
        outcome = check_game_end(state)
        assert outcome.winner == "B" and outcome.reason == "citytile-count"
        assert outcome.citytiles == (1, 2)

    def test_timeout_unit_tiebreak(self):
        state = make_state()
        state.turn = 360
        put_city(state, 0, (1, 1))
        put_city(state, 1, (5, 5))
        put_worker(state, 0, 3, 3)
        outcome = check_game_end(state)
        assert outcome.winner == "A" and outcome.reason == "unit-count"

    def test_timeout_full_tie_draw(self):
        state = make_state()
        state.turn = 360
        put_city(state, 0, (1, 1))
        put_city(state, 1, (5, 5))
        outcome = check_game_end(state)
        assert outcome.winner == "Draw" and outcome.reason == "draw"


class TestFuzz:
    def test_random_games_hold_invariants(self):
        from luxsim.agents import RandomAgent

        for seed in range(8):
            game_map = generate_map(MapGenConfig(seed=seed, size=12))
            state = initial_state(game_map, RuleConstants())
            agents = (RandomAgent(seed), RandomAgent(seed + 100))
            turns = 0
            while check_game_end(state) is None:
                events = resolve_turn(
                    state, agents[0].act(state, 0), agents[1].act(state, 1)
                )
                events.collection.check()
                check_invariants(state)
                assert events.dropped == [], "builtin agents must be mask-clean"
                turns += 1
            assert turns <= 360
