

from conftest import make_state, put_city, put_resource, put_worker

from luxsim.actions import (
    Action,
    CITYTILE_CHANNELS,
    citytile_channel_to_action,
    unit_channel_count,
    unit_channel_to_action,
)
from luxsim.masks import citytile_mask, unit_mask, valid_actions, validate_action
from luxsim.rules import CART


def move(uid, direction):
    return Action("unit", "move", unit_id=uid, direction=direction)


class TestUnitChecks:
    def test_cooldown_blocks_everything_but_center(self):
        state = make_state()
        unit = put_worker(state, 0, 3, 3, wood=100, cooldown=2.0)
        mask = unit_mask(state, unit)
        # channel 4 is move Center
        assert mask[4]
        assert mask.sum() == 1

    def test_move_off_board(self):
        state = make_state(4)
        unit = put_worker(state, 0, 0, 0)
        ok, reason = validate_action(state, move(unit.id, "N"))
        assert not ok and reason == "off-board"
        assert validate_action(state, move(unit.id, "S"))[0]

    def test_move_onto_enemy_citytile(self):
        state = make_state()
        unit = put_worker(state, 0, 3, 3)
        state.add_citytile(1, 4, 3)
        ok, reason = validate_action(state, move(unit.id, "E"))
        assert not ok and reason == "enemy-city"

    def test_move_onto_friendly_citytile(self):
        state = make_state()
        unit = put_worker(state, 0, 3, 3)
        state.add_citytile(0, 4, 3)
        assert validate_action(state, move(unit.id, "E"))[0]

    def test_move_onto_occupied_cell(self):
        state = make_state()
        unit = put_worker(state, 0, 3, 3)
        put_worker(state, 0, 4, 3)
        ok, reason = validate_action(state, move(unit.id, "E"))
        assert not ok and reason == "occupied"

    def test_build_city_requires_full_cargo(self):
        state = make_state()
        unit = put_worker(state, 0, 3, 3, wood=99)
        ok, reason = validate_action(state, Action("unit", "build_city", unit_id=unit.id))
        assert not ok and reason == "insufficient-resources"
        unit.wood = 100
        assert validate_action(state, Action("unit", "build_city", unit_id=unit.id))[0]

    def test_build_city_mixed_cargo_counts(self):
        state = make_state()
        unit = put_worker(state, 0, 3, 3, wood=60, coal=30, uranium=10)
        assert validate_action(state, Action("unit", "build_city", unit_id=unit.id))[0]

    def test_build_city_blocked_on_resource_cell(self):
        state = make_state()
        unit = put_worker(state, 0, 3, 3, wood=100)
        put_resource(state, 3, 3, "wood", 50)
        ok, reason = validate_action(state, Action("unit", "build_city", unit_id=unit.id))
        assert not ok and reason == "cell-not-empty"

    def test_pillage_needs_road(self):
        state = make_state()
        unit = put_worker(state, 0, 3, 3)
        ok, reason = validate_action(state, Action("unit", "pillage", unit_id=unit.id))
        assert not ok and reason == "no-road"
        state.road[3, 3] = 0.75
        assert validate_action(state, Action("unit", "pillage", unit_id=unit.id))[0]

    def test_cart_cannot_build_or_pillage(self):
        state = make_state()
        cart = state.add_unit(0, CART, 3, 3)
        mask = unit_mask(state, cart)
        assert len(mask) == 17  # no build/pillage channels exist at all

    def test_transfer_needs_target_and_stock(self):
        state = make_state()
        giver = put_worker(state, 0, 3, 3, wood=10)
        action = Action("unit", "transfer", unit_id=giver.id, direction="E", resource="wood")
        ok, reason = validate_action(state, action)
        assert not ok and reason == "no-transfer-target"
        put_worker(state, 0, 4, 3)
        assert validate_action(state, action)[0]
        empty = Action("unit", "transfer", unit_id=giver.id, direction="E", resource="coal")
        ok, reason = validate_action(state, empty)
        assert not ok and reason == "empty-transfer"

    def test_transfer_to_enemy_rejected(self):
        state = make_state()
        giver = put_worker(state, 0, 3, 3, wood=10)
        put_worker(state, 1, 4, 3)
        action = Action("unit", "transfer", unit_id=giver.id, direction="E", resource="wood")
        ok, reason = validate_action(state, action)
        assert not ok and reason == "no-transfer-target"

    def test_unknown_actor(self):
        state = make_state()
        ok, reason = validate_action(state, move(99, "N"))
        assert not ok and reason == "unknown-actor"


class TestCityTileChecks:
    def test_unit_cap(self):
        state = make_state()
        put_city(state, 0, (2, 2), (3, 2), (4, 2))
        for i in range(3):
            put_worker(state, 0, 2 + i, 2)
        tile = state.citytiles[(2, 2)]
        mask = citytile_mask(state, tile)
        assert not mask[0] and not mask[1]  # cap reached: 3 units, 3 tiles
        assert mask[2] and mask[3]
        state.remove_unit(0)
        mask = citytile_mask(state, tile)
        assert mask[0] and mask[1]

    def test_research_caps_at_200(self):
        state = make_state()
        state.add_citytile(0, 2, 2)
        state.teams[0].research_points = 200
        tile = state.citytiles[(2, 2)]
        mask = citytile_mask(state, tile)
        assert not mask[2]
        assert mask[3]  # noop always allowed

    def test_cooldown_blocks_all_but_noop(self):
        state = make_state()
        state.add_citytile(0, 2, 2)
        tile = state.citytiles[(2, 2)]
        tile.cooldown = 9.0
        mask = citytile_mask(state, tile)
        assert list(mask) == [False, False, False, True]


class TestTeamMask:
    def test_shapes(self):
        state = make_state(6)
        mask = valid_actions(state, 0)
        assert mask.worker.shape == (6, 6, 19)
        assert mask.cart.shape == (6, 6, 17)
        assert mask.citytile.shape == (6, 6, 4)

    def test_only_own_actors(self):
        state = make_state()
        put_worker(state, 0, 1, 1)
        put_worker(state, 1, 5, 5)
        state.add_citytile(1, 6, 6)
        mask = valid_actions(state, 0)
        assert mask.worker[1, 1].any()
        assert not mask.worker[5, 5].any()
        assert not mask.citytile.any()

    def test_stacked_units_represent_lowest_id(self):
        state = make_state()
        state.add_citytile(0, 2, 2)
        first = put_worker(state, 0, 2, 2)
        put_worker(state, 0, 2, 2)
        mask = valid_actions(state, 0)
        assert mask.worker_ids[(2, 2)] == first.id

    def test_mask_equals_validator(self):
        # exhaustive agreement on a crafted mixed state
        state = make_state()
        put_resource(state, 4, 4, "wood", 120)
        put_city(state, 0, (1, 1), (2, 1))
        put_worker(state, 0, 3, 4, wood=100)
        put_worker(state, 0, 1, 1)
        state.add_unit(0, CART, 5, 5)
        put_worker(state, 1, 6, 6)
        state.add_citytile(1, 7, 7)
        for team in (0, 1):
            for unit in state.units.values():
                if unit.team != team:
                    continue
                mask = unit_mask(state, unit)
                for ch in range(unit_channel_count(unit.kind)):
                    action = unit_channel_to_action(unit.kind, ch, unit.id)
                    assert mask[ch] == validate_action(state, action)[0]
            for pos, tile in state.citytiles.items():
                if tile.team != team:
                    continue
                mask = citytile_mask(state, tile)
                for ch in range(CITYTILE_CHANNELS):
                    action = citytile_channel_to_action(ch, pos)
                    assert mask[ch] == validate_action(state, action)[0]
