"""Shared test helpers for building small hand-crafted states."""

import pytest


def pytest_runtest_logreport(report):
    # one visible PASS/FAIL line per acceptance criterion
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.rsplit("::", 1)[-1]
        verdict = "PASS" if report.passed else "FAIL"
        print(f"\n[ACCEPTANCE] {name}: {verdict}", flush=True)

from luxsim.rules import RuleConstants, WORKER
from luxsim.state import GameState, RESOURCE_CODES


@pytest.fixture
def constants():
    return RuleConstants()


def make_state(size=8, constants=None):
    return GameState(size, size, constants or RuleConstants())


def put_resource(state, x, y, kind, amount):
    state.res_kind[y, x] = RESOURCE_CODES[kind]
    state.res_amt[y, x] = amount


def put_worker(state, team, x, y, wood=0, coal=0, uranium=0, cooldown=0.0):
    unit = state.add_unit(team, WORKER, x, y)
    unit.wood, unit.coal, unit.uranium = wood, coal, uranium
    unit.cooldown = cooldown
    return unit


def put_city(state, team, *cells, fuel=0):
    """Add CityTiles cell by cell; returns the city of the last tile."""
    tile = None
    for (x, y) in cells:
        tile = state.add_citytile(team, x, y)
    city = state.cities[tile.city_id]
    city.fuel = fuel
    return city
