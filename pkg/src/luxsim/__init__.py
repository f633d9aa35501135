"""luxsim: deterministic simulation engine for the Lux massive-agent RTS."""

from .engine import (
    CollectionReport,
    TurnEvents,
    check_game_end,
    collect_resources,
    initial_state,
    resolve_movement,
    resolve_turn,
)
from .mapgen import GameMap, MapGenConfig, generate_map, parse_map, serialize_map
from .masks import ActionMask, valid_actions, validate_action
from .observation import (
    ActionMaps,
    OBS_PLANE_COUNT,
    Observation,
    decode_action_maps,
    encode_observation,
)
from .rewards import RewardPhase, phase1_reward, phase2_reward, phase3_reward
from .rules import RuleConstants, city_tile_upkeep, fuel_value, is_night, load_constants
from .state import GameState, Outcome, check_invariants, city_components

__version__ = "1.0.0"
