"""Single and batched reset/step environments over the luxsim engine.

The environment is a thin adapter: every observation comes straight from
``luxsim.encode_observation``, actions are per-cell channel maps decoded by
``luxsim.decode_action_maps``, and one ``step`` advances the game by exactly
one ``resolve_turn`` with the opponent's actions generated internally.  No
game state lives on the binding side.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from luxsim import (
    ActionMaps,
    Observation,
    RuleConstants,
    check_game_end,
    decode_action_maps,
    encode_observation,
    initial_state,
    resolve_turn,
    valid_actions,
)
from luxsim.agents import make_agent
from luxsim.match import MatchConfig, load_or_generate_map
from luxsim.rewards import phase1_reward, phase2_reward, phase3_reward
from luxsim.state import Outcome


@dataclass
class EnvConfig:
    """Environment construction options; names mirror MatchConfig."""

    map_size: int = 12
    map_file: str | None = None
    seed: int = 0
    reward_phase: int = 1
    opponent: str = "null"  # agent spec string, e.g. "null", "random:3", "greedy"
    team: int = 0  # which side the caller controls
    allow_oversize: bool = False
    constants: RuleConstants = field(default_factory=RuleConstants)

    def validate(self) -> None:
        if self.reward_phase not in (1, 2, 3):
            raise ValueError(f"reward_phase must be 1, 2 or 3, got {self.reward_phase}")
        if self.team not in (0, 1):
            raise ValueError(f"team must be 0 or 1, got {self.team}")


@dataclass
class StepResult:
    observation: tuple  # (onehot (51,), scalars (18,), planes (C, h, w))
    reward: float
    done: bool
    info: dict  # outcome (when done), events summary, valid-action masks


def _obs_triple(obs: Observation) -> tuple:
    return obs.global_onehot, obs.global_scalars, obs.planes


def _encode(state, team: int) -> tuple:
    """Encode the state; past the final turn, clamp to the last valid turn.

    The encoder's time features are defined on [0, episode_length); the
    terminal observation (which no policy acts on) reuses the final turn.
    """
    last = state.constants.episode_length - 1
    if state.turn > last:
        saved, state.turn = state.turn, last
        try:
            return _obs_triple(encode_observation(state, team))
        finally:
            state.turn = saved
    return _obs_triple(encode_observation(state, team))


class LuxEnv:
    """One game against an internally stepped opponent.

    Lifecycle: ``make(config)`` then ``reset()`` then repeated ``step`` until
    ``done``; ``step`` after ``done`` (or before ``reset``) is a contract
    error.  A single env is not concurrently steppable.
    """

    def __init__(self, config: EnvConfig):
        config.validate()
        self.config = config
        self._state = None
        self._outcome: Outcome | None = None
        self._opponent = None
        self._closed = False

    @property
    def state(self):
        """The authoritative engine state (read-only by convention)."""
        return self._state

    @property
    def done(self) -> bool:
        return self._outcome is not None

    def reset(self, seed: int | None = None) -> tuple:
        """Start a fresh game; returns the first observation triple."""
        if self._closed:
            raise RuntimeError("env is closed")
        if seed is not None:
            self.config = replace(self.config, seed=seed)
        match_config = MatchConfig(
            map_size=self.config.map_size,
            map_file=self.config.map_file,
            seed=self.config.seed,
            allow_oversize=self.config.allow_oversize,
            constants=self.config.constants,
        )
        self._state = initial_state(load_or_generate_map(match_config), self.config.constants)
        self._outcome = check_game_end(self._state)
        self._opponent = make_agent(self.config.opponent)
        return _obs_triple(encode_observation(self._state, self.config.team))

    def step(self, maps: ActionMaps) -> StepResult:
        """Advance one turn: decode `maps`, query the opponent, resolve."""
        if self._closed:
            raise RuntimeError("env is closed")
        if self._state is None:
            raise RuntimeError("call reset() before step()")
        if self._outcome is not None:
            raise RuntimeError("episode is done; call reset()")
        team = self.config.team
        mask = valid_actions(self._state, team)
        own = decode_action_maps(maps, self._state, team, mask)
        opp = self._opponent.act(self._state, 1 - team)
        prev = self._state.copy() if self.config.reward_phase == 1 else None
        if team == 0:
            events = resolve_turn(self._state, own, opp)
        else:
            events = resolve_turn(self._state, opp, own)
        self._outcome = check_game_end(self._state)
        done = self._outcome is not None

        if self.config.reward_phase == 1:
            reward = phase1_reward(prev, self._state, team, events)
        elif self.config.reward_phase == 2:
            reward = phase2_reward(self._outcome, self._state, team) if done else 0.0
        else:
            reward = phase3_reward(self._outcome, team) if done else 0.0

        obs = _encode(self._state, team)
        info = {
            "outcome": self._outcome,
            "masks": None if done else valid_actions(self._state, team),
            "events": {
                "dropped": list(events.dropped),
                "fuel_deposited": list(events.fuel_deposited),
                "units_built": len(events.units_built),
                "citytiles_built": len(events.citytiles_built),
            },
        }
        return StepResult(obs, reward, done, info)

    def close(self) -> None:
        self._state = None
        self._opponent = None
        self._closed = True


class BatchedLuxEnv:
    """n independent games stepped together.

    Index ``i`` is seeded ``config.seed + i``; trajectories are identical to
    ``n`` sequential single envs with the same seeds.  ``step`` blocks until
    every index has advanced.
    """

    def __init__(self, config: EnvConfig, n: int):
        if n < 1:
            raise ValueError(f"batch size must be >= 1, got {n}")
        self.n = n
        self.envs = [
            LuxEnv(replace(config, seed=config.seed + i)) for i in range(n)
        ]

    def reset(self, seed: int | None = None) -> list:
        base = seed if seed is not None else None
        return [
            env.reset(None if base is None else base + i)
            for i, env in enumerate(self.envs)
        ]

    def step(self, maps: list) -> list:
        """Step every running index; finished indices yield None until reset."""
        if len(maps) != self.n:
            raise ValueError(f"expected {self.n} action-map sets, got {len(maps)}")
        return [None if env.done else env.step(m) for env, m in zip(self.envs, maps)]

    def close(self) -> None:
        for env in self.envs:
            env.close()


def make(config: EnvConfig | None = None, **overrides) -> LuxEnv:
    """Build a single env from a config or from MatchConfig-style keywords."""
    if config is None:
        config = EnvConfig(**overrides)
    elif overrides:
        config = replace(config, **overrides)
    return LuxEnv(config)


def make_batched(config: EnvConfig | None = None, n: int = 1, **overrides) -> BatchedLuxEnv:
    """Build n independent envs stepped as a batch."""
    if config is None:
        config = EnvConfig(**overrides)
    elif overrides:
        config = replace(config, **overrides)
    return BatchedLuxEnv(config, n)


def noop_maps(height: int, width: int) -> ActionMaps:
    """Channel maps that decode to move-Center / noop everywhere."""
    return ActionMaps(
        worker=np.full((height, width), 4, dtype=np.int64),
        cart=np.full((height, width), 4, dtype=np.int64),
        citytile=np.full((height, width), 3, dtype=np.int64),
    )
