"""luxenv: reset/step environment bindings over the luxsim engine."""

from .env import (
    BatchedLuxEnv,
    EnvConfig,
    LuxEnv,
    StepResult,
    make,
    make_batched,
    noop_maps,
)

__version__ = "1.0.0"
