"""Backward responsibility of states for safety-property counterexamples."""

from .coop import CoopGame, PlayerCapExceeded, Variant, build_win_table, minimal_winning, value, winning_states
from .game import EngravedGame, GameArena, Player, Winner, engrave, solve
from .responsibility import (
    ResponsibilityReport,
    SamplingPlan,
    estimate,
    exact,
    has_safe_path,
    optimistic_fast,
    plan_samples,
)
from .ts import (
    Coalition,
    Counterexample,
    StateGrouping,
    TransitionSystem,
    ValidationError,
    make_grouping,
    validate_counterexample,
    validate_system,
)
from .tsr import Model, emit_tsr, parse_tsr
from .weights import WeightVector, banzhaf_weights, shapley_weights, validate_custom

__version__ = "0.1.0"
