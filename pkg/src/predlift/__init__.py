"""predlift: fully dynamic algorithms from offline, incremental, and
decremental ones, given predictions of update times."""

from .model import (
    DELETE,
    END_OF_HORIZON,
    INSERT,
    Event,
    Horizon,
    Prediction,
    PredictionBundle,
    l1_error,
    validate_bundle_sequence,
)
from .engine import Engine, ScheduleBug, WorkCounters, drain, run_offline, run_predicted
from .incremental import lift_incremental, permanents_of
from .decremental import DecrementalRun, lift_decremental
from .boosting import Backstop, BoostConfig, SteppableEngine, backstop_run, boost_run
from .timetree import PartitionTree
from .scheduling import (
    Assignment,
    SlotLine,
    fix_ordering,
    greedy_assign,
    harmonic_assign,
    min_linf_error,
    optimal_offline_assign,
)
from .problems import (
    connectivity_contract,
    counter_contract,
    decremental_max_contract,
    msf_problem,
    oracle_daily_outputs,
)

__all__ = [
    "DELETE",
    "END_OF_HORIZON",
    "INSERT",
    "Event",
    "Horizon",
    "Prediction",
    "PredictionBundle",
    "l1_error",
    "validate_bundle_sequence",
    "Engine",
    "ScheduleBug",
    "WorkCounters",
    "drain",
    "run_offline",
    "run_predicted",
    "lift_incremental",
    "permanents_of",
    "DecrementalRun",
    "lift_decremental",
    "Backstop",
    "BoostConfig",
    "SteppableEngine",
    "backstop_run",
    "boost_run",
    "PartitionTree",
    "Assignment",
    "SlotLine",
    "fix_ordering",
    "greedy_assign",
    "harmonic_assign",
    "min_linf_error",
    "optimal_offline_assign",
    "connectivity_contract",
    "counter_contract",
    "decremental_max_contract",
    "msf_problem",
    "oracle_daily_outputs",
]
