"""Monte Carlo harness: scenario configs, replication driver, metrics."""

from .generate import gen_covariates, gen_missingness, gen_replicate, gen_response
from .metrics import (
    MetricsRow,
    MetricsTable,
    param_names,
    summarize,
    to_csv,
    to_missparams_csv,
    to_relbias_csv,
    truth_vector,
)
from .presets import (
    DEFAULT_BASE_SEED,
    PRESET_NAMES,
    REFERENCE_SIZES,
    REFERENCE_X1,
    RefRow,
    preset,
)
from .runner import (
    EstimatorFit,
    ReplicationRecord,
    ScenarioResult,
    default_workers,
    run_replicate,
    run_scenario,
)
from .scenarios import ALL_ESTIMATORS, ScenarioConfig

__all__ = [
    "ALL_ESTIMATORS",
    "DEFAULT_BASE_SEED",
    "EstimatorFit",
    "MetricsRow",
    "MetricsTable",
    "PRESET_NAMES",
    "REFERENCE_SIZES",
    "REFERENCE_X1",
    "RefRow",
    "ReplicationRecord",
    "ScenarioConfig",
    "ScenarioResult",
    "default_workers",
    "gen_covariates",
    "gen_missingness",
    "gen_replicate",
    "gen_response",
    "param_names",
    "preset",
    "run_replicate",
    "run_scenario",
    "summarize",
    "to_csv",
    "to_missparams_csv",
    "to_relbias_csv",
    "truth_vector",
]
