"""Monte-Carlo reproduction of the iterated-smoothing experiments."""

from .functions import FUNCTION_IDS, function_range, noise_sd, true_function
from .harness import (
    CellSummary,
    ReplicationRecord,
    ReplicationResult,
    SimSummary,
    grid_mse,
    late_vs_early,
    oracle_k_opt,
    run_replication,
    run_scenario,
    summarize,
    tune_comparison,
)
from .scenario import (
    PilotConfig,
    Replication,
    SimScenario,
    default_pilots,
    generate_replication,
    load_scenarios,
)
from .tables import write_records_csv, write_table_csv

__all__ = [
    "FUNCTION_IDS",
    "CellSummary",
    "PilotConfig",
    "Replication",
    "ReplicationRecord",
    "ReplicationResult",
    "SimScenario",
    "SimSummary",
    "default_pilots",
    "function_range",
    "generate_replication",
    "grid_mse",
    "late_vs_early",
    "load_scenarios",
    "noise_sd",
    "oracle_k_opt",
    "run_replication",
    "run_scenario",
    "summarize",
    "true_function",
    "tune_comparison",
    "write_records_csv",
    "write_table_csv",
]
