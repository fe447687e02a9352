"""Analysis, optimization, and simulation of IR-HARQ with unreliable feedback.

The package splits along the signal chain: mi_model covers the downlink
(fading, accumulated mutual information, decoding-failure probabilities),
feedback_model the uplink (single-bit detection geometry and error rates),
harq_analysis the protocol-level performance formulas, optimizer the
constrained rate/threshold search, mc_simulator the end-to-end Monte
Carlo oracle, and cli the file-driven workflows.
"""

from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateStateError,
    GridError,
    HarqOptError,
    InfeasibleError,
)
from .feedback_model import (
    FeedbackErrorRates,
    FeedbackSpec,
    ack_error_rate,
    build_sequences,
    error_rates_for,
    make_feedback_spec,
    nack_error_rate,
    simulate_detection,
)
from .harq_analysis import (
    HarqPolicy,
    PerformanceBreakdown,
    duplicated_ack_performance,
    duplicated_ack_rates,
    expected_symbols,
    occurrence_probabilities,
    outage_from_failures,
    reliable_throughput,
    stage_outage,
    transmission_probabilities,
    unreliable_outage,
    unreliable_throughput,
)
from .mc_simulator import (
    EpisodeOutcome,
    SimulationEstimate,
    estimate_duplicated_ack,
    estimate_performance,
    run_episode,
)
from .mi_model import (
    DownlinkSpec,
    RateVector,
    make_downlink_spec,
    mean_mi_closed_form,
    mi_of_gain,
    p_fail_convolution,
    p_fail_gaussian,
)
from .optimizer import (
    OptimizerConfig,
    RateGrid,
    Solution,
    alternating_optimize,
    best_feasible_allocation,
    brute_force_rate_allocation,
    dp_rate_allocation,
    make_rate_grid,
    min_achievable_outage,
    optimize_thresholds_pgd,
    solve_lambda,
    solve_lambda_for_rates,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DegenerateStateError",
    "DownlinkSpec",
    "EpisodeOutcome",
    "FeedbackErrorRates",
    "FeedbackSpec",
    "GridError",
    "HarqOptError",
    "HarqPolicy",
    "InfeasibleError",
    "OptimizerConfig",
    "PerformanceBreakdown",
    "RateGrid",
    "RateVector",
    "SimulationEstimate",
    "Solution",
    "ack_error_rate",
    "alternating_optimize",
    "best_feasible_allocation",
    "brute_force_rate_allocation",
    "build_sequences",
    "dp_rate_allocation",
    "duplicated_ack_performance",
    "duplicated_ack_rates",
    "error_rates_for",
    "estimate_duplicated_ack",
    "estimate_performance",
    "expected_symbols",
    "make_downlink_spec",
    "make_feedback_spec",
    "make_rate_grid",
    "mean_mi_closed_form",
    "mi_of_gain",
    "min_achievable_outage",
    "occurrence_probabilities",
    "optimize_thresholds_pgd",
    "outage_from_failures",
    "p_fail_convolution",
    "p_fail_gaussian",
    "reliable_throughput",
    "run_episode",
    "simulate_detection",
    "solve_lambda",
    "solve_lambda_for_rates",
    "stage_outage",
    "transmission_probabilities",
    "unreliable_outage",
    "unreliable_throughput",
    "__version__",
]
