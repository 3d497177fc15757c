"""Crowdsourced binary labeling with noisy XOR queries.

Synthesize query designs and worker answers, decode them with a four-phase
message-passing algorithm (or reference decoders), compare budgets against
the closed-form recovery threshold, and sweep error rates over budgets.
"""

from .baselines import EmState, em_one_coin, majority_vote
from .harness import (
    ExperimentConfig,
    ResultRow,
    read_csv,
    run_experiment,
    threshold_for,
    write_csv,
)
from .infer import InferenceConfig, InferenceResult, phase1, phase2, phase3, phase4, run
from .limits import LimitReport, homogeneous_limit, optimal_degree, xor_limit
from .model import (
    LAMBDA_DEFAULT,
    AnswerSet,
    ConfigError,
    DegreeDistribution,
    LabelVector,
    MissingInitializationError,
    Phase,
    Query,
    ReliabilityMatrix,
    TripartiteGraph,
    read_labels,
    read_query_file,
    read_reliability_csv,
    sign_rand,
    trunc,
    write_labels,
    write_query_file,
    write_reliability_csv,
)
from .noise import NoiseSpec, answer_queries, build_reliability, coin_flip_epsilon, true_xor
from .oracle import MlReport, log_likelihood, ml_decode
from .querygen import QueryGenConfig, generate_queries, partition_phases, sample_degree
from .report import plot_csv_files, plot_error_curves

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "LAMBDA_DEFAULT",
    "AnswerSet",
    "ConfigError",
    "DegreeDistribution",
    "EmState",
    "ExperimentConfig",
    "InferenceConfig",
    "InferenceResult",
    "LabelVector",
    "LimitReport",
    "MissingInitializationError",
    "MlReport",
    "NoiseSpec",
    "Phase",
    "Query",
    "QueryGenConfig",
    "ReliabilityMatrix",
    "ResultRow",
    "TripartiteGraph",
    "answer_queries",
    "build_reliability",
    "coin_flip_epsilon",
    "em_one_coin",
    "generate_queries",
    "homogeneous_limit",
    "log_likelihood",
    "majority_vote",
    "ml_decode",
    "optimal_degree",
    "partition_phases",
    "phase1",
    "phase2",
    "phase3",
    "phase4",
    "plot_csv_files",
    "plot_error_curves",
    "read_csv",
    "read_labels",
    "read_query_file",
    "read_reliability_csv",
    "run",
    "run_experiment",
    "sample_degree",
    "sign_rand",
    "threshold_for",
    "true_xor",
    "trunc",
    "write_csv",
    "write_labels",
    "write_query_file",
    "write_reliability_csv",
    "xor_limit",
]
