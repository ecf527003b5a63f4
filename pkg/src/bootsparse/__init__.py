"""Sparse recovery from resampled measurements.

Recover an s-sparse signal from y = A x + z by drawing K row subsets of the
measurements (bootstrap or subsample) and combining per-subset estimates:
jointly with a row-sparsity penalty, by averaging, or by support
intersection. Includes desk-scale evaluators for the associated
restricted-isometry and tail-bound quantities and a seeded simulation sweep
harness.
"""

from .analysis import (
    DELTA_MAX,
    BoundInputs,
    BoundOutput,
    RipQuery,
    bagging_error_bound,
    brip_jobs,
    c_constants,
    expected_noise_power,
    hoeffding_tail,
    jobs_error_bound,
    rip_constant_exhaustive,
    sample_complexity_jobs,
)
from .estimators import (
    METHODS,
    RecoveryResult,
    SensingProblem,
    bagging,
    bolasso,
    jobs,
    l1_min,
)
from .experiments import (
    CSV_HEADER,
    InstanceSpec,
    SweepRecord,
    SweepSpec,
    default_lambda_grid,
    generate_instance,
    lambda_search,
    recovery_snr,
    run_sweep,
)
from .linalg import (
    DEFAULT_REL_TOL,
    DegenerateColumnError,
    mixed_norm,
    normalize_columns,
    row_support,
    select_rows,
)
from .sampling import (
    SamplingPlan,
    distinct_count_pmf,
    distinct_lower_bound,
    distinct_tail,
    generate_subsets,
    subset_indices,
)
from .solver import (
    JointProblem,
    SolveReport,
    SolverConfig,
    SolverDivergenceError,
    admm_group_lasso,
    admm_lasso,
    least_squares_on_support,
    objective_value,
    solver_backend,
)

__version__ = "0.1.0"
