"""The four recovery schemes behind one interface.

jobs     - one joint row-sparse solve over K resampled subproblems, columns
           averaged into the estimate.
bagging  - K independent LASSO solves on the subproblems, solutions averaged.
bolasso  - K independent LASSO solves, supports intersected, least-squares
           refit of the intersection on the full measurement set.
l1_min   - single LASSO on the full measurement set.

Each call is deterministic given (problem, plan, config); the penalty weight
cfg.lam is applied as-is by every scheme (no per-scheme rescaling).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_REL_TOL, as_matrix, as_vector, row_support, select_rows
from .sampling import SamplingPlan, generate_subsets
from .solver import (
    JointProblem,
    SolveReport,
    SolverConfig,
    admm_group_lasso,
    admm_lasso,
    least_squares_on_support,
)

METHODS = ("jobs", "bagging", "bolasso", "l1")


@dataclass
class SensingProblem:
    """Sensing matrix A (m x n) and measurement vector y (m)."""

    A: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.A = as_matrix(self.A, "A")
        self.y = as_vector(self.y, "y")
        if self.y.shape[0] != self.A.shape[0]:
            raise ValueError(
                f"y has length {self.y.shape[0]} but A has {self.A.shape[0]} rows"
            )

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]


@dataclass
class RecoveryResult:
    """Estimate plus per-predictor detail.

    support is the row support of x_hat at the default relative tolerance;
    per_estimate is the n x K matrix of per-subset solutions (None for l1).
    """

    x_hat: np.ndarray
    per_estimate: np.ndarray | None
    support: set[int]
    solver_reports: list[SolveReport]
    method: str


def _check_plan(prob: SensingProblem, plan: SamplingPlan):
    if plan.m != prob.m:
        raise ValueError(f"plan.m={plan.m} does not match problem rows m={prob.m}")


def _warm_state(warm: RecoveryResult | None, method: str, K: int):
    """Extract (x0, u0) per solve from a previous result of the same shape."""
    if warm is None:
        return [None] * K, [None] * K
    if warm.method != method:
        raise ValueError(f"warm result is from {warm.method!r}, expected {method!r}")
    if method == "jobs":
        rep = warm.solver_reports[0]
        return [rep.X], [rep.u]
    if len(warm.solver_reports) != K:
        raise ValueError("warm result has a different number of predictors")
    return ([r.X for r in warm.solver_reports], [r.u for r in warm.solver_reports])


def jobs(
    prob: SensingProblem,
    plan: SamplingPlan,
    cfg: SolverConfig,
    warm: RecoveryResult | None = None,
) -> RecoveryResult:
    """Joint row-sparse recovery over the plan's K subsets, columns averaged."""
    _check_plan(prob, plan)
    subsets = generate_subsets(plan)
    joint = JointProblem([(select_rows(prob.A, I), prob.y[I]) for I in subsets])
    x0s, u0s = _warm_state(warm, "jobs", 1)
    report = admm_group_lasso(joint, cfg, x0=x0s[0], u0=u0s[0])
    x_hat = report.X.mean(axis=1)
    return RecoveryResult(
        x_hat=x_hat,
        per_estimate=report.X,
        support=row_support(x_hat),
        solver_reports=[report],
        method="jobs",
    )


def _independent_solves(prob, plan, cfg, method, warm):
    subsets = generate_subsets(plan)
    x0s, u0s = _warm_state(warm, method, plan.K)
    reports = []
    for j, I in enumerate(subsets):
        reports.append(
            admm_lasso(select_rows(prob.A, I), prob.y[I], cfg, x0=x0s[j], u0=u0s[j])
        )
    per = np.column_stack([r.X[:, 0] for r in reports])
    return reports, per


def bagging(
    prob: SensingProblem,
    plan: SamplingPlan,
    cfg: SolverConfig,
    warm: RecoveryResult | None = None,
) -> RecoveryResult:
    """Average of K independently solved subset LASSOs."""
    _check_plan(prob, plan)
    reports, per = _independent_solves(prob, plan, cfg, "bagging", warm)
    x_hat = per.mean(axis=1)
    return RecoveryResult(
        x_hat=x_hat,
        per_estimate=per,
        support=row_support(x_hat),
        solver_reports=reports,
        method="bagging",
    )


def bolasso(
    prob: SensingProblem,
    plan: SamplingPlan,
    cfg: SolverConfig,
    rel_tol: float = DEFAULT_REL_TOL,
    warm: RecoveryResult | None = None,
) -> RecoveryResult:
    """Intersect the K subset-LASSO supports, refit least squares on the
    intersection using the full measurement set."""
    _check_plan(prob, plan)
    reports, per = _independent_solves(prob, plan, cfg, "bolasso", warm)
    common = row_support(per[:, 0], rel_tol)
    for j in range(1, plan.K):
        common &= row_support(per[:, j], rel_tol)
    x_hat = least_squares_on_support(prob.A, prob.y, common)
    return RecoveryResult(
        x_hat=x_hat,
        per_estimate=per,
        support=row_support(x_hat),
        solver_reports=reports,
        method="bolasso",
    )


def l1_min(
    prob: SensingProblem,
    cfg: SolverConfig,
    warm: RecoveryResult | None = None,
) -> RecoveryResult:
    """Single LASSO on all m measurements."""
    x0 = u0 = None
    if warm is not None:
        if warm.method != "l1":
            raise ValueError(f"warm result is from {warm.method!r}, expected 'l1'")
        x0, u0 = warm.solver_reports[0].X, warm.solver_reports[0].u
    report = admm_lasso(prob.A, prob.y, cfg, x0=x0, u0=u0)
    x_hat = report.X[:, 0]
    return RecoveryResult(
        x_hat=x_hat,
        per_estimate=None,
        support=row_support(x_hat),
        solver_reports=[report],
        method="l1",
    )
