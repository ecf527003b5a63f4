"""ADMM solver for the row-sparse penalized least-squares objective

    lam * ||X||_{1,2} + 1/2 * sum_j ||y_j - A_j x_j||_2^2

over K predictor columns with per-column design matrices, plus the K=1 LASSO
as a special case and a restricted least-squares refit.

Splitting: consensus variable Z with X = Z. The x_j-update solves
(A_j^T A_j + rho I) x_j = A_j^T y_j + rho (z_j - u_j) against a factorization
cached across iterations; when L_j < n the solve is carried out in the
L_j-dimensional dual space through the matrix-inversion identity. The Z-update
is the row-wise block soft threshold at lam/rho, so the reported solution is
exactly row-sparse. Stopping uses the combined absolute/relative primal and
dual residual rule. Fixed rho, no over-relaxation: iterates are deterministic.

The per-iteration loop runs in a compiled core when the extension is
available and falls back to a NumPy implementation otherwise; set
BOOTSPARSE_BACKEND=python to force the fallback.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import _admm_py
from .linalg import as_matrix, as_vector, mixed_norm

if os.environ.get("BOOTSPARSE_BACKEND", "").lower() == "python":
    _backend = _admm_py
    BACKEND = "python"
else:
    try:
        from . import _admm_cy as _backend

        BACKEND = "cython"
    except ImportError:  # extension not built
        _backend = _admm_py
        BACKEND = "python"


def solver_backend() -> str:
    """Name of the active inner-loop implementation: 'cython' or 'python'."""
    return BACKEND


class SolverDivergenceError(RuntimeError):
    """Non-finite values appeared during the ADMM iteration."""


@dataclass
class SolverConfig:
    """Penalty weight and ADMM knobs. lam >= 0, rho > 0, tolerances > 0."""

    lam: float
    rho: float = 1.0
    max_iter: int = 2000
    eps_abs: float = 1e-6
    eps_rel: float = 1e-4

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam >= 0.0):
            raise ValueError(f"lam must be finite and >= 0, got {self.lam}")
        if not (math.isfinite(self.rho) and self.rho > 0.0):
            raise ValueError(f"rho must be finite and > 0, got {self.rho}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if not (self.eps_abs > 0.0 and self.eps_rel > 0.0):
            raise ValueError("eps_abs and eps_rel must be > 0")


@dataclass
class JointProblem:
    """K (A_j, y_j) pairs sharing the coefficient dimension n."""

    pairs: list[tuple[np.ndarray, np.ndarray]]

    def __post_init__(self):
        if len(self.pairs) < 1:
            raise ValueError("JointProblem needs at least one (A, y) pair")
        checked = []
        n = None
        for j, (A, y) in enumerate(self.pairs):
            A = as_matrix(A, f"A_{j}")
            y = as_vector(y, f"y_{j}")
            if y.shape[0] != A.shape[0]:
                raise ValueError(
                    f"pair {j}: y has length {y.shape[0]} but A has {A.shape[0]} rows"
                )
            if n is None:
                n = A.shape[1]
            elif A.shape[1] != n:
                raise ValueError(
                    f"pair {j}: expected {n} columns, got {A.shape[1]}"
                )
            checked.append((A, y))
        self.pairs = checked

    @property
    def K(self) -> int:
        return len(self.pairs)

    @property
    def n(self) -> int:
        return self.pairs[0][0].shape[1]


@dataclass
class SolveReport:
    """Solution and final-iteration diagnostics of one ADMM solve.

    X is the thresholded consensus variable (n x K, exactly row-sparse);
    u is the final scaled dual, kept so a later solve can warm-start.
    """

    X: np.ndarray
    iterations: int
    primal_residual: float
    dual_residual: float
    objective: float
    converged: bool
    u: np.ndarray | None = field(repr=False, default=None)


def objective_value(prob: JointProblem, X: np.ndarray, lam: float) -> float:
    """Evaluate the penalized objective at X."""
    fit = 0.0
    for j, (A, y) in enumerate(prob.pairs):
        resid = y - A @ X[:, j]
        fit += float(resid @ resid)
    return lam * mixed_norm(X, 1, 2) + 0.5 * fit


def _column_operator(A: np.ndarray, rho: float) -> tuple[np.ndarray, bool]:
    """Cached inverse for the x-update; dual-space form when rows < cols."""
    L, n = A.shape
    if L < n:
        return np.linalg.inv(rho * np.eye(L) + A @ A.T), True
    return np.linalg.inv(A.T @ A + rho * np.eye(n)), False


def _iterate_ragged(As, Ws, woods, AtY, Z, U, rho, thresh, max_iter, eps_abs, eps_rel):
    """NumPy loop for pairs with differing row counts; mirrors the kernels."""
    n, K = AtY.shape
    tol0 = math.sqrt(n * K) * eps_abs
    it_done = 0
    r = s = math.inf
    converged = False
    X = np.empty((n, K))
    with np.errstate(over="ignore", invalid="ignore"):
        for it in range(1, max_iter + 1):
            V = AtY + rho * (Z - U)
            for j in range(K):
                if woods[j]:
                    t = As[j] @ V[:, j]
                    X[:, j] = (V[:, j] - As[j].T @ (Ws[j] @ t)) / rho
                else:
                    X[:, j] = Ws[j] @ V[:, j]
            if not np.all(np.isfinite(X)):
                return it, r, s, False, it
            G = X + U
            rn = np.sqrt(np.sum(G * G, axis=1))
            scale = np.where(rn > thresh, 1.0 - thresh / np.where(rn > 0.0, rn, 1.0), 0.0)
            Zn = G * scale[:, None]
            r = float(np.linalg.norm(X - Zn))
            s = rho * float(np.linalg.norm(Zn - Z))
            U += X - Zn
            Z[:] = Zn
            eps_pri = tol0 + eps_rel * max(float(np.linalg.norm(X)), float(np.linalg.norm(Zn)))
            eps_dual = tol0 + eps_rel * rho * float(np.linalg.norm(U))
            it_done = it
            if r <= eps_pri and s <= eps_dual:
                converged = True
                break
    return it_done, r, s, converged, -1


def admm_group_lasso(
    prob: JointProblem,
    cfg: SolverConfig,
    x0: np.ndarray | None = None,
    u0: np.ndarray | None = None,
) -> SolveReport:
    """Minimize lam*||X||_{1,2} + 1/2 sum_j ||y_j - A_j x_j||^2.

    x0/u0 warm-start the consensus and scaled dual variables (both n x K);
    the default start is all zeros.
    """
    n, K = prob.n, prob.K
    AtY = np.empty((n, K))
    ops, woods = [], []
    for j, (A, y) in enumerate(prob.pairs):
        AtY[:, j] = A.T @ y
        W, wood = _column_operator(A, cfg.rho)
        ops.append(W)
        woods.append(wood)

    if x0 is None:
        Z = np.zeros((n, K))
    else:
        Z = np.array(x0, dtype=np.float64, order="C", copy=True)
        if Z.shape != (n, K):
            raise ValueError(f"x0 must have shape {(n, K)}, got {Z.shape}")
    if u0 is None:
        U = np.zeros((n, K))
    else:
        U = np.array(u0, dtype=np.float64, order="C", copy=True)
        if U.shape != (n, K):
            raise ValueError(f"u0 must have shape {(n, K)}, got {U.shape}")

    thresh = cfg.lam / cfg.rho
    lengths = {A.shape[0] for A, _ in prob.pairs}
    if len(lengths) == 1:
        A3 = np.ascontiguousarray(np.stack([A for A, _ in prob.pairs]))
        W3 = np.ascontiguousarray(np.stack(ops))
        it, r, s, converged, bad = _backend.admm_iterate(
            A3, W3, AtY, Z, U, cfg.rho, thresh,
            cfg.max_iter, cfg.eps_abs, cfg.eps_rel, woods[0],
        )
    else:
        it, r, s, converged, bad = _iterate_ragged(
            [A for A, _ in prob.pairs], ops, woods, AtY, Z, U,
            cfg.rho, thresh, cfg.max_iter, cfg.eps_abs, cfg.eps_rel,
        )
    if bad >= 0:
        raise SolverDivergenceError(
            f"non-finite iterate at ADMM iteration {bad}"
        )
    return SolveReport(
        X=Z,
        iterations=it,
        primal_residual=r,
        dual_residual=s,
        objective=objective_value(prob, Z, cfg.lam),
        converged=converged,
        u=U,
    )


def admm_lasso(
    A,
    y,
    cfg: SolverConfig,
    x0: np.ndarray | None = None,
    u0: np.ndarray | None = None,
) -> SolveReport:
    """LASSO via the K=1 joint problem (pure delegation; X comes back n x 1)."""
    return admm_group_lasso(JointProblem([(A, y)]), cfg, x0=x0, u0=u0)


def least_squares_on_support(A, y, support) -> np.ndarray:
    """Minimum-norm least squares restricted to `support`, zero elsewhere."""
    A = as_matrix(A, "A")
    y = as_vector(y, "y")
    if y.shape[0] != A.shape[0]:
        raise ValueError("A and y have incompatible shapes")
    n = A.shape[1]
    x = np.zeros(n)
    idx = sorted(int(i) for i in support)
    if not idx:
        return x
    if idx[0] < 0 or idx[-1] >= n:
        raise IndexError(f"support index out of range [0, {n})")
    sol, *_ = np.linalg.lstsq(A[:, idx], y, rcond=None)
    x[idx] = sol
    return x
