"""NumPy fallback for the ADMM inner loop (same contract as the compiled core).

The iterate state is a pair of (n, K) arrays Z (row-thresholded consensus) and
U (scaled dual), both updated in place. Per-predictor data comes stacked:
A is (K, L, n) and W holds the cached inverse of either (rho I + A_j A_j^T)
(L < n, dual-space update) or (A_j^T A_j + rho I).
"""

from __future__ import annotations

import math

import numpy as np


def admm_iterate(A, W, AtY, Z, U, rho, thresh, max_iter, eps_abs, eps_rel, woodbury):
    """Run up to max_iter scaled-dual iterations in place.

    Returns (iterations, primal_residual, dual_residual, converged, bad_iter)
    where bad_iter is the 1-based iteration at which a non-finite value first
    appeared, or -1.
    """
    n, K = AtY.shape
    tol0 = math.sqrt(n * K) * eps_abs
    it_done = 0
    r = s = math.inf
    converged = False
    # overflow/invalid propagation is detected and reported via bad_iter
    with np.errstate(over="ignore", invalid="ignore"):
        for it in range(1, max_iter + 1):
            V = AtY + rho * (Z - U)
            VT = V.T[:, :, None]  # (K, n, 1)
            if woodbury:
                T = np.matmul(A, VT)  # (K, L, 1)
                X = (V - np.matmul(A.transpose(0, 2, 1), np.matmul(W, T))[:, :, 0].T) / rho
            else:
                X = np.matmul(W, VT)[:, :, 0].T
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
