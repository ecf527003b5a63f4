"""Dense matrix/vector primitives shared by all modules.

Conventions: row-major numpy arrays, zero-based indices, float64 throughout.
A "matrix" is a 2-D ndarray, a "vector" is 1-D; validation helpers coerce and
check finiteness at public entry points.
"""

from __future__ import annotations

import numpy as np

#: Relative row-norm threshold used for support extraction. ADMM outputs are
#: only approximately sparse, so supports are read off against the largest row.
DEFAULT_REL_TOL = 1e-4


class DegenerateColumnError(ValueError):
    """A matrix column that must be nonzero is identically zero."""


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float64 array (C order)."""
    m = np.ascontiguousarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={m.ndim}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and column")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def as_vector(a, name: str = "vector") -> np.ndarray:
    """Coerce to a finite 1-D float64 array."""
    v = np.ascontiguousarray(a, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got ndim={v.ndim}")
    if v.shape[0] < 1:
        raise ValueError(f"{name} must have at least one entry")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    return v


def mixed_norm(X, p, q) -> float:
    """Mixed (p, q) norm: the p-norm of the vector of row q-norms.

    Only p, q in {1, 2} are supported; other exponents are rejected rather
    than silently computed.
    """
    if p not in (1, 2) or q not in (1, 2):
        raise ValueError(f"mixed_norm supports p, q in {{1, 2}}, got p={p}, q={q}")
    X = as_matrix(X, "X")
    if q == 1:
        rows = np.sum(np.abs(X), axis=1)
    else:
        rows = np.sqrt(np.sum(X * X, axis=1))
    if p == 1:
        return float(np.sum(rows))
    return float(np.sqrt(np.sum(rows * rows)))


def select_rows(A, indices) -> np.ndarray:
    """Stack the rows of A named by `indices`, in order, duplicates kept."""
    A = as_matrix(A, "A")
    idx = np.asarray(indices, dtype=np.intp)
    if idx.ndim != 1 or idx.size < 1:
        raise ValueError("indices must be a non-empty 1-D sequence")
    if np.any(idx < 0) or np.any(idx >= A.shape[0]):
        raise IndexError(
            f"row index out of range [0, {A.shape[0]}): "
            f"{int(idx[(idx < 0) | (idx >= A.shape[0])][0])}"
        )
    return A[idx]


def normalize_columns(M) -> tuple[np.ndarray, np.ndarray]:
    """Rescale columns of M to unit l2 norm.

    Returns (M_normalized, q) where q holds the reciprocal column norms, i.e.
    the diagonal of the normalization matrix; M_normalized = M * q and
    M = M_normalized / q.
    """
    M = as_matrix(M, "M")
    norms = np.sqrt(np.sum(M * M, axis=0))
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise DegenerateColumnError(f"column {int(zero[0])} is identically zero")
    q = 1.0 / norms
    return M * q, q


def row_support(X, rel_tol: float = DEFAULT_REL_TOL) -> set[int]:
    """Indices of rows whose l2 norm exceeds rel_tol times the largest row norm.

    Accepts a 1-D vector as a single-column matrix. Returns the empty set for
    an all-zero input.
    """
    if not 0.0 <= rel_tol < 1.0:
        raise ValueError(f"rel_tol must be in [0, 1), got {rel_tol}")
    Xa = np.asarray(X, dtype=np.float64)
    if Xa.ndim == 1:
        Xa = Xa[:, None]
    Xa = as_matrix(Xa, "X")
    norms = np.sqrt(np.sum(Xa * Xa, axis=1))
    top = norms.max()
    if top == 0.0:
        return set()
    return set(int(i) for i in np.flatnonzero(norms > rel_tol * top))
