"""Numeric evaluators for recovery-theory quantities at desk scale.

Covers: the C0/C1 recovery constants, exhaustive restricted-isometry constants
(subset enumeration, so only small n), the block constant for a family of row
subsets, expected resampled noise power, probabilistic error bounds for the
joint and bagged schemes in exact-sparse and general modes, the
distinct-sample complexity expression, and the basic Hoeffding tail.

Everything here is a pure function of scalars or small dense matrices; the
probability outputs are lower bounds and get clamped into [0, 1] (the raw
expressions go negative for small K), with the clamping flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .linalg import DegenerateColumnError, as_matrix, normalize_columns, select_rows

#: Upper limit of the admissible isometry-constant range, sqrt(2) - 1.
DELTA_MAX = math.sqrt(2.0) - 1.0


def c_constants(delta: float) -> tuple[float, float]:
    """Recovery constants (C0, C1) as functions of the isometry constant.

    C0 = 2(1 - (1 - sqrt2) d) / (1 - (1 + sqrt2) d)
    C1 = 4 sqrt(1 + d) / (1 - (1 + sqrt2) d),  valid for 0 <= d < sqrt2 - 1.
    """
    if not (0.0 <= delta < DELTA_MAX):
        raise ValueError(
            f"delta must lie in [0, sqrt(2)-1 = {DELTA_MAX:.12f}), got {delta}"
        )
    s2 = math.sqrt(2.0)
    den = 1.0 - (1.0 + s2) * delta
    c0 = 2.0 * (1.0 - (1.0 - s2) * delta) / den
    c1 = 4.0 * math.sqrt(1.0 + delta) / den
    return c0, c1


@dataclass
class RipQuery:
    """Matrix with unit-norm columns plus the sparsity order to enumerate."""

    A: np.ndarray
    s: int
    cap: int = 2_000_000

    def __post_init__(self):
        self.A = as_matrix(self.A, "A")
        n = self.A.shape[1]
        if not 1 <= self.s <= n:
            raise ValueError(f"s must be in [1, {n}], got {self.s}")
        norms = np.sqrt(np.sum(self.A * self.A, axis=0))
        if np.any(np.abs(norms - 1.0) > 1e-8):
            raise ValueError(
                "columns must be unit l2 norm (normalize_columns first)"
            )
        count = math.comb(n, self.s)
        if count > self.cap:
            raise ValueError(
                f"enumeration of C({n},{self.s})={count} column subsets exceeds "
                f"cap {self.cap}; reduce n or s"
            )


def rip_constant_exhaustive(query: RipQuery) -> float:
    """Worst spectral deviation of any s-column Gram block from the identity.

    Equals the maximum over subsets of exactly size s (the quantity is
    monotone in the subset). Subsets are enumerated lexicographically.
    """
    A, s = query.A, query.s
    gram = A.T @ A
    eye = np.eye(s)
    worst = 0.0
    for cols in combinations(range(A.shape[1]), s):
        sub = gram[np.ix_(cols, cols)] - eye
        ev = np.linalg.eigvalsh(sub)
        dev = max(abs(float(ev[0])), abs(float(ev[-1])))
        if dev > worst:
            worst = dev
    return worst


def brip_jobs(A, subsets, s: int, cap: int = 2_000_000) -> float:
    """Block isometry constant of the stacked row-subset family: the maximum
    per-subset constant after column normalization of each submatrix."""
    A = as_matrix(A, "A")
    if len(subsets) < 1:
        raise ValueError("need at least one row subset")
    worst = 0.0
    for j, idx in enumerate(subsets):
        sub = select_rows(A, idx)
        try:
            normalized, _ = normalize_columns(sub)
        except DegenerateColumnError as exc:
            raise DegenerateColumnError(f"row subset {j}: {exc}") from None
        worst = max(worst, rip_constant_exhaustive(RipQuery(normalized, s, cap)))
    return worst


def expected_noise_power(K: int, L: int, m: int, z_l2: float) -> float:
    """Expected total power of the K stacked size-L resampled noise vectors:
    K * L * ||z||_2^2 / m."""
    if m < 1 or L < 1 or K < 1:
        raise ValueError("K, L, m must all be >= 1")
    return K * L * z_l2 * z_l2 / m


@dataclass
class BoundInputs:
    """Scalar inputs of the probabilistic error bounds.

    In general (not exactly sparse) mode the z_l2 field of the joint-scheme
    bound carries ||A e + z||_2, computed by the caller on the augmented
    noise; all other fields keep their plain meaning.
    """

    delta: float
    L: int
    m: int
    K: int
    tau: float
    z_l2: float
    z_linf: float
    s: int = 0
    e_l1: float = 0.0
    e_l2: float = 0.0
    e_linf: float = 0.0
    a_inf1: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.delta < DELTA_MAX):
            raise ValueError(f"delta must lie in [0, {DELTA_MAX:.12f})")
        if self.L < 1 or self.m < 1 or self.K < 1:
            raise ValueError("L, m, K must all be >= 1")
        if not (math.isfinite(self.tau) and self.tau > 0.0):
            raise ValueError(f"tau must be finite and > 0, got {self.tau}")
        for name in ("z_l2", "z_linf", "e_l1", "e_l2", "e_linf", "a_inf1"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        if self.z_linf > self.z_l2 * (1.0 + 1e-12):
            raise ValueError("inconsistent norms: z_linf exceeds z_l2")


@dataclass
class BoundOutput:
    """Error bound plus the clamped probability lower bound."""

    error_bound: float
    probability_lower_bound: float
    clamped: bool = False


def _prob_from_exponent(num: float, den: float) -> tuple[float, bool]:
    """1 - exp(-num/den) clamped to [0, 1]; den == 0 is the noiseless limit."""
    if den == 0.0:
        return 1.0, False
    p = 1.0 - math.exp(-num / den)
    if p < 0.0:
        return 0.0, True
    return p, False


def jobs_error_bound(inputs: BoundInputs, exact_sparse: bool) -> BoundOutput:
    """Error/probability bound for the joint scheme.

    exact_sparse: bound C1(d)(sqrt(L/m)||z||_2 + tau), certainty
    1 - exp(-2 K tau^4 / (L ||z||_inf^4)). General mode adds ||e||_2 to the
    bound, reads z_l2 as ||A e + z||_2 and replaces ||z||_inf by
    ||A||_{inf,1} ||e||_inf + ||z||_inf in the exponent.
    """
    _, c1 = c_constants(inputs.delta)
    core = c1 * (math.sqrt(inputs.L / inputs.m) * inputs.z_l2 + inputs.tau)
    num = 2.0 * inputs.K * inputs.tau**4
    if exact_sparse:
        bound = core
        den = inputs.L * inputs.z_linf**4
    else:
        bound = inputs.e_l2 + core
        den = inputs.L * (inputs.a_inf1 * inputs.e_linf + inputs.z_linf) ** 4
    prob, clamped = _prob_from_exponent(num, den)
    return BoundOutput(bound, prob, clamped)


def bagging_error_bound(inputs: BoundInputs, exact_sparse: bool) -> BoundOutput:
    """Error/probability bound for the bagged scheme.

    exact_sparse: same error bound as the joint scheme but certainty
    1 - exp(-2 K tau^4 / (L^2 ||z||_inf^4)). General mode adds the sparse
    approximation term C0(d) s^{-1/2} ||e||_1 to the bound and uses
    1 - exp(-2 K C1^4 tau^4 / b'^2), b' = (C0 s^{-1/2}||e||_1 + C1 sqrt(L)||z||_inf)^2.
    """
    c0, c1 = c_constants(inputs.delta)
    core = c1 * (math.sqrt(inputs.L / inputs.m) * inputs.z_l2 + inputs.tau)
    if exact_sparse:
        bound = core
        num = 2.0 * inputs.K * inputs.tau**4
        den = float(inputs.L) ** 2 * inputs.z_linf**4
    else:
        if inputs.s < 1:
            raise ValueError("general mode needs the sparsity order s >= 1")
        eps_s = c0 * inputs.e_l1 / math.sqrt(inputs.s)
        bound = eps_s + core
        bprime = (eps_s + c1 * math.sqrt(inputs.L) * inputs.z_linf) ** 2
        num = 2.0 * inputs.K * c1**4 * inputs.tau**4
        den = bprime**2
    prob, clamped = _prob_from_exponent(num, den)
    return BoundOutput(bound, prob, clamped)


def sample_complexity_jobs(
    n: int,
    s: int,
    K: int,
    alpha: float,
    mu: float,
    beta: float = 1.0,
    delta: float = DELTA_MAX - 1e-12,
) -> int:
    """Distinct-sample count sufficient for the joint scheme's isometry event:

        ceil( beta d^-2 ( 2 s ln(n/(2 s)) + ln K
              + ln((1-alpha)^K / ((1-alpha)^K - (1-mu))) ) )

    The universal constant beta is an input (default 1), so returned values
    are comparative rather than absolute. Requires (1-alpha)^K > 1-mu.
    """
    if n < 1 or s < 1 or K < 1:
        raise ValueError("n, s, K must all be >= 1")
    if not (0.0 < alpha <= mu < 1.0):
        raise ValueError(f"need 0 < alpha <= mu < 1, got alpha={alpha}, mu={mu}")
    if not (0.0 < delta < DELTA_MAX):
        raise ValueError(f"delta must lie in (0, {DELTA_MAX:.12f}), got {delta}")
    if not beta > 0.0:
        raise ValueError(f"beta must be > 0, got {beta}")
    surv = (1.0 - alpha) ** K
    gap = surv - (1.0 - mu)
    if gap <= 0.0:
        raise ValueError(
            f"infeasible: (1-alpha)^K = {surv:.6g} <= 1-mu = {1.0 - mu:.6g}; "
            "the distinct-count certainty cannot support the target level"
        )
    value = beta * delta**-2 * (
        2.0 * s * math.log(n / (2.0 * s)) + math.log(K) + math.log(surv / gap)
    )
    return max(1, math.ceil(value))


def hoeffding_tail(n: int, eps: float, a: float, b: float, mean: float) -> float:
    """Upper tail bound exp(-2 n (eps - mean)^2 / (b - a)^2) for the average
    of n i.i.d. variables bounded in [a, b]; vacuous (1) when eps <= mean."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    if eps <= mean:
        return 1.0
    val = math.exp(-2.0 * n * (eps - mean) ** 2 / (b - a) ** 2)
    return min(1.0, max(0.0, val))
