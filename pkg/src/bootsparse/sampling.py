"""Resampled index-set generation and distinct-count (birthday) statistics.

Subsets are drawn from counter-based streams keyed by (master_seed, j), so
subset j is reproducible on its own and generation order never matters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SCHEMES = ("bootstrap", "subsample")


@dataclass(frozen=True)
class SamplingPlan:
    """How to draw K index multisets of size L from m measurement rows."""

    m: int
    L: int
    K: int
    scheme: str = "bootstrap"
    master_seed: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.scheme == "subsample" and self.L > self.m:
            raise ValueError(
                f"subsample requires L <= m, got L={self.L}, m={self.m}"
            )


def _subset_rng(master_seed: int, j: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((master_seed, j))))


def subset_indices(plan: SamplingPlan, j: int) -> np.ndarray:
    """Draw the j-th index multiset of the plan (independent of the others)."""
    if not 0 <= j < plan.K:
        raise ValueError(f"subset index {j} outside [0, {plan.K})")
    rng = _subset_rng(plan.master_seed, j)
    if plan.scheme == "bootstrap":
        return rng.integers(0, plan.m, size=plan.L, dtype=np.int64)
    return rng.permutation(plan.m)[: plan.L].astype(np.int64)


def generate_subsets(plan: SamplingPlan) -> list[np.ndarray]:
    """All K index multisets of the plan, a deterministic function of the seed."""
    return [subset_indices(plan, j) for j in range(plan.K)]


def distinct_count_pmf(m: int, L: int) -> np.ndarray:
    """Distribution of the number of distinct values among L uniform draws
    (with replacement) from m items.

    Returns p of length L with p[v-1] = P(V = v); entries for v > m are zero.
    Evaluated by the occupancy chain (draw l+1 hits an already-seen value with
    probability v/m), which keeps every term nonnegative: the alternating
    closed form cancels catastrophically in floating point for m, L ~ 200.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    vmax = min(L, m)
    p = np.zeros(vmax + 1)
    p[1] = 1.0  # after the first draw exactly one distinct value
    for _ in range(1, L):
        stay = p[1:] * (np.arange(1, vmax + 1) / m)
        grow = p[:-1] * ((m - np.arange(0, vmax)) / m)
        p[1:] = stay + grow
        p[0] = 0.0
    out = np.zeros(L)
    out[:vmax] = p[1:]
    return out


def distinct_tail(m: int, L: int, d: int) -> float:
    """P(V >= d) for the distinct-count distribution above."""
    if not 1 <= d <= L:
        raise ValueError(f"d must be in [1, {L}], got {d}")
    pmf = distinct_count_pmf(m, L)
    head = float(np.sum(pmf[: d - 1]))
    return min(1.0, max(0.0, 1.0 - head))


def distinct_lower_bound(m: int, L: int, alpha: float) -> int:
    """Largest d with P(V >= d) >= 1 - alpha; 1 if no larger d qualifies."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    pmf = distinct_count_pmf(m, L)
    head = 0.0
    best = 1
    for d in range(1, L + 1):
        # head = P(V < d); tail computed as complement, as in distinct_tail
        tail = min(1.0, max(0.0, 1.0 - head))
        if tail >= 1.0 - alpha:
            best = d
        head += float(pmf[d - 1])
    return best
