"""Dyadic KDE point estimates, leave-out variants, and rule-of-thumb bandwidths.

All leave-one-out and leave-two-out estimates come from cached per-vertex
row sums, so the full set costs O(n^2) instead of the naive O(n^4).
Incomplete samples share the same algebra with denominators scaled by the
global observation fraction p-hat.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import (
    EmptyNetwork,
    IncompleteSampleRequiresIncompletePath,
    NonPositiveBandwidth,
    SampleTooSmall,
    ZeroSpreadSample,
)
from .kernels import KernelSpec
from .sample import DyadicSample, all_pairs, pair_index


@dataclass(frozen=True)
class KernelSums:
    """Shared precomputation for one (sample, kernel, x, h).

    ``k_pair`` holds h^-1 K((x - X_ij)/h) for each observed edge, aligned
    with the sample's edge arrays; ``row_sum[i-1]`` sums the weights of
    observed edges incident to vertex i, and ``total`` is half the row-sum
    total (every edge belongs to two rows).
    """

    x: float
    h: float
    n: int
    edge_i: np.ndarray
    edge_j: np.ndarray
    k_pair: np.ndarray
    row_sum: np.ndarray
    total: float
    n_observed: int
    p_hat: float


@dataclass(frozen=True)
class LeaveOutEstimates:
    """Point estimate plus every leave-one-out and leave-two-out estimate.

    ``theta_hat_ij`` covers all C(n,2) unordered pairs in canonical order
    (see sample.pair_index), whether or not the pair itself is observed.
    ``denominators`` is (N, N1, N2): C(n,2), C(n-1,2), C(n-2,2) scaled by
    the global p-hat when the sample is incomplete.
    """

    theta_hat: float
    theta_hat_i: np.ndarray
    theta_hat_ij: np.ndarray
    incomplete: bool
    denominators: tuple[float, float, float]
    n: int

    def leave_two_out(self, i: int, j: int) -> float:
        if i > j:
            i, j = j, i
        return float(self.theta_hat_ij[int(pair_index(self.n, i, j))])


def kernel_sums(sample: DyadicSample, kernel: KernelSpec, x: float, h: float) -> KernelSums:
    """Evaluate the kernel on every observed edge and cache row sums."""
    if not (np.isfinite(h) and h > 0.0):
        raise NonPositiveBandwidth(f"bandwidth must be positive, got {h}")
    if sample.observed_count == 0:
        raise EmptyNetwork("sample has no observed edges")
    k, row, total = _backend.kernel_sums_core(
        np.ascontiguousarray(sample.edge_i - 1, dtype=np.int32),
        np.ascontiguousarray(sample.edge_j - 1, dtype=np.int32),
        sample.edge_values,
        sample.n,
        float(x),
        float(h),
        kernel.kernel_id,
        kernel.support_radius,
    )
    return KernelSums(
        x=float(x),
        h=float(h),
        n=sample.n,
        edge_i=sample.edge_i,
        edge_j=sample.edge_j,
        k_pair=k,
        row_sum=row,
        total=total,
        n_observed=sample.observed_count,
        p_hat=sample.observed_fraction(),
    )


def _denominators(n: int, p_hat: float) -> tuple[float, float, float]:
    return (
        p_hat * (n * (n - 1) // 2),
        p_hat * ((n - 1) * (n - 2) // 2),
        p_hat * ((n - 2) * (n - 3) // 2),
    )


def density_estimate(sums: KernelSums, n: int) -> float:
    """Point estimate for complete samples: total / C(n,2)."""
    if sums.p_hat < 1.0:
        raise IncompleteSampleRequiresIncompletePath(
            f"sample observes p_hat={sums.p_hat:.6g} < 1 of its pairs"
        )
    return sums.total / (n * (n - 1) // 2)


def density_estimate_incomplete(sums: KernelSums, n: int) -> float:
    """Point estimate under randomly missing edges: total / (p_hat * C(n,2))."""
    if sums.n_observed == 0:
        raise EmptyNetwork("sample has no observed edges")
    return sums.total / (sums.p_hat * (n * (n - 1) // 2))


def leave_out_estimates(sums: KernelSums, n: int) -> LeaveOutEstimates:
    """All leave-out estimates from the cached row sums.

    Complete samples divide by C(n-1,2) and C(n-2,2); incomplete samples
    divide by the same counts scaled by the global p-hat.
    """
    if n < 4:
        raise SampleTooSmall(f"leave-two-out estimates need n >= 4, got n={n}")
    if sums.n_observed == 0:
        raise EmptyNetwork("sample has no observed edges")
    N, N1, N2 = _denominators(n, sums.p_hat)
    total = sums.total
    row = sums.row_sum
    theta_hat = total / N
    theta_i = (total - row) / N1

    iu, ju = all_pairs(n)
    k_full = np.zeros(n * (n - 1) // 2, dtype=np.float64)
    k_full[pair_index(n, sums.edge_i, sums.edge_j)] = sums.k_pair
    theta_ij = (total - row[iu - 1] - row[ju - 1] + k_full) / N2

    return LeaveOutEstimates(
        theta_hat=float(theta_hat),
        theta_hat_i=theta_i,
        theta_hat_ij=theta_ij,
        incomplete=sums.p_hat < 1.0,
        denominators=(N, N1, N2),
        n=n,
    )


def _rot_from_values(values: np.ndarray, pair_budget: float) -> float:
    sigma = float(np.std(values, ddof=1))
    iqr = float(np.percentile(values, 75) - np.percentile(values, 25))
    spread = min(sigma, iqr / 1.34)
    if spread <= 0.0:
        raise ZeroSpreadSample(
            "rule-of-thumb bandwidth undefined: zero standard deviation or IQR"
        )
    return 0.9 * spread * (2.0 / pair_budget) ** (2.0 / 9.0)


def rot_bandwidth(sample: DyadicSample) -> float:
    """Rule-of-thumb bandwidth for complete samples.

    0.9 * min(sigma, IQR/1.34) * (2 / (n(n-1)))^(2/9), with sigma and IQR
    taken over all C(n,2) edge values.
    """
    if not sample.complete():
        raise IncompleteSampleRequiresIncompletePath(
            "rule-of-thumb for complete data needs a fully observed sample"
        )
    n = sample.n
    return _rot_from_values(sample.edge_values, float(n) * (n - 1))


def rot_bandwidth_incomplete(sample: DyadicSample) -> float:
    """Rule-of-thumb bandwidth scaled by the effective sample size.

    Identical to the complete rule with n(n-1) replaced by p_hat * n(n-1)
    and the spread statistics computed over observed edges only.
    """
    if sample.observed_count == 0:
        raise EmptyNetwork("sample has no observed edges")
    n = sample.n
    p_hat = sample.observed_fraction()
    return _rot_from_values(sample.edge_values, p_hat * float(n) * (n - 1))


def density_profile(
    sample: DyadicSample, kernel: KernelSpec, xs, h: float
) -> np.ndarray:
    """Point estimates over a grid of design points (one shared bandwidth).

    Uses the incomplete-data denominator p_hat * C(n,2), which reduces to
    C(n,2) exactly on complete samples.
    """
    if not (np.isfinite(h) and h > 0.0):
        raise NonPositiveBandwidth(f"bandwidth must be positive, got {h}")
    if sample.observed_count == 0:
        raise EmptyNetwork("sample has no observed edges")
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    sums = _backend.density_grid(
        sample.edge_values, xs, float(h), kernel.kernel_id, kernel.support_radius
    )
    N = sample.observed_fraction() * (sample.n * (sample.n - 1) // 2)
    return sums / N


def integrates_to_one(
    sample: DyadicSample, kernel: KernelSpec, h: float, grid_points: int = 2001
) -> float:
    """Trapezoid mass of the estimate over the data range widened by the
    kernel support; a diagnostic, should be ~1 for complete samples."""
    lo = float(sample.edge_values.min()) - kernel.support_radius * h
    hi = float(sample.edge_values.max()) + kernel.support_radius * h
    xs = np.linspace(lo, hi, grid_points)
    dens = density_profile(sample, kernel, xs, h)
    return float(np.trapezoid(dens, xs))
