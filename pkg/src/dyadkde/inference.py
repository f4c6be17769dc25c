"""Jackknife empirical likelihood inference for the dyadic KDE.

The leave-one-out pseudo-values are affine in the hypothesized density
value theta with slope -1, so a single vector ``a`` (their intercepts)
supports evaluation at every theta. The leave-two-out contrasts are
theta-free, and their squared sum is accumulated in closed form from the
cached row sums, so a full statistic evaluation is O(n + observed edges).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2, norm

from . import _backend
from .errors import (
    BracketFailure,
    EmptyNetwork,
    NonFiniteInput,
    NonPositiveModifiedVariance,
    SampleTooSmall,
)
from .estimator import KernelSums, LeaveOutEstimates, _denominators, kernel_sums
from .kernels import KernelSpec
from .sample import DyadicSample, all_pairs

JEL = "JEL"
MJEL = "mJEL"
MJK = "mJK-Wald"


@dataclass(frozen=True)
class PseudoValueSet:
    """Pseudo-values and variance pieces for one (sample, x, h, theta).

    ``v_at_theta[i]`` is the leave-one-out pseudo-value at the hypothesized
    theta; ``q`` holds the theta-free leave-two-out contrasts for all
    unordered pairs in canonical order. ``gamma_m_sq`` may be non-positive
    in finite samples; consumers that need the modified correction must
    treat that as an error (see modified_pseudo_values).
    """

    theta: float
    theta_hat: float
    v_at_theta: np.ndarray
    v_at_theta_hat: np.ndarray
    q: np.ndarray
    gamma_sq: float
    gamma_m_sq: float
    incomplete: bool


@dataclass(frozen=True)
class InferenceResult:
    method: str
    statistic: float
    theta_hat: float
    lower: float
    upper: float
    alpha: float
    critical_value: float

    @property
    def interval(self) -> tuple[float, float]:
        return (self.lower, self.upper)


def chi2_critical_value(alpha: float) -> float:
    """(1-alpha) quantile of chi-square with one degree of freedom."""
    return float(chi2.ppf(1.0 - alpha, df=1))


def normal_two_sided_quantile(alpha: float) -> float:
    """(1-alpha/2) standard-normal quantile."""
    return float(norm.ppf(1.0 - alpha / 2.0))


# ---------------------------------------------------------------------------
# pseudo-values
# ---------------------------------------------------------------------------

def pseudo_values(
    leave_out: LeaveOutEstimates,
    theta: float,
    n: int,
    require_modified: bool = False,
) -> PseudoValueSet:
    """Leave-out pseudo-values V_i and contrasts Q_ij at a hypothesized theta.

    Q is evaluated at theta-hat; its theta-invariance is an algebraic fact
    enforced by tests rather than assumed. With ``require_modified`` the
    call fails when the bias-corrected variance is not strictly positive.
    """
    if n < 4:
        raise SampleTooSmall(f"pseudo-values need n >= 4, got n={n}")
    theta = float(theta)
    theta_hat = leave_out.theta_hat
    a = n * theta_hat - (n - 1) * leave_out.theta_hat_i
    v_at_theta = a - theta
    v_at_theta_hat = a - theta_hat

    iu, ju = all_pairs(n)
    s_i = leave_out.theta_hat_i - theta_hat
    s_ij = leave_out.theta_hat_ij - theta_hat
    c0 = (n - 3) / (n - 1)
    q = c0 * (-(n - 1) * (s_i[iu - 1] + s_i[ju - 1]) + (n - 2) * s_ij)

    gamma_sq = float(v_at_theta @ v_at_theta) / n
    gamma_m_sq = float(v_at_theta_hat @ v_at_theta_hat) / n - float(q @ q) / n
    if require_modified and gamma_m_sq <= 0.0:
        raise NonPositiveModifiedVariance(
            f"bias-corrected jackknife variance is {gamma_m_sq:.6g} <= 0"
        )
    return PseudoValueSet(
        theta=theta,
        theta_hat=theta_hat,
        v_at_theta=v_at_theta,
        v_at_theta_hat=v_at_theta_hat,
        q=q,
        gamma_sq=gamma_sq,
        gamma_m_sq=gamma_m_sq,
        incomplete=leave_out.incomplete,
    )


def modified_pseudo_values(pv: PseudoValueSet) -> np.ndarray:
    """Rescaled pseudo-values V_i - (Gamma/Gamma_m) * (theta - theta_hat).

    Uses the closed form: the correction shifts every component by the
    same constant because V_i(theta_hat) - V_i(theta) does not vary in i.
    """
    if pv.gamma_m_sq <= 0.0:
        raise NonPositiveModifiedVariance(
            f"bias-corrected jackknife variance is {pv.gamma_m_sq:.6g} <= 0"
        )
    ratio = math.sqrt(pv.gamma_sq / pv.gamma_m_sq)
    return pv.v_at_theta_hat - ratio * (pv.theta - pv.theta_hat)


# ---------------------------------------------------------------------------
# empirical likelihood dual
# ---------------------------------------------------------------------------

def el_dual(v) -> tuple[float, float]:
    """Log-likelihood-ratio value and Lagrange multiplier for one vector.

    Returns (ell, lam); ell is +inf (lam nan) when all nonzero components
    share a sign, i.e. zero is outside the open convex hull.
    """
    v = np.ascontiguousarray(v, dtype=np.float64)
    if v.size == 0:
        raise ValueError("need at least one pseudo-value")
    if not np.all(np.isfinite(v)):
        raise NonFiniteInput("pseudo-values must be finite")
    ell, lam = _backend.el_solve(v)
    return float(ell), float(lam)


def el_log_ratio(v) -> float:
    """2 sup_lam sum_i log(1 + lam v_i); +inf when infeasible."""
    return el_dual(v)[0]


# ---------------------------------------------------------------------------
# fast evaluation context
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ELContext:
    """theta-independent pieces of the JEL/mJEL statistics for one sample.

    V_i(theta) = a[i] - theta; gamma_m_sq is the bias-corrected jackknife
    variance (may be non-positive; checked by the modified methods).
    """

    n: int
    theta_hat: float
    a: np.ndarray
    gamma_m_sq: float
    p_hat: float
    incomplete: bool


def prepare_context(
    sample: DyadicSample, kernel: KernelSpec, x: float, h: float
) -> ELContext:
    """One O(n^2) pass producing everything a statistic evaluation needs."""
    n = sample.n
    if n < 4:
        raise SampleTooSmall(f"inference needs n >= 4, got n={n}")
    sums = kernel_sums(sample, kernel, x, h)
    return context_from_sums(sums, n)


def context_from_sums(sums: KernelSums, n: int) -> ELContext:
    if n < 4:
        raise SampleTooSmall(f"inference needs n >= 4, got n={n}")
    if sums.n_observed == 0:
        raise EmptyNetwork("sample has no observed edges")
    N, N1, N2 = _denominators(n, sums.p_hat)
    total = sums.total
    row = sums.row_sum
    theta_hat = total / N
    a = n * theta_hat - (n - 1) * (total - row) / N1

    # Q_ij = alpha + beta*(r_i + r_j) + gam*k_ij with k_ij = 0 off the mask,
    # so sum_{i<j} Q_ij^2 only needs row-sum moments plus one pass over edges.
    c0 = (n - 3) / (n - 1)
    coef_a = n / N
    coef_b = (n - 1) / N1
    coef_c = (n - 2) / N2
    alpha = c0 * (coef_a - 2.0 * coef_b + coef_c) * total
    beta = c0 * (coef_b - coef_c)
    gam = c0 * coef_c
    s1 = float(row.sum())
    s2 = float(row @ row)
    pairs = n * (n - 1) // 2
    base = alpha + beta * (row[sums.edge_i - 1] + row[sums.edge_j - 1])
    q_sq = (
        pairs * alpha * alpha
        + 2.0 * alpha * beta * (n - 1) * s1
        + beta * beta * ((n - 2) * s2 + s1 * s1)
        + float(sums.k_pair @ (2.0 * gam * base + gam * gam * sums.k_pair))
    )

    v_hat = a - theta_hat
    gamma_m_sq = float(v_hat @ v_hat) / n - q_sq / n
    return ELContext(
        n=n,
        theta_hat=float(theta_hat),
        a=a,
        gamma_m_sq=gamma_m_sq,
        p_hat=sums.p_hat,
        incomplete=sums.p_hat < 1.0,
    )


def jel_value(ctx: ELContext, theta: float) -> float:
    """JEL statistic at theta; +inf when the hull excludes zero."""
    ell, _ = _backend.el_solve(ctx.a - theta)
    return float(ell)


def mjel_value(ctx: ELContext, theta: float) -> float:
    """Modified JEL statistic at theta."""
    if ctx.gamma_m_sq <= 0.0:
        raise NonPositiveModifiedVariance(
            f"bias-corrected jackknife variance is {ctx.gamma_m_sq:.6g} <= 0"
        )
    v_theta = ctx.a - theta
    gamma_sq = float(v_theta @ v_theta) / ctx.n
    ratio = math.sqrt(gamma_sq / ctx.gamma_m_sq)
    vm = (ctx.a - ctx.theta_hat) - ratio * (theta - ctx.theta_hat)
    ell, _ = _backend.el_solve(vm)
    return float(ell)


def mjk_half_width(ctx: ELContext, z: float) -> float:
    if ctx.gamma_m_sq <= 0.0:
        raise NonPositiveModifiedVariance(
            f"bias-corrected jackknife variance is {ctx.gamma_m_sq:.6g} <= 0"
        )
    return z * math.sqrt(ctx.gamma_m_sq / ctx.n)


# ---------------------------------------------------------------------------
# public statistics and intervals
# ---------------------------------------------------------------------------

def jel_statistic(
    sample: DyadicSample, kernel: KernelSpec, x: float, h: float, theta: float
) -> float:
    """JEL log-likelihood-ratio at theta (incomplete path auto-selected)."""
    return jel_value(prepare_context(sample, kernel, x, h), float(theta))


def mjel_statistic(
    sample: DyadicSample, kernel: KernelSpec, x: float, h: float, theta: float
) -> float:
    """Modified JEL log-likelihood-ratio at theta."""
    return mjel_value(prepare_context(sample, kernel, x, h), float(theta))


def mjk_wald_interval(
    sample: DyadicSample, kernel: KernelSpec, x: float, h: float, alpha: float
) -> InferenceResult:
    """Symmetric interval theta_hat +/- n^(-1/2) z_(alpha/2) Gamma_m."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0,1), got {alpha}")
    ctx = prepare_context(sample, kernel, x, h)
    z = normal_two_sided_quantile(alpha)
    half = mjk_half_width(ctx, z)
    return InferenceResult(
        method=MJK,
        statistic=0.0,
        theta_hat=ctx.theta_hat,
        lower=ctx.theta_hat - half,
        upper=ctx.theta_hat + half,
        alpha=alpha,
        critical_value=z,
    )


def _find_crossing(evaluate, theta_hat, step, critical, direction, max_doublings=60):
    """Expand from theta_hat in +/-1 direction until the statistic exceeds
    the critical value (infinity counts), then bisect to width 1e-8."""
    inside = theta_hat
    for k in range(max_doublings):
        t = theta_hat + direction * step * (2.0 ** k)
        if evaluate(t) > critical:
            outside = t
            break
        inside = t
    else:
        raise BracketFailure(
            "statistic never exceeded the critical value within 60 doublings"
        )
    while abs(outside - inside) > 1e-8:
        mid = 0.5 * (inside + outside)
        if evaluate(mid) > critical:
            outside = mid
        else:
            inside = mid
    return 0.5 * (inside + outside)


def invert_test(
    sample: DyadicSample,
    kernel: KernelSpec,
    x: float,
    h: float,
    alpha: float,
    method: str = MJEL,
    debug_scan: bool = False,
) -> InferenceResult:
    """Confidence interval as the set of theta accepted by the chosen test.

    Endpoints solve ell(theta) = c_alpha on each side of theta_hat; the
    lower endpoint is clamped at zero since densities are non-negative.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0,1), got {alpha}")
    canonical = {"jel": JEL, "mjel": MJEL}
    try:
        method = canonical[method.strip().lower()]
    except KeyError:
        raise ValueError(f"method must be one of {sorted(canonical)}") from None

    ctx = prepare_context(sample, kernel, x, h)
    if method == MJEL and ctx.gamma_m_sq <= 0.0:
        raise NonPositiveModifiedVariance(
            f"bias-corrected jackknife variance is {ctx.gamma_m_sq:.6g} <= 0"
        )
    evaluate = (
        (lambda t: jel_value(ctx, t))
        if method == JEL
        else (lambda t: mjel_value(ctx, t))
    )
    critical = chi2_critical_value(alpha)
    gamma_m = math.sqrt(ctx.gamma_m_sq) if ctx.gamma_m_sq > 0.0 else 0.0
    step = max(gamma_m / math.sqrt(ctx.n), 1e-3 * (1.0 + ctx.theta_hat))

    upper = _find_crossing(evaluate, ctx.theta_hat, step, critical, +1.0)
    lower = _find_crossing(evaluate, ctx.theta_hat, step, critical, -1.0)
    lower = max(lower, 0.0)

    if debug_scan:
        grid = np.linspace(lower - 2 * step, upper + 2 * step, 201)
        accepted = np.array([evaluate(t) <= critical for t in grid])
        idx = np.flatnonzero(accepted)
        if idx.size and np.any(np.diff(idx) != 1):
            warnings.warn(
                f"{method} acceptance region is not contiguous on the scan grid",
                RuntimeWarning,
                stacklevel=2,
            )

    return InferenceResult(
        method=method,
        statistic=evaluate(ctx.theta_hat),
        theta_hat=ctx.theta_hat,
        lower=lower,
        upper=upper,
        alpha=alpha,
        critical_value=critical,
    )
