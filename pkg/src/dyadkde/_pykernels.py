"""Pure-numpy implementations of the numerical hot paths.

Signature-compatible with the compiled extension ``_ckernels``; the active
module is chosen in ``_backend``. Index arrays are 0-based int32.
"""

import math

import numpy as np

BACKEND_NAME = "python"


def _kernel_values(u, kernel_id, support_radius):
    a = np.abs(u) / support_radius
    if kernel_id == 0:
        out = np.where(a <= 1.0, 0.75 * (1.0 - a * a), 0.0)
    elif kernel_id == 1:
        out = np.where(a <= 1.0, 1.0 - a, 0.0)
    else:
        out = np.where(a <= 1.0, 0.5, 0.0)
    return out / support_radius


def kernel_sums_core(edge_i, edge_j, values, n, x, h, kernel_id, support_radius):
    """Per-edge kernel weights h^-1 K((x-v)/h), per-vertex row sums, total."""
    u = (x - values) / h
    k = _kernel_values(u, kernel_id, support_radius) / h
    row = np.bincount(edge_i, weights=k, minlength=n)
    row += np.bincount(edge_j, weights=k, minlength=n)
    return k, row, float(k.sum())


def density_grid(values, xs, h, kernel_id, support_radius):
    """Sum of h^-1 K((x-v)/h) over all values, for each grid point x."""
    out = np.empty(len(xs), dtype=np.float64)
    inv_h = 1.0 / h
    for g, x in enumerate(xs):
        u = (x - values) * inv_h
        out[g] = _kernel_values(u, kernel_id, support_radius).sum() * inv_h
    return out


def el_solve(v):
    """Solve the empirical-likelihood dual sup_lam sum log(1 + lam*v_i).

    Returns (ell, lam). ell = 0 with lam = 0 for an all-zero vector,
    (inf, nan) when all nonzero components share a sign (no interior
    solution), otherwise 2*sum(log1p(lam*v)) at the unique root lam of
    g(lam) = sum v_i / (1 + lam v_i), found by safeguarded Newton inside
    the open interval (-1/max v, -1/min v).
    """
    v = np.ascontiguousarray(v, dtype=np.float64)
    vmax = float(v.max())
    vmin = float(v.min())
    if vmax == 0.0 and vmin == 0.0:
        return 0.0, 0.0
    if vmin >= 0.0 or vmax <= 0.0:
        return math.inf, math.nan
    g = float(v.sum())
    if g == 0.0:
        return 0.0, 0.0
    gtol = 1e-10 * (1.0 + float(np.abs(v).sum()))
    shrink = 1.0 - 1e-12
    lo = (-1.0 / vmax) * shrink
    hi = (-1.0 / vmin) * shrink
    # g is strictly decreasing on (lo, hi); g(0) = sum(v) fixes one side
    lam = 0.0
    if g > 0.0:
        lo = 0.0
    else:
        hi = 0.0
    for _ in range(500):
        w = 1.0 + lam * v
        g = float((v / w).sum())
        if abs(g) <= gtol:
            break
        if g > 0.0:
            lo = lam
        else:
            hi = lam
        if hi - lo <= 1e-14:
            break
        gp = -float(((v / w) ** 2).sum())
        cand = lam - g / gp
        if not (lo < cand < hi):
            cand = 0.5 * (lo + hi)
        lam = cand
    ell = 2.0 * float(np.log1p(lam * v).sum())
    return ell, lam
