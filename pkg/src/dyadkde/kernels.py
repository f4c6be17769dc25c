"""Compactly supported second-order kernels and their moment constants.

Only kernels with bounded support are offered; constants are exact
closed forms, not quadrature output, so tests are bit-stable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class KernelFamily(enum.Enum):
    EPANECHNIKOV = "epanechnikov"
    TRIANGULAR = "triangular"
    UNIFORM = "uniform"


# closed-form ∫u²K(u)du and ∫K²(u)du on the unit support
_SECOND_MOMENT = {
    KernelFamily.EPANECHNIKOV: 1.0 / 5.0,
    KernelFamily.TRIANGULAR: 1.0 / 6.0,
    KernelFamily.UNIFORM: 1.0 / 3.0,
}
_SQUARED_INTEGRAL = {
    KernelFamily.EPANECHNIKOV: 3.0 / 5.0,
    KernelFamily.TRIANGULAR: 2.0 / 3.0,
    KernelFamily.UNIFORM: 1.0 / 2.0,
}

# ids shared with the compiled/python numerical backends
KERNEL_IDS = {
    KernelFamily.EPANECHNIKOV: 0,
    KernelFamily.TRIANGULAR: 1,
    KernelFamily.UNIFORM: 2,
}


@dataclass(frozen=True)
class KernelSpec:
    """A symmetric, non-negative kernel with bounded support.

    ``evaluate`` is the density shape K; it integrates to one, is even,
    and vanishes outside ``[-support_radius, support_radius]``.
    """

    family: KernelFamily
    support_radius: float = 1.0

    @property
    def name(self) -> str:
        return self.family.value

    @property
    def kernel_id(self) -> int:
        return KERNEL_IDS[self.family]

    def evaluate(self, u):
        """Evaluate K(u); accepts scalars or arrays, returns the same shape."""
        r = self.support_radius
        a = np.abs(np.asarray(u, dtype=float)) / r
        if self.family is KernelFamily.EPANECHNIKOV:
            out = np.where(a <= 1.0, 0.75 * (1.0 - a * a), 0.0)
        elif self.family is KernelFamily.TRIANGULAR:
            out = np.where(a <= 1.0, 1.0 - a, 0.0)
        else:
            out = np.where(a <= 1.0, 0.5, 0.0)
        out = out / r
        if np.isscalar(u) or np.ndim(u) == 0:
            return float(out)
        return out

    def second_moment(self) -> float:
        """∫u²K(u)du, exact."""
        return _SECOND_MOMENT[self.family] * self.support_radius ** 2

    def squared_integral(self) -> float:
        """∫K²(u)du, exact. Diagnostic constant used by plug-in variances."""
        return _SQUARED_INTEGRAL[self.family] / self.support_radius


_BY_NAME = {f.value: f for f in KernelFamily}


def get_kernel(name: str = "epanechnikov") -> KernelSpec:
    """Look up a built-in kernel by name (case-insensitive)."""
    try:
        family = _BY_NAME[name.strip().lower()]
    except KeyError:
        raise ValueError(
            f"unknown kernel {name!r}; choose from {sorted(_BY_NAME)}"
        ) from None
    return KernelSpec(family)
