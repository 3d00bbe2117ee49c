"""Regularity-criterion parameter algebra and the running criterion monitor.

Natural logarithms are used throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .fracops import frac_laplacian, lq_norm, sobolev_l2_norm
from .grid import SpectralField


class DomainError(ValueError):
    """Parameters violate a constraint of the regularity criterion."""


def _check_s(s: float) -> None:
    if not 0.5 < s < 1.0:
        raise DomainError(f"s must lie in (1/2, 1), got {s}")


def solve_scaling(s: float, q: float) -> float:
    """Temporal exponent p from ``2/p + 3/q = 2s - 1``."""
    _check_s(s)
    if not q > 3:
        raise DomainError(f"q must exceed 3, got {q}")
    denom = 2 * s - 1 - 3.0 / q
    if denom <= 1e-14:
        raise DomainError(
            f"q = {q} must exceed 3/(2s-1) = {3 / (2 * s - 1):.6g} so that p = 2/(2s-1-3/q) is positive"
        )
    return 2.0 / denom


def delta_max(s: float, q: float) -> float:
    """``delta_0 = min((q-3)/(6q), (2s-1)/(4s))``."""
    return min((q - 3.0) / (6.0 * q), (2.0 * s - 1.0) / (4.0 * s))


def gradient_theta(q: float) -> float:
    """Gradient-interpolation exponent ``3/2 * q/(3q-2)``."""
    return 1.5 * q / (3.0 * q - 2.0)


def gn_alpha(q: float) -> float:
    """Gagliardo-Nirenberg exponent ``3/2 (1/2 - 1/q)``."""
    return 1.5 * (0.5 - 1.0 / q)


def theta_p_identity(s: float, q: float) -> tuple[float, bool]:
    """Return ``theta * p`` and whether it equals 2 to 1e-10.

    The product is reported, not assumed: for generic admissible (s, q) it
    differs from 2.
    """
    value = gradient_theta(q) * solve_scaling(s, q)
    return value, abs(value - 2.0) < 1e-10


@dataclass(frozen=True)
class CriterionParams:
    s: float
    q: float
    delta: float
    eta: float = 0.01
    nu: float = 0.05
    p: float = field(init=False)

    def __post_init__(self):
        p = solve_scaling(self.s, self.q)
        object.__setattr__(self, "p", p)
        d0 = delta_max(self.s, self.q)
        if not 0.0 < self.delta < d0:
            raise DomainError(
                f"delta = {self.delta} must lie in (0, delta_0) with "
                f"delta_0 = min((q-3)/(6q), (2s-1)/(4s)) = {d0:.6g}"
            )
        if self.eta <= 0:
            raise DomainError("eta must be positive")
        th, a = gradient_theta(self.q), gn_alpha(self.q)
        mu = th * (1 - a) / (2 - th * a) + self.eta
        if mu >= 1:
            raise DomainError(f"eta = {self.eta} gives mu = {mu:.6g} >= 1")
        if self.nu <= 0:
            raise DomainError("nu must be positive")

    @property
    def scaling_residual(self) -> float:
        return 2.0 / self.p + 3.0 / self.q - (2 * self.s - 1)


def log_weight(x: float, delta: float) -> float:
    """``(1 + ln(e + x))^(-delta)``, in (0, 1] for x >= 0, delta >= 0."""
    return (1.0 + math.log(math.e + x)) ** (-delta)


def integrand_from_norm(x: float, p: float, delta: float) -> float:
    """``x^p (1 + ln(e + x))^(-delta)``."""
    if x <= 0:
        return 0.0
    return x**p * log_weight(x, delta)


def frac_lq(u: SpectralField, s: float, q: float) -> float:
    """``||(-Delta)^s u||_Lq``."""
    return lq_norm(frac_laplacian(u, s), q)


def criterion_integrand(u: SpectralField, params: CriterionParams) -> float:
    return integrand_from_norm(frac_lq(u, params.s, params.q), params.p, params.delta)


@dataclass(frozen=True)
class CriterionState:
    """Trapezoidal accumulation of the criterion integral over monitor samples."""

    integral: float = 0.0
    last_t: float | None = None
    last_value: float | None = None
    samples: tuple[tuple[float, float], ...] = ()


def accumulate(state: CriterionState, t: float, value: float) -> CriterionState:
    if value < 0 or not math.isfinite(value):
        raise ValueError(f"integrand must be finite and nonnegative, got {value}")
    if state.last_t is None:
        return CriterionState(0.0, t, value, ((t, value),))
    if not t > state.last_t:
        raise ValueError(f"sample times must increase: {t} <= {state.last_t}")
    integral = state.integral + 0.5 * (state.last_value + value) * (t - state.last_t)
    return CriterionState(integral, t, value, state.samples + ((t, value),))


def smallness_check(u0: SpectralField, params: CriterionParams, c0: float = 1.0) -> tuple[bool, float, float]:
    """Compare ``||(-Delta)^(s/2) u0||_Lq`` with ``c0 / (1 + ln(e + ||u0||_Hs))^delta``."""
    if c0 <= 0:
        raise ValueError("c0 must be positive")
    lhs = lq_norm(frac_laplacian(u0, params.s / 2), params.q)
    rhs = c0 * log_weight(sobolev_l2_norm(u0, params.s), params.delta)
    return lhs <= rhs, lhs, rhs


class CriterionMonitor:
    """Run-loop hook adding ``frac_lq``, ``criterion_integrand`` and ``criterion_integral``."""

    def __init__(self, params: CriterionParams):
        self.params = params
        self.state = CriterionState()

    def __call__(self, snap) -> dict:
        x = frac_lq(snap.u, self.params.s, self.params.q)
        value = integrand_from_norm(x, self.params.p, self.params.delta)
        self.state = accumulate(self.state, snap.t, value)
        return {"frac_lq": x, "criterion_integrand": value, "criterion_integral": self.state.integral}
