"""Decay parameter chain, comparison ODE, decay envelope and Osgood bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .criterion import DomainError, gn_alpha, gradient_theta, solve_scaling
from .fracops import sobolev_l2_norm


@dataclass(frozen=True)
class DecayParams:
    theta: float
    alpha: float
    mu: float
    gamma: float
    beta: float
    c_fit: float


def derive_params(s: float, q: float, eta: float, c_fit: float = 1.0) -> DecayParams:
    solve_scaling(s, q)
    if eta <= 0:
        raise DomainError("eta must be positive")
    theta = gradient_theta(q)
    alpha = gn_alpha(q)
    mu = theta * (1 - alpha) / (2 - theta * alpha) + eta
    if mu >= 1:
        raise DomainError(f"eta = {eta} gives mu = {mu:.6g} >= 1")
    return DecayParams(theta, alpha, mu, 1.0 / (2.0 * mu), mu * c_fit / 2.0, c_fit)


def blowup_time(y0: float, mu: float, c: float) -> float:
    if y0 <= 0 or c <= 0:
        return math.inf
    return 1.0 / (mu * c * y0**mu)


def comparison_ode(y0: float, mu: float, c: float, t: float) -> float:
    """Closed-form solution of ``Z' = c Z^(1+mu)``, ``Z(0) = y0``."""
    if y0 == 0:
        return 0.0
    base = 1.0 - mu * c * y0**mu * t
    if base <= 0:
        raise DomainError(f"t = {t} is at or past the blow-up time {blowup_time(y0, mu, c):.6g}")
    return y0 / base ** (1.0 / mu)


def envelope(y0: float, params: DecayParams, t: float) -> float:
    """``c_fit sqrt(y0) / (1 + beta t)^gamma``, a bound on ``||(-Delta)^s u(t)||_L2``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return params.c_fit * math.sqrt(y0) / (1.0 + params.beta * t) ** params.gamma


@dataclass(frozen=True)
class DecayEnvelope:
    y0: float
    params: DecayParams

    @property
    def blowup_time(self) -> float:
        return blowup_time(self.y0, self.params.mu, self.params.c_fit)

    def __call__(self, t):
        return np.vectorize(lambda tt: envelope(self.y0, self.params, tt))(t)


def calibrate_c_fit(
    t: np.ndarray, norms: np.ndarray, s: float, q: float, eta: float, c_start: float = 1.0
) -> float:
    """Smallest ``c_fit >= c_start`` whose envelope dominates every given sample.

    The envelope is not monotone in ``c_fit`` (it also sets ``beta``), so the
    search steps up by a doubling increment, starting at ``1e-9 c_start`` so
    that narrow windows just above ``c_start`` are not skipped, and then
    bisects back toward the last failing value.
    """
    t = np.asarray(t, float)
    norms = np.asarray(norms, float)
    y0 = float(norms[0]) ** 2

    def margin(c):
        p = derive_params(s, q, eta, c)
        env = np.array([envelope(y0, p, tt) for tt in t])
        return float(np.min(env - norms * (1 + 1e-12)))

    lo, hi = None, c_start
    inc = 1e-9 * c_start
    for _ in range(200):
        if margin(hi) >= 0:
            break
        lo, hi = hi, c_start + inc
        inc *= 2.0
    else:
        raise RuntimeError("no envelope constant dominates the calibration samples")
    if lo is None:
        return hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if margin(mid) >= 0:
            hi = mid
        else:
            lo = mid
    return hi


def gamma_modulus(y):
    """Osgood modulus ``y ln(e + y)``."""
    return y * np.log(np.e + y)


def osgood_G(r: float) -> float:
    """``G(r) = int_1^r dy / (y ln(e + y))``, integrated in ``x = ln y``."""
    val, _ = integrate.quad(
        lambda x: 1.0 / np.logaddexp(1.0, x), 0.0, math.log(r), epsabs=0.0, epsrel=1e-13, limit=200
    )
    return val


def osgood_bound(rho0: float, gamma_integral: float) -> float:
    """Largest value ``G^-1(G(rho0) + gamma_integral)`` that rho can reach.

    Growth is double-exponential in ``gamma_integral``; the bracket expands
    until it contains the root.
    """
    if rho0 <= 0:
        raise ValueError("rho0 must be positive")
    if gamma_integral < 0:
        raise ValueError("gamma_integral must be nonnegative")
    if gamma_integral == 0:
        return float(rho0)
    target = osgood_G(rho0) + gamma_integral
    lo, hi = rho0, rho0 * 2.0
    while osgood_G(hi) < target:
        lo, hi = hi, hi * hi if hi > 2 else hi * 2.0
        if not math.isfinite(hi):
            return math.inf
    # bisection in log space keeps relative precision across decades
    a, b = math.log(lo), math.log(hi)
    for _ in range(200):
        m = 0.5 * (a + b)
        if osgood_G(math.exp(m)) < target:
            a = m
        else:
            b = m
        if b - a < 1e-15:
            break
    return math.exp(0.5 * (a + b))


def log_poly_bound_check(y: float, eta: float) -> tuple[float, float]:
    """``(y ln(e + sqrt y), 1 + y^(1+eta))``."""
    if y < 0 or eta <= 0:
        raise ValueError("need y >= 0 and eta > 0")
    return y * math.log(math.e + math.sqrt(y)), 1.0 + y ** (1.0 + eta)


def log_poly_constant(eta: float, y_max: float = 1e8, points: int = 20001) -> float:
    """Grid estimate of the smallest ``C_eta`` with ``y ln(e+sqrt y) <= C_eta (1 + y^(1+eta))``."""
    ys = np.concatenate([[0.0], np.logspace(-8, math.log10(y_max), points)])
    lhs = ys * np.log(np.e + np.sqrt(ys))
    rhs = 1.0 + ys ** (1.0 + eta)
    return float(np.max(lhs / rhs))


class DecayMonitor:
    """Run-loop hook adding ``ys_l2``, ``envelope`` and ``comparison_ode`` columns."""

    def __init__(self, s: float, q: float, eta: float, c_fit: float = 1.0):
        self.s = s
        self.params = derive_params(s, q, eta, c_fit)
        self.y0: float | None = None

    def __call__(self, snap) -> dict:
        y = sobolev_l2_norm(snap.u, 2 * self.s) ** 2
        if self.y0 is None:
            self.y0 = y
        p = self.params
        try:
            z = comparison_ode(self.y0, p.mu, p.c_fit, snap.t)
        except DomainError:
            z = math.inf
        return {"ys_l2": y, "envelope": envelope(self.y0, p, snap.t), "comparison_ode": z}
