"""Turbulence statistics: shell spectra, transfer and flux, structure functions,
multifractal formulas, local intermittency and model fits.

Ensemble averages are realised as spatial averages over the periodic box
(homogeneity) and structure-function separations are restricted to the three
grid axes and averaged over them (isotropy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import BOX_VOLUME, PhysicalField, SpectralField
from .solver import nonlinear_term

H0 = 1.0 / 3.0


class InsufficientDataError(ValueError):
    pass


# ---------------------------------------------------------------- spectra


@dataclass(frozen=True)
class ShellSpectrum:
    k: np.ndarray
    e_k: np.ndarray
    t_k: np.ndarray | None = None
    pi_k: np.ndarray | None = None
    eps: float = 0.0
    mode_k: np.ndarray | None = None
    mode_e: np.ndarray | None = None

    def moment(self, s: float) -> float:
        """``sum k^(2s) E`` with the exact per-mode ``|k|`` (shell rounding removed)."""
        if self.mode_k is None:
            return float(np.sum(self.k.astype(float) ** (2 * s) * self.e_k))
        return float(np.sum(self.mode_k ** (2 * s) * self.mode_e))

    def sobolev_sq(self, s: float) -> float:
        """``||u||_Hs^2 = 2 (2pi)^3 sum k^(2s) E``."""
        return 2.0 * BOX_VOLUME * self.moment(s)


def _shell_index(u: SpectralField) -> np.ndarray:
    return np.rint(u.box.kmag).astype(int)


def _bin(u: SpectralField, density: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    shells = _shell_index(u)
    kmax = int(shells.max())
    sums = np.bincount(shells.ravel(), weights=density.ravel(), minlength=kmax + 1)
    return np.arange(1, kmax + 1), sums[1:]


def shell_spectrum(u: SpectralField, nu: float = 0.0, with_transfer: bool = False) -> ShellSpectrum:
    """Bin ``|u_hat(k)|^2 / 2`` into unit shells centred on integers.

    ``sum_k E(k)`` equals ``||u||_L2^2 / (2 (2pi)^3)``, the box-averaged kinetic
    energy.  ``eps = 2 nu sum_k k^2 E(k)`` uses the exact per-mode ``|k|^2``.
    """
    e = 0.5 * np.sum(np.abs(u.coeffs) ** 2, axis=0)
    k, e_k = _bin(u, e)
    eps = 2.0 * nu * float(np.sum(u.box.k2 * e))
    t_k = pi_k = None
    if with_transfer:
        t_k, pi_k = transfer_flux(u)
    nz = e > 0
    nz[0, 0, 0] = False
    return ShellSpectrum(k, e_k, t_k, pi_k, eps, u.box.kmag[nz], e[nz])


def transfer_flux(u: SpectralField) -> tuple[np.ndarray, np.ndarray]:
    """Shell transfer ``T(k)`` (binned ``Re<u_hat, N_hat>``) and flux ``Pi(k) = -cumsum T``.

    ``T`` is the rate of change of the shell energy ``E(k)`` due to advection,
    so ``sum_k T(k) = 0`` for every divergence-free, dealiased field.
    """
    nl = nonlinear_term(u)
    dens = np.sum(np.real(np.conj(u.coeffs) * nl.coeffs), axis=0)
    _, t_k = _bin(u, dens)
    return t_k, -np.cumsum(t_k)


@dataclass(frozen=True)
class FluxReport:
    ratios: np.ndarray
    empirical_c: float
    weight_exponent: float
    k: np.ndarray


def flux_deviation_bound(
    pi_k: np.ndarray, eps: float, k0: int, s: float, delta: float, k: np.ndarray | None = None
) -> FluxReport:
    """Per-shell ``|Pi(k) - eps| (1 + ln(k/k0))^w / eps`` with ``w = delta (2s-1)/(2s)``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if k0 < 1:
        raise ValueError("k0 must be >= 1")
    pi_k = np.asarray(pi_k, float)
    k = np.arange(1, len(pi_k) + 1) if k is None else np.asarray(k, float)
    sel = k >= k0
    w = delta * (2 * s - 1) / (2 * s)
    ratios = np.abs(pi_k[sel] - eps) * (1.0 + np.log(k[sel] / k0)) ** w / eps
    return FluxReport(ratios, float(ratios.max()) if ratios.size else 0.0, w, k[sel])


# ------------------------------------------------------- structure functions


@dataclass(frozen=True)
class StructureFunctions:
    r: np.ndarray
    orders: tuple[float, ...]
    s_p: np.ndarray

    def column(self, p: float) -> np.ndarray:
        return self.s_p[self.orders.index(p)]


def structure_functions(u: PhysicalField, orders, max_r: int) -> StructureFunctions:
    """``S_p(r) = < |u(x + r e_d) - u(x)|^p >`` averaged over x and the three axes."""
    orders = tuple(float(p) for p in orders)
    if not orders:
        raise ValueError("orders must be nonempty")
    n = u.box.n
    if not 0 <= max_r < n / 2:
        raise ValueError(f"max_r must satisfy 0 <= max_r < n/2 = {n // 2}")
    r = np.arange(0, max_r + 1)
    out = np.zeros((len(orders), len(r)))
    for ir, sep in enumerate(r[1:], start=1):
        acc = np.zeros(len(orders))
        for d in range(3):
            du = np.roll(u.values, -sep, axis=d + 1) - u.values
            mag = np.sqrt(np.sum(du**2, axis=0))
            acc += [np.mean(mag**p) for p in orders]
        out[:, ir] = acc / 3.0
    return StructureFunctions(r * u.box.dx, orders, out)


# ---------------------------------------------------------- multifractal


@dataclass(frozen=True)
class MultifractalParams:
    s: float
    delta: float

    def __post_init__(self):
        if not 0.5 < self.s < 1.5:
            raise ValueError("s must lie in (1/2, 3/2) for a positive sigma^2")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")

    @property
    def h0(self) -> float:
        return H0

    @property
    def sigma2(self) -> float:
        return (3 - 2 * self.s) / (2 * self.s - 1)


def zeta_p(p: float, params: MultifractalParams) -> float:
    """Closed-form exponent ``p/3 - p(p-3)/(3(1+delta)) * (3-2s)/(2s-1)``."""
    return p / 3.0 - p * (p - 3.0) / (3.0 * (1.0 + params.delta)) * params.sigma2


def singularity_spectrum(h, params: MultifractalParams):
    """``D_delta(h) = D_0(h) - delta/(1+delta) (3 - D_0(h))`` with parabolic ``D_0``."""
    d0 = 3.0 - (np.asarray(h, float) - H0) ** 2 / (2.0 * params.sigma2)
    out = d0 - params.delta / (1.0 + params.delta) * (3.0 - d0)
    return float(out) if np.ndim(out) == 0 else out


def legendre_zeta(p: float, params: MultifractalParams, h_points: int = 200001) -> float:
    """``min_h [p h + 3 - D_delta(h)]`` by grid search with parabolic refinement.

    The grid spans at least ``h0 +- 6 sigma (1 + delta)`` and is widened until
    the minimiser is interior.
    """
    width = 6.0 * math.sqrt(params.sigma2) * (1.0 + params.delta)
    for _ in range(60):
        h = np.linspace(H0 - width, H0 + width, h_points)
        f = p * h + 3.0 - singularity_spectrum(h, params)
        i = int(np.argmin(f))
        if 0 < i < h_points - 1:
            break
        width *= 2.0
    else:
        raise RuntimeError("Legendre minimiser not bracketed")
    f0, f1, f2 = f[i - 1], f[i], f[i + 1]
    curv = f0 - 2 * f1 + f2
    if curv <= 0:
        return float(f1)
    step = h[1] - h[0]
    offset = 0.5 * (f0 - f2) / curv
    hv = h[i] + offset * step
    return float(p * hv + 3.0 - singularity_spectrum(hv, params))


def legendre_zeta_exact(p: float, params: MultifractalParams) -> float:
    """Analytic Legendre transform of the parabolic ``D_delta``.

    ``3 - D_delta(h) = a (h - h0)^2`` with ``a = (1+2 delta)/(2 sigma^2 (1+delta))``,
    hence ``min_h = p h0 - p^2 / (4a)``.
    """
    a = (1.0 + 2.0 * params.delta) / (2.0 * params.sigma2 * (1.0 + params.delta))
    return p * H0 - p * p / (4.0 * a)


# --------------------------------------------------------- spectrum model


def spectrum_model(k, k0: float, eps: float, beta_t: float, delta: float, c_kolm: float):
    """``C eps^(2/3) k^(-5/3) (1 + beta ln(k/k0) / (1 + ln(k/k0))^(1+delta))``."""
    k = np.asarray(k, float)
    if k0 <= 0 or np.any(k < k0):
        raise ValueError("spectrum model requires k >= k0 > 0")
    lg = np.log(k / k0)
    out = c_kolm * eps ** (2.0 / 3.0) * k ** (-5.0 / 3.0) * (1.0 + beta_t * lg / (1.0 + lg) ** (1.0 + delta))
    return float(out) if out.ndim == 0 else out


def kolmogorov_wavenumber(eps: float, nu: float) -> float:
    return eps**0.25 * nu**-0.75


@dataclass(frozen=True)
class SpectrumFit:
    c_kolm: float
    beta_t: float
    residual: float
    k_band: np.ndarray


def fit_spectrum_model(
    spec: ShellSpectrum, k0: float, delta: float, nu: float | None = None, k_max: float | None = None
) -> SpectrumFit:
    """Least squares of ``ln E`` over the inertial band ``[k0, k_nu]``.

    ``k_nu`` is the Kolmogorov wavenumber when ``nu`` is given, else
    ``k_max``, else the last shell.  Fits ``(C, beta)`` with ``eps`` taken from
    the spectrum.  The residual is the RMS of the log misfit.
    """
    from scipy.optimize import least_squares

    k = np.asarray(spec.k, float)
    e = np.asarray(spec.e_k, float)
    if nu is not None and spec.eps > 0:
        k_hi = kolmogorov_wavenumber(spec.eps, nu)
    elif k_max is not None:
        k_hi = k_max
    else:
        k_hi = k.max()
    sel = (k >= k0) & (k <= k_hi) & (e > 0)
    if sel.sum() < 5:
        raise InsufficientDataError(f"inertial band [{k0}, {k_hi:.3g}] holds {int(sel.sum())} shells, need >= 5")
    kb, eb = k[sel], e[sel]
    eps = spec.eps if spec.eps > 0 else 1.0
    lg = np.log(kb / k0)
    g = lg / (1.0 + lg) ** (1.0 + delta)
    base = np.log(eps ** (2.0 / 3.0) * kb ** (-5.0 / 3.0))
    y = np.log(eb)

    def resid(theta):
        lnc, beta = theta
        arg = np.maximum(1.0 + beta * g, 1e-300)
        return lnc + base + np.log(arg) - y

    # linearised start: beta = 0
    x0 = np.array([float(np.mean(y - base)), 0.0])
    lower = np.array([-np.inf, -1.0 / max(g.max(), 1e-300) + 1e-12])
    sol = least_squares(resid, x0, bounds=(lower, np.inf), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    r = resid(sol.x)
    return SpectrumFit(float(np.exp(sol.x[0])), float(sol.x[1]), float(np.sqrt(np.mean(r**2))), kb)


def beta_time_law(t, beta0: float, gamma: float):
    """``beta(t) = beta0 / (1 + gamma t)^(2 gamma / 3)``."""
    return beta0 / (1.0 + gamma * np.asarray(t, float)) ** (2.0 * gamma / 3.0)


def eps_decay_model(t, eps0: float, gamma: float):
    """``eps(t) = eps0 / (1 + gamma t)^((3 gamma - 1)/2)``."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be nonnegative")
    out = eps0 / (1.0 + gamma * np.asarray(t, float)) ** ((3.0 * gamma - 1.0) / 2.0)
    return float(out) if np.ndim(out) == 0 else out


# ------------------------------------------------------ local structure


@dataclass(frozen=True)
class LIMResult:
    field: np.ndarray
    degenerate: bool


def lim_field(u: PhysicalField, r: int) -> LIMResult:
    """Direction-averaged ``|du(x, r)|^2`` normalised by its spatial mean."""
    n = u.box.n
    if not 1 <= r < n / 2:
        raise ValueError(f"r must satisfy 1 <= r < n/2 = {n // 2}")
    sq = np.zeros((n, n, n))
    for d in range(3):
        du = np.roll(u.values, -r, axis=d + 1) - u.values
        sq += np.sum(du**2, axis=0)
    sq /= 3.0
    mean = sq.mean()
    if mean <= 0 or not np.isfinite(mean):
        return LIMResult(np.ones_like(sq), True)
    return LIMResult(sq / mean, False)


def exceptional_set(grad_mag: np.ndarray, threshold: float) -> tuple[np.ndarray, float]:
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    mask = np.asarray(grad_mag) > threshold
    return mask, float(mask.mean())


def gradient_magnitude(u: SpectralField) -> np.ndarray:
    """Frobenius norm of the velocity-gradient tensor at each grid point."""
    from .solver import velocity_gradients

    g = velocity_gradients(u)
    return np.sqrt(np.sum(g**2, axis=(0, 1)))


def kappa_eps(eps_frac: float, delta: float) -> float:
    """``delta/(1+delta) * ln(1/eps) / (1 + ln(1/eps))``."""
    if not 0 < eps_frac < 1:
        raise ValueError("eps_frac must lie in (0, 1)")
    if delta <= 0:
        raise ValueError("delta must be positive")
    lg = math.log(1.0 / eps_frac)
    return delta / (1.0 + delta) * lg / (1.0 + lg)


# ------------------------------------------------------------- tail fit


@dataclass(frozen=True)
class TailFit:
    c: float
    c_rate: float
    residual: float
    degenerate: bool = False


def tail_fit(samples, delta: float, upper_fraction: float = 0.1) -> TailFit:
    """Fit ``P(X > lam) ~ C exp(-c lam^(1/(1+delta)))`` on the upper tail.

    Regresses ``ln`` of the empirical survival function on
    ``lam^(1/(1+delta))`` over the top ``upper_fraction`` of samples.
    """
    x = np.sort(np.asarray(samples, float))
    if x.size < 100:
        raise InsufficientDataError(f"tail fit needs >= 100 samples, got {x.size}")
    n = x.size
    surv = 1.0 - np.arange(n) / n  # P(X >= x_i)
    start = int(math.floor((1.0 - upper_fraction) * n))
    xs, ss = x[start:], surv[start:]
    z = np.abs(xs) ** (1.0 / (1.0 + delta))
    if np.ptp(z) == 0:
        return TailFit(float("nan"), float("nan"), float("nan"), True)
    slope, intercept = np.polyfit(z, np.log(ss), 1)
    resid = np.log(ss) - (slope * z + intercept)
    return TailFit(float(np.exp(intercept)), float(-slope), float(np.sqrt(np.mean(resid**2))))
