"""Commutators of the fractional Laplacian with advection and multiplication.

These routines only measure empirical ratios; they cannot confirm an
inequality with an unspecified constant, only fail to falsify it.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .fracops import frac_laplacian, frac_multiplier, sobolev_l2_norm
from .grid import BOX_VOLUME, BoxSpec, SpectralField, fft3, ifft3, pad_spectrum, spectral_gradient


def _padded_advection(a: SpectralField, b: SpectralField) -> np.ndarray:
    """Spectrum of ``(a . grad) b`` on the 2n box."""
    big = 2 * a.box.n
    av = ifft3(pad_spectrum(a.coeffs, big))
    out = np.empty((3, big, big, big))
    for i in range(3):
        gb = ifft3(pad_spectrum(spectral_gradient(b.coeffs[i], b.box), big))
        out[i] = np.einsum("jxyz,jxyz->xyz", av, gb)
    return fft3(out)


def commutator(u: SpectralField, s: float) -> SpectralField:
    """``(-Delta)^s ((u.grad) u) - (u.grad)((-Delta)^s u)`` on the 2n box."""
    big = BoxSpec(2 * u.box.n)
    adv = _padded_advection(u, u)
    first = adv * frac_multiplier(big, s)
    second = _padded_advection(u, frac_laplacian(u, s))
    return SpectralField(big, first - second)


def _linf_grad(u: SpectralField) -> float:
    """max over the padded grid of the Frobenius norm of grad u."""
    big = 2 * u.box.n
    sq = np.zeros((big, big, big))
    for i in range(3):
        g = ifft3(pad_spectrum(spectral_gradient(u.coeffs[i], u.box), big))
        sq += np.sum(g**2, axis=0)
    return float(np.sqrt(sq.max()))


@dataclass(frozen=True)
class CommutatorReport:
    lhs: float
    term_a: float
    term_b: float
    ratio: float

    def as_dict(self) -> dict:
        return asdict(self)


def default_sigma(s: float) -> float:
    return 0.1 * (1.0 - s)


def lemma31_report(u: SpectralField, s: float, sigma: float | None = None) -> CommutatorReport:
    """Logarithmically improved commutator bound terms, natural log."""
    sigma = default_sigma(s) if sigma is None else sigma
    if not 0 < sigma < 1 - s:
        raise ValueError(f"sigma must lie in (0, 1 - s) = (0, {1 - s:.6g}), got {sigma}")
    lhs = commutator(u, s).l2_norm()
    g = _linf_grad(u)
    hs = sobolev_l2_norm(u, 2 * s)
    h_half = sobolev_l2_norm(u, 2 * s + 1)
    lg = math.log(math.e + sobolev_l2_norm(u, 2 * (s + sigma)))
    term_a = g * hs * lg
    term_b = g * h_half / lg
    den = term_a + term_b
    return CommutatorReport(lhs, term_a, term_b, lhs / den if den > 0 else 0.0)


@dataclass(frozen=True)
class Lemma21Report:
    lhs: float
    rhs: float
    ratio: float


def _scalar_field(c: np.ndarray | SpectralField) -> np.ndarray:
    if isinstance(c, SpectralField):
        return c.coeffs[0]
    return np.asarray(c)


def lemma21_report(f, g, s: float, box: BoxSpec | None = None) -> Lemma21Report:
    """``||[(-D)^s, f] g||_L2`` versus ``||grad f||_Linf ||(-D)^(s-1/2) g||_L2`` for scalars.

    ``f`` and ``g`` are scalar spectra (n^3 coefficient arrays) or vector
    fields whose first component is used.
    """
    if not 0.5 < s < 1:
        raise ValueError("s must lie in (1/2, 1)")
    fc, gc = _scalar_field(f), _scalar_field(g)
    n = fc.shape[-1]
    box = box or BoxSpec(n)
    big = BoxSpec(2 * n)
    fp = ifft3(pad_spectrum(fc, big.n))
    gp = ifft3(pad_spectrum(gc, big.n))
    prod = fft3(fp * gp)
    lg_hat = pad_spectrum(gc * frac_multiplier(box, s), big.n)
    comm = prod * frac_multiplier(big, s) - fft3(fp * ifft3(lg_hat))
    lhs = math.sqrt(BOX_VOLUME * float(np.sum(np.abs(comm) ** 2)))
    grad_f = ifft3(pad_spectrum(spectral_gradient(fc, box), big.n))
    gmax = float(np.sqrt(np.max(np.sum(grad_f**2, axis=0))))
    m = frac_multiplier(box, s - 0.5)
    rhs = gmax * math.sqrt(BOX_VOLUME * float(np.sum(np.abs(gc * m) ** 2)))
    return Lemma21Report(lhs, rhs, lhs / rhs if rhs > 0 else 0.0)


def commutator_ensemble(
    box: BoxSpec, count: int, seed: int, s: float = 0.75, sigma: float | None = None, decay: float = 0.2
) -> list[CommutatorReport]:
    """Log-improved commutator ratios over ``count`` random smooth divergence-free fields."""
    from .grid import random_field

    rng = np.random.default_rng(seed)
    return [lemma31_report(random_field(box, rng, decay=decay), s, sigma) for _ in range(count)]
