"""Fractional Laplacian, Sobolev / Lebesgue norms and Littlewood-Paley machinery.

All norms are torus norms over [0, 2pi)^3 with the coefficient convention of
:mod:`fracns.grid`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import (
    BOX_VOLUME,
    BoxSpec,
    SpectralField,
    fft3,
    ifft3,
    pad_spectrum,
    to_physical,
)


def _check_order(s: float) -> float:
    s = float(s)
    if not (0.0 < s <= 2.0):
        raise ValueError(f"fractional order must lie in (0, 2], got {s}")
    return s


def frac_multiplier(box: BoxSpec, s: float) -> np.ndarray:
    """|k|^(2s) on the box, with the k = 0 entry set to zero."""
    m = box.k2**s
    m[0, 0, 0] = 0.0
    return m


def frac_laplacian(f: SpectralField, s: float) -> SpectralField:
    """Apply (-Delta)^s, i.e. multiply each mode by |k|^(2s)."""
    s = _check_order(s)
    return SpectralField(f.box, f.coeffs * frac_multiplier(f.box, s))


def sobolev_l2_norm(f: SpectralField, s: float) -> float:
    """Homogeneous H^s norm ``||(-Delta)^(s/2) f||_L2``; s = 0 gives the L2 norm."""
    if s == 0:
        return f.l2_norm()
    m = frac_multiplier(f.box, s)
    total = np.sum(m * np.sum(np.abs(f.coeffs) ** 2, axis=0))
    return float(np.sqrt(BOX_VOLUME * total))


def lq_norm_values(values: np.ndarray, q: float) -> float:
    """L^q norm of a vector field given by physical samples ``(3, n, n, n)``.

    Uses the collocation rule ``int g dx ~ (2pi)^3 mean(g)``, exact for
    trigonometric polynomials resolved by the grid when q = 2.
    """
    q = float(q)
    if q < 1.0:
        raise ValueError(f"L^q norm requires q >= 1, got {q}")
    mag = np.sqrt(np.sum(values**2, axis=0))
    if math.isinf(q):
        return float(mag.max())
    return float((BOX_VOLUME * np.mean(mag**q)) ** (1.0 / q))


def lq_norm(f: SpectralField, q: float) -> float:
    return lq_norm_values(to_physical(f).values, q)


def phi_profile(xi: np.ndarray) -> np.ndarray:
    """Radial cutoff: 1 on [0, 1], 0 on [2, inf), C-infinity bump in between."""
    xi = np.asarray(xi, dtype=float)
    t = np.clip(xi - 1.0, 0.0, 1.0)
    out = np.zeros_like(t)
    inner = t < 1.0
    with np.errstate(divide="ignore", over="ignore"):
        out[inner] = np.exp(1.0 - 1.0 / (1.0 - t[inner] ** 2))
    return out


def psi_profile(xi: np.ndarray) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    return phi_profile(xi) - phi_profile(2.0 * xi)


@dataclass(frozen=True)
class LPBands:
    """Dyadic band range.  ``S_j = phi(2^-j |k|)`` and ``Delta_j = S_j - S_{j-1}``.

    The low block is ``S_{j_min - 1}``; together with the bands it sums to
    ``S_{j_max}``, which is the identity once ``2^j_max`` exceeds the largest
    wavenumber magnitude on the grid.
    """

    j_min: int
    j_max: int

    def __post_init__(self):
        if self.j_max < self.j_min:
            raise ValueError("j_max must be >= j_min")

    @classmethod
    def for_box(cls, box: BoxSpec) -> "LPBands":
        kmax = math.sqrt(3.0) * box.n / 2
        return cls(0, math.ceil(math.log2(kmax)))

    @property
    def indices(self) -> range:
        return range(self.j_min, self.j_max + 1)

    def band_weight(self, kmag: np.ndarray, j: int) -> np.ndarray:
        return psi_profile(kmag * 2.0 ** (-j))

    def low_weight(self, kmag: np.ndarray, j: int | None = None) -> np.ndarray:
        """``S_j`` weight; default is the low block ``S_{j_min - 1}``."""
        j = self.j_min - 1 if j is None else j
        return phi_profile(kmag * 2.0 ** (-j))


def _check_band(j: int, bands: LPBands) -> None:
    if not (bands.j_min <= j <= bands.j_max):
        raise ValueError(f"band index {j} outside [{bands.j_min}, {bands.j_max}]")


def lp_project(f: SpectralField, j: int, bands: LPBands) -> SpectralField:
    _check_band(j, bands)
    return SpectralField(f.box, f.coeffs * bands.band_weight(f.box.kmag, j))


def lp_low(f: SpectralField, bands: LPBands) -> SpectralField:
    return SpectralField(f.box, f.coeffs * bands.low_weight(f.box.kmag))


def _blocks(coeffs: np.ndarray, kmag: np.ndarray, bands: LPBands) -> dict[int, np.ndarray]:
    """Low block at index j_min - 1 followed by every dyadic band."""
    out = {bands.j_min - 1: coeffs * bands.low_weight(kmag)}
    for j in bands.indices:
        out[j] = coeffs * bands.band_weight(kmag, j)
    return out


def bony_decompose(
    f: SpectralField, g: SpectralField, bands: LPBands | None = None
) -> tuple[SpectralField, SpectralField, SpectralField]:
    """Paraproduct split of the componentwise product ``f_i g_i``.

    Returns ``(T_f g, T_g f, R(f, g))`` as fields on the 2n box, where

        T_f g  = sum_j S_{j-2} f  Delta_j g
        R(f,g) = sum_{|j - j'| <= 1} Delta_j f  Delta_j' g

    (``S_{j-2}`` is the sum of blocks strictly more than one band below j).
    Products are formed on the 2x zero-padded grid, so the three parts sum
    to the alias-free product.
    """
    box = f.box
    bands = bands or LPBands.for_box(box)
    big = BoxSpec(2 * box.n)
    fb = _blocks(f.coeffs, box.kmag, bands)
    gb = _blocks(g.coeffs, box.kmag, bands)
    keys = sorted(fb)

    def phys(c):
        return ifft3(pad_spectrum(c, big.n))

    fp = {j: phys(c) for j, c in fb.items()}
    gp = {j: phys(c) for j, c in gb.items()}
    shape = (3, big.n, big.n, big.n)
    t_fg = np.zeros(shape)
    t_gf = np.zeros(shape)
    rem = np.zeros(shape)
    low_f = np.zeros(shape)
    low_g = np.zeros(shape)
    for idx, j in enumerate(keys):
        if idx >= 2:
            low_f += fp[keys[idx - 2]]
            low_g += gp[keys[idx - 2]]
        t_fg += low_f * gp[j]
        t_gf += low_g * fp[j]
        for jp in (j - 1, j, j + 1):
            if jp in fp:
                rem += fp[j] * gp[jp]
    return (
        SpectralField(big, fft3(t_fg)),
        SpectralField(big, fft3(t_gf)),
        SpectralField(big, fft3(rem)),
    )


def padded_product(f: SpectralField, g: SpectralField) -> SpectralField:
    """Componentwise product ``f_i g_i`` on the 2n box (alias-free)."""
    big = 2 * f.box.n
    prod = ifft3(pad_spectrum(f.coeffs, big)) * ifft3(pad_spectrum(g.coeffs, big))
    return SpectralField(BoxSpec(big), fft3(prod))


def interpolation_ratio(f: SpectralField, s: float, s1: float, s2: float) -> float:
    """``||f||_{H^s} / (||f||_{H^s1}^(1-th) ||f||_{H^s2}^th)`` with th = (s-s1)/(s2-s1).

    Hoelder in frequency bounds this by 1 for every f.
    """
    if not s1 < s < s2:
        raise ValueError("need s1 < s < s2")
    th = (s - s1) / (s2 - s1)
    num = sobolev_l2_norm(f, s)
    den = sobolev_l2_norm(f, s1) ** (1 - th) * sobolev_l2_norm(f, s2) ** th
    return 0.0 if den == 0 else num / den


def gagliardo_nirenberg_ratio(u: SpectralField, s: float, q: float) -> float:
    """``||(-D)^s u||_Lq / (||(-D)^s u||_L2^(1-a) ||(-D)^(s+1/2) u||_L2^a)``, a = 3/2 (1/2 - 1/q)."""
    a = 1.5 * (0.5 - 1.0 / q)
    num = lq_norm(frac_laplacian(u, s), q)
    den = sobolev_l2_norm(u, 2 * s) ** (1 - a) * sobolev_l2_norm(u, 2 * s + 1) ** a
    return 0.0 if den == 0 else num / den


def lp_energy_ratio(u: SpectralField, bands: LPBands | None = None) -> float:
    """``sum_j ||Delta_j u||^2 / ||u - S_{j_min-1} u||^2``."""
    bands = bands or LPBands.for_box(u.box)
    e = np.sum(np.abs(u.coeffs) ** 2, axis=0)
    kmag = u.box.kmag
    num = sum(float(np.sum(bands.band_weight(kmag, j) ** 2 * e)) for j in bands.indices)
    den = float(np.sum((1.0 - bands.low_weight(kmag)) ** 2 * e))
    return 0.0 if den == 0 else num / den
