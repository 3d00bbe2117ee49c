"""Periodic box, spectral/physical vector fields, Leray projection and dealiasing.

The computational domain is the torus [0, 2pi)^3 sampled on an n^3 collocation
grid.  Spectral coefficients are Fourier-series coefficients: the forward
transform divides by n^3, so a field ``u(x) = sum_k u_hat(k) exp(i k.x)``
has ``u_hat`` stored directly.  Parseval then reads

    mean_x |u(x)|^2 = sum_k |u_hat(k)|^2,

and the L2 norm over the box is ``sqrt((2pi)^3 * sum_k |u_hat(k)|^2)``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft

TWO_PI = 2.0 * np.pi
BOX_VOLUME = TWO_PI**3


def fft_workers() -> int:
    """Worker count for scipy.fft, capped by ``FRNS_THREADS`` when set."""
    env = os.environ.get("FRNS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


@dataclass(frozen=True)
class BoxSpec:
    n: int
    length: float = TWO_PI

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 16 or n & (n - 1):
            raise ValueError(f"n must be a power of two >= 16, got {n!r}")
        if not np.isclose(self.length, TWO_PI):
            raise ValueError("box length is fixed at 2*pi")

    @cached_property
    def k1d(self) -> np.ndarray:
        """Integer wavenumbers in FFT order, Nyquist stored as +n/2."""
        k = np.fft.fftfreq(self.n, 1.0 / self.n)
        k[self.n // 2] = self.n // 2
        return k

    @cached_property
    def kvec(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(np.meshgrid(self.k1d, self.k1d, self.k1d, indexing="ij"))

    @cached_property
    def k2(self) -> np.ndarray:
        k1, k2, k3 = self.kvec
        return k1**2 + k2**2 + k3**2

    @cached_property
    def kmag(self) -> np.ndarray:
        return np.sqrt(self.k2)

    @cached_property
    def kmax_abs(self) -> np.ndarray:
        """max(|k1|, |k2|, |k3|) per mode, used by the 2/3 rule."""
        k1, k2, k3 = self.kvec
        return np.maximum(np.maximum(np.abs(k1), np.abs(k2)), np.abs(k3))

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        return self.kmax_abs <= self.n / 3.0

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        """True on modes with any component at the Nyquist index."""
        return self.kmax_abs == self.n // 2

    @cached_property
    def dx(self) -> float:
        return self.length / self.n

    @cached_property
    def x1d(self) -> np.ndarray:
        return np.arange(self.n) * self.dx

    def mesh(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Collocation coordinates (x1, x2, x3), each of shape (n, n, n)."""
        return tuple(np.meshgrid(self.x1d, self.x1d, self.x1d, indexing="ij"))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Velocity field stored as Fourier coefficients, shape ``(3, n, n, n)``."""

    box: BoxSpec
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.box.n
        if self.coeffs.shape != (3, n, n, n):
            raise ValueError(f"coeffs must have shape (3, {n}, {n}, {n}), got {self.coeffs.shape}")

    @classmethod
    def zeros(cls, box: BoxSpec) -> "SpectralField":
        n = box.n
        return cls(box, np.zeros((3, n, n, n), dtype=complex))

    def copy(self) -> "SpectralField":
        return SpectralField(self.box, self.coeffs.copy())

    def __add__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.box, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.box, self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.box, self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.box, -self.coeffs)

    def divergence(self) -> np.ndarray:
        """Spectral divergence coefficients ``i k . u_hat``."""
        k1, k2, k3 = self.box.kvec
        c = self.coeffs
        return 1j * (k1 * c[0] + k2 * c[1] + k3 * c[2])

    def max_divergence_ratio(self) -> float:
        """max over k != 0 of |k . u_hat(k)| / |u_hat(k)| (0 for the zero field)."""
        amp = np.sqrt(np.sum(np.abs(self.coeffs) ** 2, axis=0))
        nz = amp > 0
        nz[0, 0, 0] = False
        if not nz.any():
            return 0.0
        return float(np.max(np.abs(self.divergence()[nz]) / amp[nz]))

    def hermitian_error(self) -> float:
        """max |u_hat(-k) - conj(u_hat(k))|, excluding Nyquist planes."""
        c = self.coeffs
        flipped = np.roll(np.flip(c, axis=(1, 2, 3)), 1, axis=(1, 2, 3))
        diff = np.abs(flipped - np.conj(c))
        diff[:, self.box.nyquist_mask] = 0.0
        return float(diff.max())

    def energy_sum(self) -> float:
        """sum_k |u_hat(k)|^2, equal to the grid mean of |u|^2."""
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def l2_norm(self) -> float:
        return float(np.sqrt(BOX_VOLUME * self.energy_sum()))


@dataclass(frozen=True, eq=False)
class PhysicalField:
    """Real velocity samples on the collocation grid, shape ``(3, n, n, n)``."""

    box: BoxSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.box.n
        if self.values.shape != (3, n, n, n):
            raise ValueError(f"values must have shape (3, {n}, {n}, {n}), got {self.values.shape}")

    def magnitude(self) -> np.ndarray:
        return np.sqrt(np.sum(self.values**2, axis=0))


def fft3(values: np.ndarray) -> np.ndarray:
    """Forward transform over the last three axes, normalised by n^3."""
    return scipy.fft.fftn(values, axes=(-3, -2, -1), norm="forward", workers=fft_workers())


def ifft3(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`fft3`, returning the real part."""
    out = scipy.fft.ifftn(coeffs, axes=(-3, -2, -1), norm="forward", workers=fft_workers())
    return out.real


def to_physical(f: SpectralField) -> PhysicalField:
    return PhysicalField(f.box, ifft3(f.coeffs))


def to_spectral(f: PhysicalField) -> SpectralField:
    return SpectralField(f.box, fft3(f.values))


def leray_project(f: SpectralField) -> SpectralField:
    """Remove the wavevector-parallel part of every mode; k = 0 untouched."""
    k = f.box.kvec
    k2 = f.box.k2.copy()
    k2[0, 0, 0] = 1.0
    c = f.coeffs
    kdotu = (k[0] * c[0] + k[1] * c[1] + k[2] * c[2]) / k2
    out = np.empty_like(c)
    for i in range(3):
        out[i] = c[i] - k[i] * kdotu
    return SpectralField(f.box, out)


def dealias(f: SpectralField) -> SpectralField:
    """Sharp 2/3 rule: zero every mode with max(|k_i|) > n/3."""
    return SpectralField(f.box, f.coeffs * f.box.dealias_mask)


def spectral_gradient(coeff: np.ndarray, box: BoxSpec) -> np.ndarray:
    """``i k_j c`` for j = 1..3 with the Nyquist modes zeroed."""
    keep = ~box.nyquist_mask
    return np.stack([1j * kj * coeff * keep for kj in box.kvec])


def pad_spectrum(coeffs: np.ndarray, n_big: int) -> np.ndarray:
    """Embed an n^3 spectrum (FFT order, leading axes kept) into an n_big^3 one.

    Nyquist entries of the source are dropped; padded fields are only used for
    products of band-limited inputs where those entries are zero or negligible.
    """
    n = coeffs.shape[-1]
    h = n // 2
    lead = coeffs.shape[:-3]
    out = np.zeros(lead + (n_big, n_big, n_big), dtype=complex)
    idx_src = np.r_[0:h, h + 1 : n]
    idx_dst = np.r_[0:h, n_big - h + 1 : n_big]
    out[..., idx_dst[:, None, None], idx_dst[None, :, None], idx_dst[None, None, :]] = coeffs[
        ..., idx_src[:, None, None], idx_src[None, :, None], idx_src[None, None, :]
    ]
    return out


def truncate_spectrum(coeffs: np.ndarray, n_small: int) -> np.ndarray:
    """Inverse of :func:`pad_spectrum`; modes outside the small box are discarded."""
    n_big = coeffs.shape[-1]
    h = n_small // 2
    lead = coeffs.shape[:-3]
    out = np.zeros(lead + (n_small, n_small, n_small), dtype=complex)
    idx_dst = np.r_[0:h, h + 1 : n_small]
    idx_src = np.r_[0:h, n_big - h + 1 : n_big]
    out[..., idx_dst[:, None, None], idx_dst[None, :, None], idx_dst[None, None, :]] = coeffs[
        ..., idx_src[:, None, None], idx_src[None, :, None], idx_src[None, None, :]
    ]
    return out


def random_field(
    box: BoxSpec,
    rng: np.random.Generator | int | None = None,
    decay: float = 0.2,
    amplitude: float = 1.0,
) -> SpectralField:
    """Random smooth divergence-free field with spectral envelope exp(-decay |k|^2).

    The result is real (built from a real physical sample), mean-zero,
    dealiased and Leray-projected.
    """
    rng = np.random.default_rng(rng)
    noise = rng.standard_normal((3, box.n, box.n, box.n))
    c = fft3(noise) * np.exp(-decay * box.k2)
    c[:, 0, 0, 0] = 0.0
    f = leray_project(dealias(SpectralField(box, c)))
    norm = np.sqrt(f.energy_sum())
    if norm > 0:
        f = f * (amplitude / norm)
    return f
