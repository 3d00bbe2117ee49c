"""Binary checkpoint format ``FNS1``.

Layout (all little-endian)::

    b"FNS1" | u32 n | f64 time | 3 * n^3 f64 samples (u1, u2, u3), x-index fastest

Samples are physical-space values so the file does not depend on the
spectral storage layout.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .grid import BoxSpec, PhysicalField, SpectralField, dealias, leray_project, to_physical, to_spectral

MAGIC = b"FNS1"
_HEADER = struct.Struct("<4sId")


class CheckpointError(ValueError):
    pass


def encode(u: SpectralField, t: float) -> bytes:
    n = u.box.n
    values = to_physical(u).values
    # component-major, then x1 fastest within each component
    body = np.asarray(values.transpose(0, 3, 2, 1), dtype="<f8").tobytes(order="C")
    return _HEADER.pack(MAGIC, n, float(t)) + body


def decode_physical(data: bytes) -> tuple[PhysicalField, float]:
    """Raw samples and time, bit-exact with what :func:`encode` wrote."""
    if len(data) < _HEADER.size:
        raise CheckpointError("checkpoint truncated: header incomplete")
    magic, n, t = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CheckpointError(f"bad magic {magic!r}, expected {MAGIC!r}")
    try:
        box = BoxSpec(int(n))
    except ValueError as exc:
        raise CheckpointError(f"invalid grid size in header: {exc}") from None
    expected = _HEADER.size + 3 * n**3 * 8
    if len(data) != expected:
        raise CheckpointError(f"checkpoint size {len(data)} bytes, expected {expected} for n={n}")
    flat = np.frombuffer(data, dtype="<f8", offset=_HEADER.size).astype(float)
    values = flat.reshape(3, n, n, n).transpose(0, 3, 2, 1).copy()
    return PhysicalField(box, values), float(t)


def decode(data: bytes) -> tuple[SpectralField, float]:
    phys, t = decode_physical(data)
    return canonicalize(to_spectral(phys)), t


def canonicalize(u: SpectralField) -> SpectralField:
    """Project a decoded state back onto the dealiased, divergence-free subspace."""
    c = u.coeffs.copy()
    c[:, 0, 0, 0] = 0.0
    return leray_project(dealias(SpectralField(u.box, c)))


def write_checkpoint(path: str | Path, u: SpectralField, t: float) -> None:
    Path(path).write_bytes(encode(u, t))


def read_checkpoint(path: str | Path) -> tuple[SpectralField, float]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from None
    return decode(data)
