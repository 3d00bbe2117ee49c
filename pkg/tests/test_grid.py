import numpy as np
import pytest

from fracns.checkpoint import CheckpointError, decode, decode_physical, encode, read_checkpoint, write_checkpoint
from fracns.grid import (
    BOX_VOLUME,
    BoxSpec,
    PhysicalField,
    SpectralField,
    dealias,
    fft3,
    leray_project,
    random_field,
    to_physical,
    to_spectral,
)

from conftest import single_mode


@pytest.mark.parametrize("n", [8, 24, 15, 0])
def test_boxspec_rejects_bad_sizes(n):
    with pytest.raises(ValueError):
        BoxSpec(n)


def test_wavenumbers_cover_half_open_range(box16):
    assert sorted(box16.k1d) == list(range(-7, 9))


def test_single_mode_to_physical_is_sine(box32):
    f = SpectralField.zeros(box32)
    f.coeffs[0, 0, 1, 0] = -0.5j
    f.coeffs[0, 0, -1, 0] = 0.5j
    x1, x2, x3 = box32.mesh()
    u = to_physical(f).values
    np.testing.assert_allclose(u[0], np.sin(x2), atol=1e-14)
    assert np.abs(u[1:]).max() == 0


def test_zero_roundtrip(box16):
    z = SpectralField.zeros(box16)
    assert np.all(to_physical(z).values == 0)
    assert np.all(to_spectral(to_physical(z)).coeffs == 0)


def test_random_roundtrip(box32, rng):
    vals = rng.standard_normal((3, 32, 32, 32))
    f = to_spectral(PhysicalField(box32, vals))
    back = to_spectral(to_physical(f))
    assert np.abs(back.coeffs - f.coeffs).max() < 1e-12 * np.abs(f.coeffs).max()
    assert f.hermitian_error() < 1e-15


def test_mean_mode_is_grid_average(box16, rng):
    vals = rng.standard_normal((3, 16, 16, 16)) + 2.5
    f = to_spectral(PhysicalField(box16, vals))
    np.testing.assert_allclose(f.coeffs[:, 0, 0, 0].real, vals.mean(axis=(1, 2, 3)), rtol=1e-13)


def test_parseval(box32, rng):
    vals = rng.standard_normal((3, 32, 32, 32))
    f = to_spectral(PhysicalField(box32, vals))
    np.testing.assert_allclose(f.energy_sum(), np.mean(np.sum(vals**2, axis=0)), rtol=1e-12)


def test_leray_kills_gradient(box16):
    f = single_mode(box16, (1, 0, 0), 1.0)
    assert np.abs(leray_project(f).coeffs).max() < 1e-15


def test_leray_hand_mode(box16):
    f = SpectralField.zeros(box16)
    f.coeffs[0, 1, 1, 0] = 1.0
    out = leray_project(f).coeffs[:, 1, 1, 0]
    np.testing.assert_allclose(out, [0.5, -0.5, 0.0], atol=1e-15)


def test_leray_idempotent_and_orthogonal(box32, rng):
    vals = rng.standard_normal((3, 32, 32, 32))
    f = to_spectral(PhysicalField(box32, vals))
    p = leray_project(f)
    pp = leray_project(p)
    assert np.abs(pp.coeffs - p.coeffs).max() <= 1e-14 * np.abs(p.coeffs).max()
    assert p.max_divergence_ratio() < 1e-12
    assert p.l2_norm() <= f.l2_norm()
    inner = np.vdot(p.coeffs, (f - p).coeffs).real
    assert abs(inner) < 1e-12 * f.energy_sum()


def test_leray_leaves_taylor_green(box16):
    from fracns.solver import InitSpec, make_initial

    tg = make_initial(InitSpec("taylor_green", 1.0), box16)
    out = leray_project(tg)
    assert np.abs(out.coeffs - tg.coeffs).max() <= 1e-14 * np.abs(tg.coeffs).max()


def test_dealias_threshold(box32):
    f = SpectralField.zeros(box32)
    f.coeffs[0, 11, 0, 0] = 1.0
    f.coeffs[0, 10, 0, 0] = 2.0
    out = dealias(f)
    assert out.coeffs[0, 11, 0, 0] == 0
    assert out.coeffs[0, 10, 0, 0] == 2.0
    assert np.all(dealias(SpectralField.zeros(box32)).coeffs == 0)


def test_operations_preserve_hermitian(rand32):
    for op in (leray_project, dealias):
        assert op(rand32).hermitian_error() < 1e-15


def test_random_field_invariants(box32):
    f = random_field(box32, 3)
    assert f.max_divergence_ratio() < 1e-12
    assert np.all(f.coeffs[:, 0, 0, 0] == 0)
    assert f.hermitian_error() < 1e-15


def test_checkpoint_layout(box16):
    f = single_mode(box16, (0, 1, 0), 1.0)
    data = encode(f, 1.25)
    assert data[:4] == b"FNS1"
    assert int.from_bytes(data[4:8], "little") == 16
    assert np.frombuffer(data[8:16], "<f8")[0] == 1.25
    samples = np.frombuffer(data[16:], "<f8")
    assert samples.size == 3 * 16**3
    # x-index fastest: the first n samples walk x1 at fixed x2 = x3 = 0
    x1d = box16.x1d
    np.testing.assert_allclose(samples[:16], 0.0, atol=1e-15)
    # stepping x2 moves by n entries
    np.testing.assert_allclose(samples[16 : 16 * 2], np.sin(x1d[1]), atol=1e-15)


def test_checkpoint_roundtrip_bit_exact(tmp_path, rand32):
    path = tmp_path / "c.fns"
    write_checkpoint(path, rand32, 0.5)
    raw = path.read_bytes()
    phys, t = decode_physical(raw)
    assert t == 0.5
    assert np.array_equal(phys.values, to_physical(rand32).values)
    u, _ = read_checkpoint(path)
    np.testing.assert_allclose(to_physical(u).values, phys.values, atol=1e-14)


def test_checkpoint_errors(tmp_path, box16):
    data = encode(SpectralField.zeros(box16), 0.0)
    with pytest.raises(CheckpointError):
        decode(data[:-8])
    with pytest.raises(CheckpointError):
        decode(b"XXXX" + data[4:])
    with pytest.raises(CheckpointError):
        decode(data[:6])
    with pytest.raises(CheckpointError):
        read_checkpoint(tmp_path / "missing.fns")
