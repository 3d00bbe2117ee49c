"""Hypothesis property tests for the spectral operators and the checkpoint codec."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracns.checkpoint import decode, decode_physical, encode
from fracns.fracops import frac_laplacian, sobolev_l2_norm
from fracns.grid import BoxSpec, dealias, leray_project, random_field, to_physical, to_spectral
from fracns.solver import nonlinear_term

BOX = BoxSpec(16)
seeds = st.integers(0, 2**31 - 1)
orders = st.floats(0.05, 1.0)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_leray_idempotent(seed):
    u = random_field(BOX, seed)
    once = leray_project(to_spectral(to_physical(u)))
    twice = leray_project(once)
    assert np.abs(once.coeffs - twice.coeffs).max() < 1e-15
    assert twice.max_divergence_ratio() < 1e-13


@settings(max_examples=25, deadline=None)
@given(seeds, orders, orders)
def test_frac_laplacian_semigroup(seed, a, b):
    u = random_field(BOX, seed)
    lhs = frac_laplacian(frac_laplacian(u, a), b).coeffs
    rhs = frac_laplacian(u, a + b).coeffs
    assert np.abs(lhs - rhs).max() <= 1e-11 * max(np.abs(rhs).max(), 1e-300)


@settings(max_examples=25, deadline=None)
@given(seeds, st.floats(0.1, 1.5), st.floats(0.1, 1.5))
def test_sobolev_norm_monotone_in_order(seed, a, b):
    # mean-zero torus fields have |k| >= 1, so higher orders dominate
    u = random_field(BOX, seed)
    lo, hi = sorted((a, b))
    assert sobolev_l2_norm(u, lo) <= sobolev_l2_norm(u, hi) * (1 + 1e-12)


@settings(max_examples=25, deadline=None)
@given(seeds, st.floats(-3.0, 3.0))
def test_nonlinear_is_quadratic(seed, lam):
    u = random_field(BOX, seed)
    a = nonlinear_term(u).coeffs
    b = nonlinear_term(u * lam).coeffs
    assert np.abs(b - lam**2 * a).max() <= 1e-12 * max(np.abs(b).max(), 1e-300)


@settings(max_examples=25, deadline=None)
@given(seeds, st.floats(0.0, 1e3))
def test_checkpoint_round_trip(seed, t):
    u = random_field(BOX, seed)
    data = encode(u, t)
    phys, t2 = decode_physical(data)
    assert t2 == t
    assert np.array_equal(phys.values, to_physical(u).values)
    v, _ = decode(data)
    w, _ = decode(data)
    assert np.array_equal(v.coeffs, w.coeffs)
    assert np.abs(v.coeffs - u.coeffs).max() < 1e-15


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_dealias_projection(seed):
    u = random_field(BOX, seed, decay=0.01)
    d = dealias(u)
    assert np.array_equal(dealias(d).coeffs, d.coeffs)
    assert np.abs(d.coeffs[:, ~BOX.dealias_mask]).max() == 0
