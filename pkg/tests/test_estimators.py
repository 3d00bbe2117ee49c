import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from fracns.decay import derive_params, envelope
from fracns.estimators import (
    DecayEnvelopeEstimator,
    ShellSpectrumTransformer,
    SpectrumModelRegressor,
    StretchedExpTailEstimator,
    StructureFunctionTransformer,
)
from fracns.grid import random_field, to_physical
from fracns.turbulence import spectrum_model


def test_spectrum_regressor_round_trip():
    k = np.arange(1, 33, dtype=float)
    y = spectrum_model(k, 1.0, 0.8, 0.25, 0.05, 1.4)
    est = SpectrumModelRegressor(k0=1.0, delta=0.05, eps=0.8).fit(k.reshape(-1, 1), y)
    assert est.c_kolm_ == pytest.approx(1.4, rel=1e-6)
    assert est.beta_t_ == pytest.approx(0.25, rel=1e-6)
    np.testing.assert_allclose(est.predict(k), y, rtol=1e-6)
    assert est.score(k, y) > 0.999999


def test_clone_and_params():
    est = SpectrumModelRegressor(k0=2.0, delta=0.1)
    c = clone(est)
    assert c.get_params() == est.get_params()
    c.set_params(delta=0.2)
    assert est.delta == 0.1
    with pytest.raises(NotFittedError):
        est.predict([2.0, 3.0])


def test_spectrum_regressor_validates():
    with pytest.raises(ValueError):
        SpectrumModelRegressor().fit(np.ones((4, 2)), np.ones(4))
    with pytest.raises(ValueError):
        SpectrumModelRegressor(eps=-1).fit(np.arange(1, 10.0), np.ones(9))


def test_tail_estimator():
    x = np.random.default_rng(0).exponential(size=20_000) ** 1.1
    est = StretchedExpTailEstimator(delta=0.1).fit(x)
    assert est.c_rate_ == pytest.approx(1.0, rel=0.1)
    assert est.survival(0.0) == pytest.approx(est.c_)
    with pytest.raises(ValueError):
        StretchedExpTailEstimator(upper_fraction=1.5).fit(x)


def test_decay_envelope_estimator():
    p = derive_params(0.75, 12.0, 0.01)
    t = np.linspace(0, 4, 40)
    norms = 0.99 * np.array([envelope(1.0, p, tt) for tt in t])
    norms[0] = 1.0
    est = DecayEnvelopeEstimator().fit(t, norms)
    assert est.n_calibration_ == 4
    assert est.c_fit_ == pytest.approx(1.0, abs=1e-6)
    assert est.coverage(t, norms) == 1.0
    assert est.predict([0.0])[0] == pytest.approx(est.c_fit_)


def test_field_transformers(box16):
    fields = [random_field(box16, i) for i in range(3)]
    e = ShellSpectrumTransformer().fit_transform(fields)
    assert e.shape[0] == 3
    np.testing.assert_allclose(e.sum(axis=1), 0.5 * np.array([f.energy_sum() for f in fields]))
    sf = StructureFunctionTransformer(orders=(2.0,), max_r=3).fit_transform([to_physical(f) for f in fields])
    assert sf.shape == (3, 4)
    assert np.all(sf[:, 0] == 0)
    with pytest.raises(TypeError):
        ShellSpectrumTransformer().transform([np.zeros(3)])
