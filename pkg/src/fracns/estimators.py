"""scikit-learn compatible wrappers around the fitting and statistics routines.

These let the spectrum-model fit, tail fit, envelope calibration and field
statistics sit inside sklearn pipelines, grid searches and ``clone``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import decay
from ._validation import check_1d, check_fields, check_fraction, check_positive
from .grid import PhysicalField, SpectralField, to_physical
from .turbulence import ShellSpectrum, fit_spectrum_model, shell_spectrum, spectrum_model, structure_functions, tail_fit


class SpectrumModelRegressor(RegressorMixin, BaseEstimator):
    """Fit the log-corrected Kolmogorov spectrum ``E(k)`` to (k, E) pairs.

    ``predict`` evaluates the fitted model at new wavenumbers.
    """

    def __init__(self, k0=1.0, delta=0.05, eps=1.0, k_max=None):
        self.k0 = k0
        self.delta = delta
        self.eps = eps
        self.k_max = k_max

    def fit(self, X, y):
        k = check_1d(X, "X")
        e = check_1d(y, "y")
        if k.shape != e.shape:
            raise ValueError("X and y must have the same length")
        check_positive(self.k0, "k0")
        check_positive(self.eps, "eps")
        res = fit_spectrum_model(ShellSpectrum(k, e, eps=self.eps), self.k0, self.delta, k_max=self.k_max)
        self.c_kolm_ = res.c_kolm
        self.beta_t_ = res.beta_t
        self.residual_ = res.residual
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "c_kolm_")
        k = check_1d(X, "X")
        return spectrum_model(k, self.k0, self.eps, self.beta_t_, self.delta, self.c_kolm_)


class StretchedExpTailEstimator(BaseEstimator):
    def __init__(self, delta=0.1, upper_fraction=0.1):
        self.delta = delta
        self.upper_fraction = upper_fraction

    def fit(self, X, y=None):
        x = check_1d(X, "X")
        check_fraction(self.upper_fraction, "upper_fraction")
        res = tail_fit(x, self.delta, self.upper_fraction)
        self.c_ = res.c
        self.c_rate_ = res.c_rate
        self.residual_ = res.residual
        self.degenerate_ = res.degenerate
        return self

    def survival(self, lam):
        """Fitted ``C exp(-c lam^(1/(1+delta)))``."""
        check_is_fitted(self, "c_")
        lam = np.abs(np.asarray(lam, float))
        return self.c_ * np.exp(-self.c_rate_ * lam ** (1.0 / (1.0 + self.delta)))


class DecayEnvelopeEstimator(BaseEstimator):
    """Calibrate the algebraic decay envelope on the leading part of a norm history.

    ``fit(t, norms)`` uses the first ``calibration_fraction`` of samples to
    pick ``c_fit``; ``predict(t)`` returns the envelope and ``coverage`` the
    fraction of samples it dominates.
    """

    def __init__(self, s=0.75, q=12.0, eta=0.01, calibration_fraction=0.1):
        self.s = s
        self.q = q
        self.eta = eta
        self.calibration_fraction = calibration_fraction

    def fit(self, X, y):
        t = check_1d(X, "X")
        norms = check_1d(y, "y")
        check_fraction(self.calibration_fraction, "calibration_fraction")
        m = max(2, int(np.ceil(self.calibration_fraction * len(t))))
        self.c_fit_ = decay.calibrate_c_fit(t[:m], norms[:m], self.s, self.q, self.eta)
        self.params_ = decay.derive_params(self.s, self.q, self.eta, self.c_fit_)
        self.y0_ = float(norms[0]) ** 2
        self.n_calibration_ = m
        return self

    def predict(self, X):
        check_is_fitted(self, "c_fit_")
        t = check_1d(X, "X")
        return np.array([decay.envelope(self.y0_, self.params_, tt) for tt in t])

    def coverage(self, X, y):
        return float(np.mean(self.predict(X) >= check_1d(y, "y")))


class ShellSpectrumTransformer(TransformerMixin, BaseEstimator):
    """Map a list of spectral fields to rows of shell energies ``E(k)``."""

    def __init__(self, nu=0.0):
        self.nu = nu

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        fields = check_fields(X, SpectralField)
        rows = [shell_spectrum(u, self.nu).e_k for u in fields]
        width = max(len(r) for r in rows)
        return np.array([np.pad(r, (0, width - len(r))) for r in rows])


class StructureFunctionTransformer(TransformerMixin, BaseEstimator):
    """Map fields to flattened ``S_p(r)`` tables (orders x separations)."""

    def __init__(self, orders=(2.0, 3.0), max_r=4):
        self.orders = orders
        self.max_r = max_r

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        out = []
        for u in check_fields(X, (PhysicalField, SpectralField)):
            phys = to_physical(u) if isinstance(u, SpectralField) else u
            out.append(structure_functions(phys, self.orders, self.max_r).s_p.ravel())
        return np.array(out)
