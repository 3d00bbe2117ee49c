"""Input validation helpers shared by the estimator wrappers."""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils.validation import check_array


def check_1d(x, name: str = "X") -> np.ndarray:
    """Accept a 1-D array or an (n, 1) column and return a float 1-D array."""
    arr = np.asarray(x)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D or a single column, got shape {arr.shape}")
    return check_array(arr.reshape(-1, 1), dtype=float, input_name=name)[:, 0]


def check_positive(value, name: str) -> float:
    if not isinstance(value, numbers.Real) or not value > 0:
        raise ValueError(f"{name} must be a positive real, got {value!r}")
    return float(value)


def check_fraction(value, name: str) -> float:
    if not isinstance(value, numbers.Real) or not 0 < value <= 1:
        raise ValueError(f"{name} must lie in (0, 1], got {value!r}")
    return float(value)


def check_fields(X, kinds) -> list:
    if isinstance(X, kinds):
        X = [X]
    fields = list(X)
    if not fields:
        raise ValueError("expected at least one field")
    for f in fields:
        if not isinstance(f, kinds):
            raise TypeError(f"expected field objects, got {type(f).__name__}")
    return fields
