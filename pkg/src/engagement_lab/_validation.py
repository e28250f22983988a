"""Input validation helpers.

Scalars are validated once at construction of the domain types; array inputs
(rows of ``(p, q, v_bar)``) go through :func:`check_params_array` so the
vectorised evaluators and the estimator wrappers accept anything array-like.
"""

from __future__ import annotations

import math

import numpy as np

from .exceptions import ValidationError


def check_unit_interval(value, name: str) -> float:
    """Return ``value`` as float, requiring ``0 <= value < 1``."""
    value = float(value)
    if not (0.0 <= value < 1.0):
        raise ValidationError(f"{name} must lie in [0, 1), got {value!r}")
    return value


def check_positive(value, name: str) -> float:
    value = float(value)
    if not (value > 0.0 and math.isfinite(value)):
        raise ValidationError(f"{name} must be a positive finite real, got {value!r}")
    return value


def check_finite(value, name: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    return value


def check_positive_int(value, name: str) -> int:
    if isinstance(value, bool) or int(value) != value or int(value) < 1:
        raise ValidationError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_params_array(X, name: str = "X") -> np.ndarray:
    """Validate an ``(n, 3)`` array of ``(p, q, v_bar)`` rows.

    A single row may be passed as a 1-D sequence of length 3.
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValidationError(f"{name} must have shape (n, 3) with columns p, q, v_bar; got {arr.shape}")
    if arr.shape[0] == 0:
        raise ValidationError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    p, q, v = arr[:, 0], arr[:, 1], arr[:, 2]
    if np.any((p < 0) | (p >= 1)):
        raise ValidationError(f"{name}: every p must lie in [0, 1)")
    if np.any((q < 0) | (q >= 1)):
        raise ValidationError(f"{name}: every q must lie in [0, 1)")
    if np.any(v <= 0):
        raise ValidationError(f"{name}: every v_bar must be positive")
    return arr


def check_simplex(weights, tol: float = 1e-9, name: str = "weights") -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValidationError(f"{name} must be a non-empty 1-D sequence")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValidationError(f"{name} must be finite and nonnegative")
    if abs(w.sum() - 1.0) > tol:
        raise ValidationError(f"{name} must sum to 1 within {tol:g}, got {w.sum()!r}")
    return w
