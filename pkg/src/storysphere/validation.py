"""Input validation helpers for the estimator-style APIs."""

from __future__ import annotations

import numpy as np

from .errors import ContractError
from .geometry import UNIT_NORM_TOL


def check_direction_array(X, name: str = "X") -> np.ndarray:
    """Coerce to a float (n, 3) array of unit rows or raise."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != 3:
        raise ContractError(f"{name} must have shape (n, 3), got {X.shape}")
    if len(X) == 0:
        return X
    norms = np.linalg.norm(X, axis=1)
    if np.any(np.abs(norms - 1.0) > UNIT_NORM_TOL):
        bad = int(np.argmax(np.abs(norms - 1.0)))
        raise ContractError(f"{name} rows must be unit vectors; row {bad} has norm {norms[bad]!r}")
    return X


def check_in_range(name: str, value, lo, hi, *, lo_open=False, hi_open=False):
    if (value <= lo if lo_open else value < lo) or (value >= hi if hi_open else value > hi):
        lo_b = "(" if lo_open else "["
        hi_b = ")" if hi_open else "]"
        raise ContractError(f"{name} must be in {lo_b}{lo}, {hi}{hi_b}, got {value}")
    return value


def check_odd_window(window: int, name: str = "window") -> int:
    if not isinstance(window, (int, np.integer)) or window < 1 or window % 2 == 0:
        raise ContractError(f"{name} must be an odd integer >= 1, got {window}")
    return int(window)
