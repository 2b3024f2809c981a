"""Small input-checking helpers shared by the public functions."""
import numbers

import numpy as np

from .errors import DomainError

#: distance from the unit circle at which disk points are rejected
DISK_GUARD = 1e-12


def check_disk(z, name="z"):
    """Return ``z`` as a complex scalar, rejecting points outside the open disk."""
    z = complex(z)
    if not np.isfinite(z.real) or not np.isfinite(z.imag):
        raise DomainError(f"{name} is not finite: {z!r}")
    if abs(z) >= 1.0 - DISK_GUARD:
        raise DomainError(f"|{name}| = {abs(z):.17g} is not inside the unit disk")
    return z


def check_disk_array(z, name="z"):
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise DomainError(f"{name} contains non-finite entries")
    if np.any(np.abs(z) >= 1.0 - DISK_GUARD):
        raise DomainError(f"{name} has entries outside the unit disk")
    return z


def check_positive(value, name):
    if not value > 0:
        raise DomainError(f"{name} must be positive, got {value!r}")
    return value


def check_nonneg_int(value, name):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < 0:
        raise DomainError(f"{name} must be a non-negative integer, got {value!r}")
    return int(value)


def check_points(X, n_features, name="X"):
    """Validate a 2-D feature array the way the estimators expect it."""
    X = np.asarray(X)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2 or X.shape[1] != n_features:
        raise ValueError(f"{name} must have shape (n_samples, {n_features}), got {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite values")
    return X
