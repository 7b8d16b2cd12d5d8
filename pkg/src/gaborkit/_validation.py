"""Input validation helpers shared by the public modules."""

from __future__ import annotations

import numbers

import numpy as np


class NotAFrameError(ValueError):
    """Raised when an operation needs a frame but the lower frame bound is zero."""


class InconclusiveError(RuntimeError):
    """A numerical procedure stopped before reaching its tolerance."""


def check_signal(x, name="signal", length=None):
    """Return `x` as a 1-d complex array with finite entries."""
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must have at least one sample")
    arr = arr.astype(complex, copy=False)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    if length is not None and arr.size != length:
        raise ValueError(f"{name} has length {arr.size}, expected {length}")
    return arr


def check_nonzero(x, name="window"):
    if not np.any(x):
        raise ValueError(f"{name} must be nonzero")
    return x


def check_positive_int(v, name):
    if not isinstance(v, numbers.Integral) or isinstance(v, bool) or v <= 0:
        raise ValueError(f"{name} must be a positive integer, got {v!r}")
    return int(v)


def check_divisor(step, L, name):
    step = check_positive_int(step, name)
    if L % step:
        raise ValueError(f"{name}={step} does not divide L={L}")
    return step


def check_square(op, name="operator"):
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {op.shape}")
    return op


def check_positive(v, name):
    if not np.isfinite(v) or v <= 0:
        raise ValueError(f"{name} must be positive, got {v!r}")
    return float(v)


def check_signals(X, name="X", length=None):
    """2-d batch of signals, one per row.  A single 1-d signal is promoted."""
    arr = np.asarray(X)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-d (n_samples, L), got shape {arr.shape}")
    arr = arr.astype(complex, copy=False)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    if length is not None and arr.shape[1] != length:
        raise ValueError(f"{name} has {arr.shape[1]} samples per row, expected {length}")
    return arr
