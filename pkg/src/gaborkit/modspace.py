"""Subexponential weights and discrete modulation-space norms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_nonzero, check_signal
from .tfcore import stft
from .windows import gaussian

KINDS = ("polynomial_sum", "polynomial_freq", "subexp_time", "constant")


@dataclass(frozen=True)
class WeightSpec:
    """Weight family plus parameters.

    ``polynomial_sum``   ``(1 + |omega| + |x|)**a``
    ``polynomial_freq``  ``(1 + |omega|)**a``
    ``subexp_time``      ``exp(|x|**b)`` with ``0 < b < 1``
    ``constant``         1
    """

    kind: str = "constant"
    a: float = 1.0
    b: float = 0.5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}; expected one of {KINDS}")
        if self.kind in ("polynomial_sum", "polynomial_freq") and not self.a > 0:
            raise ValueError(f"exponent a must be > 0, got {self.a}")
        if self.kind == "subexp_time" and not 0 < self.b < 1:
            raise ValueError(f"exponent b must lie in (0, 1), got {self.b}")

    def __call__(self, omega, x):
        return weight_eval(self, omega, x)


def weight_eval(w, omega, x):
    omega = np.abs(np.asarray(omega, dtype=float))
    x = np.abs(np.asarray(x, dtype=float))
    if w.kind == "polynomial_sum":
        return (1.0 + omega + x) ** w.a
    if w.kind == "polynomial_freq":
        return (1.0 + omega) ** w.a + 0.0 * x
    if w.kind == "subexp_time":
        return np.exp(x**w.b) + 0.0 * omega
    return np.ones(np.broadcast(omega, x).shape)


def symmetric_index(L):
    """Representatives of Z_L in ``[-L/2, L/2)``."""
    return (np.arange(L) + L // 2) % L - L // 2


def m1v_norm(f, w, gamma_window=None):
    """``sum_{m,n} |V_gamma f(m, n)| v(m~, n~)`` with symmetric grid coordinates.

    The window defaults to the unit-norm Gaussian of width ``sqrt(L)``.
    """
    f = check_signal(f, "f")
    g = gaussian(f.size) if gamma_window is None else check_signal(gamma_window, "gamma_window", f.size)
    check_nonzero(g)
    V = stft(f, g)
    s = symmetric_index(f.size)
    return float(np.sum(np.abs(V) * weight_eval(w, s[:, None], s[None, :])))


def lattice_weight(w, freq_step, time_step):
    """Weight on Z^2 with ``v~(j, k) = v(j * freq_step, k * time_step)``.

    For a Gabor system with steps (a, b) on C^L use ``freq_step = L/a`` and
    ``time_step = L/b`` (the adjoint lattice).
    """

    def vt(j, k):
        return weight_eval(w, np.asarray(j) * freq_step, np.asarray(k) * time_step)

    return vt


def is_submultiplicative(w, radius=20):
    """Check ``v(x + y) <= v(x) v(y)`` on all pairs of the integer grid ``[-radius, radius]^2``."""
    r = np.arange(-radius, radius + 1)
    om, x = np.meshgrid(r, r, indexing="ij")
    om, x = om.ravel(), x.ravel()
    vals = weight_eval(w, om, x)
    for i in range(om.size):
        lhs = weight_eval(w, om[i] + om, x[i] + x)
        if np.any(lhs > vals[i] * vals):
            return False
    return True
