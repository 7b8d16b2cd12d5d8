"""Gabor systems on C^L: analysis, synthesis, frame operators and dual windows.

A system is fixed by a window ``phi`` and two steps that divide ``L``: the
time step ``a`` and the frequency step ``b``.  Its atoms are
``M_{m b} T_{n a} phi`` for ``0 <= m < L/b`` and ``0 <= n < L/a``; coefficient
grids are indexed ``[m, n]``.  The adjoint lattice has modulation step
``L/a`` and translation step ``L/b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import LinearOperator, eigsh

from ._validation import (
    NotAFrameError,
    check_divisor,
    check_nonzero,
    check_positive,
    check_signal,
    check_square,
)
from .tfcore import tf_shift_matrix

#: C1 is treated as zero when C1 <= FRAME_RTOL * C2.
FRAME_RTOL = 1e-10
DENSE_EIG_MAX_L = 512


@dataclass(frozen=True, eq=False)
class GaborSystem:
    window: np.ndarray
    a: int
    b: int

    @property
    def L(self):
        return self.window.size

    @property
    def n_times(self):
        return self.L // self.a

    @property
    def n_freqs(self):
        return self.L // self.b

    @property
    def n_atoms(self):
        return self.n_times * self.n_freqs

    @property
    def redundancy(self):
        """Atoms per dimension, ``L / (a b)``."""
        return self.L / (self.a * self.b)

    @property
    def density(self):
        """``a b / L``, the finite counterpart of the lattice cell area."""
        return self.a * self.b / self.L

    @property
    def coef_shape(self):
        return (self.n_freqs, self.n_times)

    def with_window(self, window):
        return build_system(window, self.a, self.b)


@dataclass(frozen=True)
class FrameBounds:
    lower: float
    upper: float
    is_frame: bool

    @property
    def condition(self):
        return np.inf if self.lower <= 0 else self.upper / self.lower


@dataclass(frozen=True, eq=False)
class JanssenRep:
    """Frame operator expanded over the adjoint lattice.

    ``coefficients[j, k]`` multiplies ``M_{j L/a} T_{k L/b}``.
    """

    coefficients: np.ndarray
    L: int
    mod_step: int
    trans_step: int

    def operator(self):
        L = self.L
        out = np.zeros((L, L), dtype=complex)
        for (j, k), c in np.ndenumerate(self.coefficients):
            if c != 0:
                out += c * tf_shift_matrix(L, j * self.mod_step, k * self.trans_step)
        return out

    def to_sequence(self):
        """Coefficients as a twisted sequence, so that ``rep_pi`` rebuilds the operator."""
        from .twisted import TwistedSequence

        a = self.L // self.mod_step
        b = self.L // self.trans_step
        gamma = (self.L / (a * b)) % 1.0
        return TwistedSequence.from_array(self.coefficients, gamma=gamma)


@dataclass(frozen=True)
class ProbeResult:
    eps: float
    value: float
    analysis_norm: float
    lower_ok: bool = field(default=True)
    upper_ok: bool = field(default=True)


def build_system(phi, a, b):
    phi = check_nonzero(check_signal(phi, "phi"))
    L = phi.size
    a = check_divisor(a, L, "a")
    b = check_divisor(b, L, "b")
    phi = phi.copy()
    phi.setflags(write=False)
    return GaborSystem(phi, a, b)


def _shift_table(sys, window):
    # column n holds T_{n a} window
    idx = (np.arange(sys.L)[:, None] - sys.a * np.arange(sys.n_times)[None, :]) % sys.L
    return window[idx]


def analysis(sys, f):
    """Coefficients ``c[m, n] = <f, M_{m b} T_{n a} phi>``."""
    f = check_signal(f, "f", length=sys.L)
    prod = f[:, None] * np.conj(_shift_table(sys, sys.window))
    return np.fft.fft(prod, axis=0)[:: sys.b, :]


def synthesis(sys, c):
    """``sum_{m,n} c[m, n] M_{m b} T_{n a} phi``."""
    c = np.asarray(c, dtype=complex)
    if c.shape != sys.coef_shape:
        raise ValueError(f"coefficient grid has shape {c.shape}, expected {sys.coef_shape}")
    L = sys.L
    full = np.zeros((L, sys.n_times), dtype=complex)
    full[:: sys.b, :] = c
    cols = L * np.fft.ifft(full, axis=0)
    return np.sum(cols * _shift_table(sys, sys.window), axis=1)


def atom_matrix(sys):
    """L x N matrix whose columns are the atoms, in row-major ``(m, n)`` order."""
    L = sys.L
    cols = [
        tf_shift_matrix(L, m * sys.b, n * sys.a) @ sys.window
        for m in range(sys.n_freqs)
        for n in range(sys.n_times)
    ]
    return np.stack(cols, axis=1)


def frame_operator(sys, psi=None):
    """Dense matrix of ``S_{psi,phi} f = sum <f, g_phi> g_psi``.

    With ``psi=None`` this is the frame operator of the system.  Uses the
    fact that summing the modulations leaves only entries with
    ``t - s`` divisible by ``L/b``.
    """
    phi = sys.window
    psi = phi if psi is None else check_signal(psi, "psi", length=sys.L)
    L, M = sys.L, sys.n_freqs
    P = _shift_table(sys, psi)
    Q = _shift_table(sys, phi)
    S = M * (P @ Q.conj().T)
    t = np.arange(L)
    mask = ((t[:, None] - t[None, :]) % M) == 0
    return np.where(mask, S, 0.0)


def frame_operator_apply(sys):
    """Matrix-free ``S`` as a :class:`scipy.sparse.linalg.LinearOperator`."""
    L = sys.L

    def mv(x):
        return synthesis(sys, analysis(sys, np.ravel(x)))

    return LinearOperator((L, L), matvec=mv, rmatvec=mv, dtype=complex)


def _bounds_from(lo, hi):
    lo = max(float(lo), 0.0)
    hi = float(hi)
    return FrameBounds(lo, hi, lo > FRAME_RTOL * hi)


def frame_bounds(sys):
    """Optimal frame bounds: the extreme eigenvalues of ``S``."""
    if sys.L <= DENSE_EIG_MAX_L:
        ev = np.linalg.eigvalsh(frame_operator(sys))
        return _bounds_from(ev[0], ev[-1])
    op = frame_operator_apply(sys)
    hi = eigsh(op, k=1, which="LA", return_eigenvectors=False, tol=1e-12)[0]
    lo = eigsh(op, k=1, which="SA", return_eigenvectors=False, tol=1e-12)[0]
    return _bounds_from(lo, hi)


def conjugate_gradient(apply, rhs, tol=1e-13, maxiter=None, x0=None):
    """Conjugate gradient for Hermitian positive definite systems.

    Returns ``(x, converged, iterations)``; `tol` is on the relative residual.
    """
    rhs = np.asarray(rhs, dtype=complex)
    maxiter = 10 * rhs.size if maxiter is None else maxiter
    x = np.zeros_like(rhs) if x0 is None else np.array(x0, dtype=complex)
    r = rhs - apply(x)
    p = r.copy()
    rr = np.vdot(r, r).real
    target = (tol * np.linalg.norm(rhs)) ** 2
    if rr <= target:
        return x, True, 0
    for it in range(1, maxiter + 1):
        Ap = apply(p)
        alpha = rr / np.vdot(p, Ap).real
        x += alpha * p
        r -= alpha * Ap
        rr_new = np.vdot(r, r).real
        if rr_new <= target:
            return x, True, it
        p = r + (rr_new / rr) * p
        rr = rr_new
    return x, False, maxiter


def dual_window(sys, tol=1e-13, bounds=None):
    """Canonical dual window ``S^{-1} phi``.

    Raises :class:`NotAFrameError` if the system is not a frame.
    """
    bounds = frame_bounds(sys) if bounds is None else bounds
    if not bounds.is_frame:
        raise NotAFrameError(
            f"not a frame: C1 = 0 (smallest eigenvalue {bounds.lower:.3g} <= {FRAME_RTOL:g} * C2)"
        )
    S = frame_operator(sys)
    x, ok, _ = conjugate_gradient(lambda v: S @ v, sys.window, tol=tol, maxiter=10 * sys.L)
    if not ok:
        x = scipy.linalg.solve(S, sys.window, assume_a="her")
    return x


def janssen(sys, psi=None):
    """Janssen coefficients of ``S_{psi,phi}``.

    ``c[j, k] = (L / (a b)) <psi, M_{j L/a} T_{k L/b} phi>`` for
    ``0 <= j < a``, ``0 <= k < b``.
    """
    phi = sys.window
    psi = phi if psi is None else check_signal(psi, "psi", length=sys.L)
    L, a, b = sys.L, sys.a, sys.b
    ms, ts = L // a, L // b
    t = np.arange(L)
    coef = np.empty((a, b), dtype=complex)
    for k in range(b):
        shifted = phi[(t - k * ts) % L]
        # <psi, M_{j ms} g> over all j at once
        coef[:, k] = np.fft.fft(psi * np.conj(shifted))[::ms][:a]
    return JanssenRep(sys.redundancy * coef, L, ms, ts)


def normalized_trace(op):
    """``tr(op) / L``."""
    op = check_square(op)
    return np.trace(op) / op.shape[0]


def density_trace_probe(psi, sys, eps_list, rtol=1e-10):
    """Evaluate ``<psi, (eps I + S)^{-1} psi>`` for each ``eps``.

    ``S`` is the frame operator of `psi` on the lattice of `sys`.  As
    ``eps -> 0`` with ``S`` invertible the values tend to ``a b / L``.
    Each result also checks the two bounds
    ``|A psi_eps|^2 <= value <= |A psi_eps|`` where ``A`` is the analysis
    map of `psi`.
    """
    psi = check_signal(psi, "psi", length=sys.L)
    psys = sys.with_window(psi)
    S = frame_operator(psys)
    eye = np.eye(sys.L)
    out = []
    for eps in eps_list:
        eps = check_positive(eps, "eps")
        phi_eps = scipy.linalg.solve(eps * eye + S, psi, assume_a="her")
        value = np.vdot(phi_eps, psi).real
        anorm = np.linalg.norm(analysis(psys, phi_eps))
        slack = rtol * max(1.0, abs(value))
        lower_ok = value >= anorm**2 - slack
        upper_ok = value <= anorm + slack
        if not (lower_ok and upper_ok):
            raise ArithmeticError(
                f"trace probe bounds violated at eps={eps}: value={value}, |A phi|={anorm}"
            )
        out.append(ProbeResult(eps, value, anorm, lower_ok, upper_ok))
    return out
