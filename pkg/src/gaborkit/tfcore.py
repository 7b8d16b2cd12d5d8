"""Translation, modulation and the full-grid windowed Fourier transform on Z_L.

Conventions: ``<f, g> = sum f * conj(g)``, forward kernel ``exp(-2 pi i m t / L)``
with no ``1/sqrt(L)`` factor, so the STFT satisfies
``sum |V|^2 = L * ||f||^2 * ||phi||^2``.
"""

from __future__ import annotations

import numpy as np

from ._validation import check_nonzero, check_signal


def translate(f, n):
    """T_n f[t] = f[t - n] (cyclic)."""
    f = check_signal(f, "f")
    return np.roll(f, int(n) % f.size)


def modulate(f, m):
    """M_m f[t] = exp(2 pi i m t / L) f[t]."""
    f = check_signal(f, "f")
    L = f.size
    t = np.arange(L)
    return np.exp(2j * np.pi * ((int(m) * t) % L) / L) * f


def tf_shift(f, m, n):
    """Time-frequency shift ``M_m T_n f``; indices are reduced mod L."""
    return modulate(translate(f, n), m)


def modulation_matrix(L, m):
    t = np.arange(L)
    return np.diag(np.exp(2j * np.pi * ((m * t) % L) / L))


def translation_matrix(L, n):
    return np.roll(np.eye(L, dtype=complex), n % L, axis=0)


def tf_shift_matrix(L, m, n):
    """Matrix of ``M_m T_n`` acting on column vectors of length L."""
    t = np.arange(L)
    out = np.zeros((L, L), dtype=complex)
    out[t, (t - n) % L] = np.exp(2j * np.pi * ((m * t) % L) / L)
    return out


def stft(f, phi):
    """Full-grid STFT, ``V[m, n] = <f, M_m T_n phi>``.

    Returns an L x L array indexed (frequency m, time n).
    """
    f = check_signal(f, "f")
    phi = check_signal(phi, "phi", length=f.size)
    L = f.size
    # column n is the DFT of f * conj(T_n phi)
    shifts = np.arange(L)
    idx = (np.arange(L)[:, None] - shifts[None, :]) % L
    prod = f[:, None] * np.conj(phi[idx])
    return np.fft.fft(prod, axis=0)


def istft(V, phi):
    """Invert :func:`stft`; exact for any nonzero window."""
    phi = check_nonzero(check_signal(phi, "phi"))
    L = phi.size
    V = np.asarray(V, dtype=complex)
    if V.shape != (L, L):
        raise ValueError(f"grid has shape {V.shape}, expected {(L, L)}")
    # sum_m V[m, n] e^{2 pi i m t / L} = L * ifft along m
    cols = L * np.fft.ifft(V, axis=0)
    idx = (np.arange(L)[:, None] - np.arange(L)[None, :]) % L
    f = np.sum(cols * phi[idx], axis=1)
    return f / (L * np.vdot(phi, phi).real)
