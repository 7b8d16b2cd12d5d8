"""Discrete Heisenberg group, its Gabor representation, and the compact-center group H_gamma."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._validation import check_divisor, check_positive_int
from .tfcore import tf_shift_matrix


def _vec(x):
    return tuple(int(v) for v in np.atleast_1d(x))


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


@dataclass(frozen=True)
class HeisenbergElement:
    """``(j, k, l)`` with group law ``(j,k,l)(j',k',l') = (j+j', k+k', l+l'+k.j')``."""

    j: tuple
    k: tuple
    l: int

    def __post_init__(self):
        object.__setattr__(self, "j", _vec(self.j))
        object.__setattr__(self, "k", _vec(self.k))
        object.__setattr__(self, "l", int(self.l))
        if len(self.j) != len(self.k):
            raise ValueError("j and k must have the same dimension")

    @property
    def d(self):
        return len(self.j)

    @classmethod
    def identity(cls, d=1):
        return cls((0,) * d, (0,) * d, 0)

    def __mul__(self, other):
        return h_mul(self, other)

    def inverse(self):
        return h_inv(self)

    def is_central(self):
        return not any(self.j) and not any(self.k)


def h_mul(x, y):
    if x.d != y.d:
        raise ValueError(f"dimension mismatch: {x.d} vs {y.d}")
    j = tuple(a + b for a, b in zip(x.j, y.j))
    k = tuple(a + b for a, b in zip(x.k, y.k))
    return HeisenbergElement(j, k, x.l + y.l + _dot(x.k, y.j))


def h_inv(x):
    return HeisenbergElement(
        tuple(-v for v in x.j), tuple(-v for v in x.k), -x.l + _dot(x.k, x.j)
    )


def commutator(x, y):
    return x * y * x.inverse() * y.inverse()


def pi_rep(x, L, a_step, b_step):
    """``exp(-2 pi i (ab/L) l) M_{j b} T_{k a}`` on C^L (d = 1)."""
    if x.d != 1:
        raise ValueError("pi_rep acts on C^L only for d = 1")
    L = check_positive_int(L, "L")
    a_step = check_divisor(a_step, L, "a_step")
    b_step = check_divisor(b_step, L, "b_step")
    theta = Fraction(a_step * b_step, L)
    # reduce the phase exactly before exponentiating
    ph = (theta * x.l) % 1
    return np.exp(-2j * np.pi * float(ph)) * tf_shift_matrix(L, x.j[0] * b_step, x.k[0] * a_step)


def kernel_generator(L, a_step, b_step):
    """``q`` with ``ker(pi) = {(0,0,q l)}``, where ``ab/L = p/q`` in lowest terms."""
    return Fraction(a_step * b_step, L).denominator


@dataclass(frozen=True)
class HGammaElement:
    """``(j, k, zeta)`` with ``|zeta| = 1``."""

    j: tuple
    k: tuple
    zeta: complex

    def __post_init__(self):
        object.__setattr__(self, "j", _vec(self.j))
        object.__setattr__(self, "k", _vec(self.k))
        object.__setattr__(self, "zeta", complex(self.zeta))
        if abs(abs(self.zeta) - 1.0) > 1e-12:
            raise ValueError(f"|zeta| must be 1, got {abs(self.zeta)}")

    @property
    def d(self):
        return len(self.j)


def hgamma_mul(x, y, gamma):
    """``(j,k,z)(j',k',z') = (j+j', k+k', z z' exp(-2 pi i gamma k.j'))``."""
    if x.d != y.d:
        raise ValueError(f"dimension mismatch: {x.d} vs {y.d}")
    j = tuple(a + b for a, b in zip(x.j, y.j))
    k = tuple(a + b for a, b in zip(x.k, y.k))
    z = x.zeta * y.zeta * np.exp(-2j * np.pi * gamma * _dot(x.k, y.j))
    return HGammaElement(j, k, z / abs(z))


def hgamma_inv(x, gamma):
    z = np.conj(x.zeta) * np.exp(-2j * np.pi * gamma * _dot(x.k, x.j))
    return HGammaElement(tuple(-v for v in x.j), tuple(-v for v in x.k), z)


def to_hgamma(x, gamma):
    """Homomorphism ``(j,k,l) -> (j,k,exp(-2 pi i gamma l))``."""
    return HGammaElement(x.j, x.k, np.exp(-2j * np.pi * gamma * x.l))


def j_embed(a, Q):
    """Sample ``J(a)(j,k,zeta) = a_{jk} / zeta`` at ``zeta_q = exp(2 pi i q / Q)``.

    Returns an array of shape ``a.shape + (Q,)`` aligned with ``a.offset``.
    """
    Q = check_positive_int(Q, "Q")
    zeta = np.exp(2j * np.pi * np.arange(Q) / Q)
    return a.data[..., None] / zeta


def _zeta_index(z, Q):
    q = np.angle(z) * Q / (2 * np.pi)
    qi = int(np.rint(q))
    if abs(q - qi) > 1e-9:
        raise ValueError(f"zeta={z} is not on the {Q}-point grid")
    return qi % Q


def group_convolution(F, G, offset_f, offset_g, gamma, Q):
    """Brute-force convolution on ``Z^2 x Z_Q`` sampled from H_gamma (d = 1).

    ``(F*G)(x) = sum_y F(y) G(y^{-1} x)`` with the normalised counting
    measure on the zeta grid.  Exact when the group law keeps the grid
    closed (gamma = p/q with q | Q).
    """
    zeta = np.exp(2j * np.pi * np.arange(Q) / Q)
    shape = (F.shape[0] + G.shape[0] - 1, F.shape[1] + G.shape[1] - 1, Q)
    off = (offset_f[0] + offset_g[0], offset_f[1] + offset_g[1])
    out = np.zeros(shape, dtype=complex)
    for (i1, i2, qy), fv in np.ndenumerate(F):
        if fv == 0:
            continue
        y = HGammaElement((i1 + offset_f[0],), (i2 + offset_f[1],), zeta[qy])
        for (g1, g2, qg), gv in np.ndenumerate(G):
            if gv == 0:
                continue
            # G evaluated at y^{-1} x = w  <=>  x = y w
            w = HGammaElement((g1 + offset_g[0],), (g2 + offset_g[1],), zeta[qg])
            x = hgamma_mul(y, w, gamma)
            qx = _zeta_index(x.zeta, Q)
            out[x.j[0] - off[0], x.k[0] - off[1], qx] += fv * gv / Q
    return out, off


def sigma_rep(gamma, delta, x, c):
    """``[sigma(j,k,l) c]_n = exp(2 pi i (delta j - gamma l + n gamma j)) c_{n-k}`` on Z_N."""
    if x.d != 1:
        raise ValueError("sigma_rep is defined for d = 1")
    c = np.asarray(c, dtype=complex)
    N = c.size
    n = np.arange(N)
    j, k = x.j[0], x.k[0]
    phase = np.exp(2j * np.pi * (delta * j - gamma * x.l + n * gamma * j))
    return phase * np.roll(c, k)


def sigma_matrix(gamma, delta, x, N):
    return np.stack([sigma_rep(gamma, delta, x, col) for col in np.eye(N)], axis=1)
