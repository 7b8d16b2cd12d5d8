"""The twisted convolution algebra on finitely supported sequences over Z^{2d}.

Sequences are stored densely on their bounding box.  An index is a tuple
``(j_1..j_d, k_1..k_d)``; for d = 1 that is ``(j, k)``.  Product and
involution::

    (a # b)_{jk} = sum_{l,m} a_{lm} b_{(j-l)(k-m)} exp(-2 pi i gamma (j-l).m)
    (a*)_{jk}    = conj(a_{(-j)(-k)}) exp(-2 pi i gamma j.k)
"""

from __future__ import annotations

import itertools
import math
import warnings

import numpy as np
import scipy.sparse as sp
import scipy.linalg
from scipy.sparse.linalg import splu

from ._validation import InconclusiveError, check_divisor, check_positive_int
from .tfcore import tf_shift_matrix

DENSE_MAX = 400


class SingularAtTruncationError(ValueError):
    """L_a looks singular on the truncated box.

    This says nothing about invertibility in l^1; only that the finite
    section could not certify invertibility on l^2.
    """


class TwistedSequence:
    """Finitely supported complex sequence on Z^{2d} with twist parameter gamma."""

    __slots__ = ("data", "offset", "gamma", "d")

    def __init__(self, data, offset, gamma, d=1):
        data = np.asarray(data, dtype=complex)
        if data.ndim != 2 * d:
            raise ValueError(f"data must have {2 * d} axes for d={d}")
        if len(offset) != 2 * d:
            raise ValueError("offset length must be 2d")
        self.data = data
        self.offset = tuple(int(o) for o in offset)
        self.gamma = float(gamma)
        self.d = int(d)

    # construction

    @classmethod
    def zero(cls, gamma, d=1):
        return cls(np.zeros((1,) * (2 * d), dtype=complex), (0,) * (2 * d), gamma, d)

    @classmethod
    def identity(cls, gamma, d=1):
        return cls(np.ones((1,) * (2 * d), dtype=complex), (0,) * (2 * d), gamma, d)

    @classmethod
    def delta(cls, index, gamma, value=1.0):
        index = tuple(int(i) for i in index)
        if len(index) % 2:
            raise ValueError("index must have even length 2d")
        return cls(np.full((1,) * len(index), value, dtype=complex), index, gamma, len(index) // 2)

    @classmethod
    def from_dict(cls, entries, gamma, d=None):
        if not entries:
            return cls.zero(gamma, d or 1)
        keys = [tuple(int(i) for i in k) for k in entries]
        n = len(keys[0])
        if any(len(k) != n for k in keys) or n % 2:
            raise ValueError("all indices must have the same even length")
        if d is not None and n != 2 * d:
            raise ValueError(f"indices have length {n}, expected {2 * d}")
        lo = np.min(keys, axis=0)
        hi = np.max(keys, axis=0)
        data = np.zeros(tuple(hi - lo + 1), dtype=complex)
        for k, v in zip(keys, entries.values()):
            data[tuple(np.subtract(k, lo))] += v
        return cls(data, tuple(lo), gamma, n // 2).trimmed()

    @classmethod
    def from_array(cls, arr, gamma, offset=None):
        arr = np.asarray(arr, dtype=complex)
        if arr.ndim % 2:
            raise ValueError("array must have an even number of axes")
        offset = (0,) * arr.ndim if offset is None else offset
        return cls(arr.copy(), offset, gamma, arr.ndim // 2).trimmed()

    # views

    @property
    def shape(self):
        return self.data.shape

    def entries(self):
        """Nonzero entries as ``{index: value}``."""
        out = {}
        for idx in zip(*np.nonzero(self.data)):
            key = tuple(int(i) + o for i, o in zip(idx, self.offset))
            out[key] = complex(self.data[idx])
        return out

    def __getitem__(self, index):
        pos = tuple(int(i) - o for i, o in zip(index, self.offset))
        if all(0 <= p < s for p, s in zip(pos, self.shape)):
            return complex(self.data[pos])
        return 0j

    def coords(self, axis):
        return self.offset[axis] + np.arange(self.shape[axis])

    def support_radius(self):
        """Largest sup-norm of an index carrying a nonzero entry."""
        nz = np.argwhere(self.data != 0)
        if nz.size == 0:
            return 0
        return int(np.max(np.abs(nz + np.asarray(self.offset))))

    def l1_norm(self):
        return float(np.sum(np.abs(self.data)))

    def weighted_norm(self, weight):
        """``sum |a_{jk}| w(j, k)``; `weight` takes one coordinate array per axis."""
        grids = np.meshgrid(*[self.coords(i) for i in range(2 * self.d)], indexing="ij")
        return float(np.sum(np.abs(self.data) * weight(*grids)))

    # normalisation

    def trimmed(self):
        """Shrink the stored box to the bounding box of nonzero entries."""
        nz = np.argwhere(self.data != 0)
        if nz.size == 0:
            return TwistedSequence.zero(self.gamma, self.d)
        lo = nz.min(axis=0)
        hi = nz.max(axis=0) + 1
        sl = tuple(slice(l, h) for l, h in zip(lo, hi))
        off = tuple(o + l for o, l in zip(self.offset, lo))
        return TwistedSequence(self.data[sl], off, self.gamma, self.d)

    def pruned(self, threshold):
        """Zero every entry with modulus <= `threshold`, then trim."""
        data = np.where(np.abs(self.data) > threshold, self.data, 0)
        return TwistedSequence(data, self.offset, self.gamma, self.d).trimmed()

    # linear structure

    def _check_compatible(self, other):
        if not isinstance(other, TwistedSequence):
            raise TypeError(f"expected TwistedSequence, got {type(other).__name__}")
        if other.d != self.d:
            raise ValueError(f"dimension mismatch: d={self.d} vs d={other.d}")
        if not math.isclose(other.gamma, self.gamma, rel_tol=0, abs_tol=1e-15):
            raise ValueError(f"gamma mismatch: {self.gamma} vs {other.gamma}")

    def _embed(self, offset, shape):
        out = np.zeros(shape, dtype=complex)
        sl = tuple(slice(o - lo, o - lo + s) for o, lo, s in zip(self.offset, offset, self.shape))
        out[sl] = self.data
        return out

    def __add__(self, other):
        self._check_compatible(other)
        lo = np.minimum(self.offset, other.offset)
        hi = np.maximum(np.add(self.offset, self.shape), np.add(other.offset, other.shape))
        shape = tuple(hi - lo)
        data = self._embed(tuple(lo), shape) + other._embed(tuple(lo), shape)
        return TwistedSequence(data, tuple(lo), self.gamma, self.d)

    def __neg__(self):
        return TwistedSequence(-self.data, self.offset, self.gamma, self.d)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        return TwistedSequence(self.data * scalar, self.offset, self.gamma, self.d)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return twisted_conv(self, other)

    def star(self):
        return twisted_involution(self)

    def __repr__(self):
        return f"TwistedSequence(gamma={self.gamma}, d={self.d}, nnz={np.count_nonzero(self.data)})"


def _phase(gamma, p_coords, m_coords):
    """exp(-2 pi i gamma p.m) from per-axis coordinate arrays (broadcastable)."""
    s = sum(p * m for p, m in zip(p_coords, m_coords))
    return np.exp(-2j * np.pi * gamma * s)


def twisted_conv(a, b):
    """Twisted product ``a # b``."""
    a._check_compatible(b)
    d, gamma = a.d, a.gamma
    shape = tuple(sa + sb - 1 for sa, sb in zip(a.shape, b.shape))
    offset = tuple(oa + ob for oa, ob in zip(a.offset, b.offset))
    out = np.zeros(shape, dtype=complex)
    nd = 2 * d

    def axis_coords(seq, axis):
        c = seq.coords(axis)
        return c.reshape([-1 if i == axis else 1 for i in range(nd)])

    if np.count_nonzero(a.data) <= np.count_nonzero(b.data):
        # loop over a's entries (l, m); phase depends on b's first-half coords p
        p_coords = [axis_coords(b, i) for i in range(d)]
        for idx in zip(*np.nonzero(a.data)):
            lm = [i + o for i, o in zip(idx, a.offset)]
            ph = _phase(gamma, p_coords, lm[d:])
            sl = tuple(slice(i, i + s) for i, s in zip(idx, b.shape))
            out[sl] += a.data[idx] * ph * b.data
    else:
        # loop over b's entries (p, q); phase depends on a's second-half coords m
        m_coords = [axis_coords(a, d + i) for i in range(d)]
        for idx in zip(*np.nonzero(b.data)):
            pq = [i + o for i, o in zip(idx, b.offset)]
            ph = _phase(gamma, pq[:d], m_coords)
            sl = tuple(slice(i, i + s) for i, s in zip(idx, a.shape))
            out[sl] += b.data[idx] * ph * a.data
    return TwistedSequence(out, offset, gamma, d)


def twisted_involution(a):
    """``a*`` with ``(a*)_{jk} = conj(a_{-j,-k}) exp(-2 pi i gamma j.k)``."""
    d = a.d
    data = np.conj(a.data[(slice(None, None, -1),) * (2 * d)])
    offset = tuple(-(o + s - 1) for o, s in zip(a.offset, a.shape))
    grids = np.meshgrid(*[o + np.arange(s) for o, s in zip(offset, data.shape)], indexing="ij")
    data = data * _phase(a.gamma, grids[:d], grids[d:])
    return TwistedSequence(data, offset, a.gamma, d)


def is_hermitian(a, atol=1e-13):
    return (a - a.star()).l1_norm() <= atol * max(1.0, a.l1_norm())


class TruncatedOperator:
    """Finite section of ``L_a`` on the box ``[-R, R]^{2d}``.

    Row ``(j, k)``, column ``(p, q)`` holds
    ``a_{(j-p)(k-q)} exp(-2 pi i gamma p.(k-q))``.  Box indices are
    flattened in C order.
    """

    def __init__(self, radius, matrix, d, gamma):
        self.radius = radius
        self.matrix = matrix
        self.d = d
        self.gamma = gamma

    @property
    def side(self):
        return 2 * self.radius + 1

    @property
    def dim(self):
        return self.matrix.shape[0]

    def toarray(self):
        return self.matrix.toarray()

    def box_vector(self, seq):
        """Restrict `seq` to the box and flatten."""
        R, nd = self.radius, 2 * self.d
        full = seq._embed((-R,) * nd, (self.side,) * nd) if _fits(seq, R) else _clip(seq, R)
        return full.ravel()

    def apply(self, seq):
        out = self.matrix @ self.box_vector(seq)
        nd = 2 * self.d
        return TwistedSequence(out.reshape((self.side,) * nd), (-self.radius,) * nd, self.gamma, self.d)


def _fits(seq, R):
    return all(o >= -R and o + s - 1 <= R for o, s in zip(seq.offset, seq.shape))


def _clip(seq, R):
    nd = 2 * seq.d
    out = np.zeros((2 * R + 1,) * nd, dtype=complex)
    for key, v in seq.entries().items():
        if max(abs(i) for i in key) <= R:
            out[tuple(i + R for i in key)] = v
    return out


def truncate(a, R):
    """Finite section of ``L_a`` on ``[-R, R]^{2d}`` as a sparse matrix."""
    R = check_positive_int(R, "R")
    if a.support_radius() > R:
        warnings.warn(f"truncation radius {R} is smaller than the support radius {a.support_radius()}")
    d, nd = a.d, 2 * a.d
    side = 2 * R + 1
    box = np.stack(np.meshgrid(*[np.arange(-R, R + 1)] * nd, indexing="ij"), axis=-1).reshape(-1, nd)
    strides = side ** np.arange(nd - 1, -1, -1)
    rows, cols, vals = [], [], []
    col_idx = np.arange(box.shape[0])
    for uv, val in a.entries().items():
        tgt = box + np.asarray(uv)
        ok = np.all(np.abs(tgt) <= R, axis=1)
        # column (p, q) -> row (p+u, q+v); phase uses p and v = k - q
        ph = np.exp(-2j * np.pi * a.gamma * (box[ok, :d] @ np.asarray(uv[d:], dtype=float)))
        rows.append((tgt[ok] + R) @ strides)
        cols.append(col_idx[ok])
        vals.append(val * ph)
    if rows:
        mat = sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(box.shape[0],) * 2,
        )
    else:
        mat = sp.csr_matrix((box.shape[0],) * 2, dtype=complex)
    return TruncatedOperator(R, mat, d, a.gamma)


def lanczos_extremes(matvec, n, steps=200, seed=0):
    """Extreme Ritz values of a Hermitian operator after `steps` Lanczos steps.

    Full reorthogonalisation; the Ritz values lie inside the true spectral
    interval and converge to its edges even when the spectrum is continuous.
    """
    rng = np.random.default_rng(seed)
    steps = min(steps, n)
    Q = np.zeros((steps, n), dtype=complex)
    alpha = np.zeros(steps)
    beta = np.zeros(steps)
    q = rng.normal(size=n) + 1j * rng.normal(size=n)
    q /= np.linalg.norm(q)
    k = 0
    for k in range(steps):
        Q[k] = q
        w = matvec(q)
        alpha[k] = np.vdot(q, w).real
        w = w - Q[: k + 1].T @ (Q[: k + 1].conj() @ w)
        w = w - Q[: k + 1].T @ (Q[: k + 1].conj() @ w)
        nb = np.linalg.norm(w)
        if nb <= 1e-12 * max(1.0, abs(alpha[k])) or k == steps - 1:
            break
        beta[k] = nb
        q = w / nb
    m = k + 1
    ritz = scipy.linalg.eigvalsh_tridiagonal(alpha[:m], beta[: m - 1])
    return float(ritz[0]), float(ritz[-1])


def _refine_edge(A, estimate, width, side, steps=60):
    """Sharpen one spectral edge of sparse Hermitian `A` by shift-invert Lanczos.

    `side` is +1 for the bottom edge and -1 for the top.  The shift is
    placed just outside the Ritz estimate; if it turns out to lie inside
    the spectrum the shifted inverse has a negative extreme and the margin
    is widened.
    """
    n = A.shape[0]
    eye = sp.identity(n, dtype=complex, format="csc")
    margin = 1e-3 * width
    for _ in range(8):
        sigma = estimate - side * margin
        lu = splu((side * (A - sigma * eye)).tocsc())
        ilo, ihi = lanczos_extremes(lu.solve, n, steps=steps)
        if ilo > 0:
            return sigma + side / ihi
        margin *= 8
    return estimate


def _sparse_extremes(A):
    lo, hi = lanczos_extremes(A.dot, A.shape[0], steps=100)
    width = max(hi - lo, abs(hi), abs(lo), np.finfo(float).tiny)
    return _refine_edge(A, lo, width, +1), _refine_edge(A, hi, width, -1)


def hermitian_extremes(op):
    """Smallest and largest eigenvalue of a Hermitian finite section."""
    if op.dim <= DENSE_MAX:
        ev = np.linalg.eigvalsh(op.toarray())
        return float(ev[0]), float(ev[-1])
    return _sparse_extremes(op.matrix)


def singular_extremes(op):
    """Smallest and largest singular value of a finite section."""
    if op.dim <= DENSE_MAX:
        sv = np.linalg.svd(op.toarray(), compute_uv=False)
        return float(sv[-1]), float(sv[0])
    A = op.matrix
    lo, hi = _sparse_extremes((A.conj().T @ A).tocsr())
    return float(np.sqrt(max(lo, 0.0))), float(np.sqrt(max(hi, 0.0)))


def _radius_at(a, R, hermitian):
    op = truncate(a, R)
    if hermitian:
        lo, hi = hermitian_extremes(op)
        return max(abs(lo), abs(hi))
    return singular_extremes(op)[1]


def spectral_radius_l2(a, R=None, rtol=0.01, max_R=64):
    """Spectral radius estimate of ``L_a`` on l^2 from finite sections.

    Hermitian ``a``: largest eigenvalue modulus; otherwise largest singular
    value.  Finite sections approximate from below.  With ``R=None`` the
    box starts at four times the support radius and doubles until the
    estimate moves by less than `rtol` (or `max_R` is reached).
    """
    herm = is_hermitian(a)
    if R is not None:
        return _radius_at(a, check_positive_int(R, "R"), herm)
    R = max(2, 4 * a.support_radius())
    prev = _radius_at(a, R, herm)
    while 2 * R <= max_R:
        R *= 2
        cur = _radius_at(a, R, herm)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    return prev


def power_norms(a, n, prune=1e-15):
    """``log ||a^k||_1`` for k = 1..n (entries below ``prune * max`` dropped)."""
    logs = []
    power = a
    scale = 0.0
    for k in range(1, n + 1):
        if k > 1:
            power = twisted_conv(power, a)
        nrm = power.l1_norm()
        if nrm == 0:
            logs.extend([-np.inf] * (n - k + 1))
            break
        scale += math.log(nrm)
        logs.append(scale)
        power = (power * (1.0 / nrm)).pruned(prune * np.abs(power.data).max() / nrm)
    return np.asarray(logs)


def spectral_radius_l1(a, n=64):
    """``lim ||a^k||_1^{1/k}`` extrapolated from the log-norm slope over ``k in [n/2, n]``."""
    n = check_positive_int(n, "n")
    logs = power_norms(a, n)
    if not np.isfinite(logs[-1]):
        return 0.0
    h = max(1, n // 2)
    if h == n:
        return float(math.exp(logs[-1] / n))
    return float(math.exp((logs[n - 1] - logs[h - 1]) / (n - h)))


def wiener_invert(a, tol=1e-10, max_terms=5000, R=None, full_output=False):
    """Invert `a` in the l^1 twisted algebra by a preconditioned Neumann series.

    Forms the Hermitian ``b = a* # a``, estimates its spectral edges
    ``m, M`` on a finite section, sums ``b^{-1} = c sum_n (e - c b)^n``
    with ``c = 2/(m+M)``, and returns ``b^{-1} # a*``.
    """
    gamma, d = a.gamma, a.d
    e = TwistedSequence.identity(gamma, d)
    a_star = a.star()
    b = twisted_conv(a_star, a)
    R = max(4, 4 * b.support_radius()) if R is None else check_positive_int(R, "R")

    smin, _ = singular_extremes(truncate(a, R))
    if smin <= tol:
        raise SingularAtTruncationError(
            f"singular at this truncation (R={R}): smallest singular value {smin:.3g}"
        )
    lo, hi = hermitian_extremes(truncate(b, R))
    c = 2.0 / (lo + hi)
    x = (e - c * b).pruned(1e-16 * b.l1_norm())
    a1 = a.l1_norm()

    total = e
    term = e
    prev_norm = 1.0
    converged = False
    n = 0
    for n in range(1, max_terms + 1):
        term = twisted_conv(x, term)
        drop = 1e-6 * tol / max(term.data.size, 1)
        term = term.pruned(drop)
        total = total + term
        tn = term.l1_norm()
        if tn == 0:
            converged = True
            break
        q = tn / prev_norm
        prev_norm = tn
        if q < 1 and tn <= tol:
            tail = tn * q / (1 - q)
            if c * a1 * a1 * tail <= 0.5 * tol:
                converged = True
                break
    if not converged:
        raise InconclusiveError(
            f"Neumann series not converged after {max_terms} terms (last term l1 norm {prev_norm:.3g})"
        )
    b_inv = (total * c).trimmed()
    inv = twisted_conv(b_inv, a_star).trimmed()
    left = (twisted_conv(inv, a) - e).l1_norm()
    right = (twisted_conv(a, inv) - e).l1_norm()
    if max(left, right) > 10 * tol:
        raise InconclusiveError(f"residuals {left:.3g}, {right:.3g} exceed 10*tol")
    if full_output:
        info = {
            "terms": n,
            "radius": R,
            "lower": lo,
            "upper": hi,
            "scale": c,
            "smallest_singular": smin,
            "left_residual": left,
            "right_residual": right,
        }
        return inv, info
    return inv


def rep_pi(a, L, a_step, b_step, atol=1e-12):
    """``pi(a) = sum a_{jk} M_{j L/a_step} T_{k L/b_step}`` on C^L.

    The twist of `a` must equal ``L / (a_step b_step)`` mod 1, otherwise the
    map is not multiplicative.
    """
    if a.d != 1:
        raise ValueError("rep_pi is defined for d = 1")
    L = check_positive_int(L, "L")
    a_step = check_divisor(a_step, L, "a_step")
    b_step = check_divisor(b_step, L, "b_step")
    expected = L / (a_step * b_step)
    diff = (a.gamma - expected) % 1.0
    if min(diff, 1.0 - diff) > atol:
        raise ValueError(f"gamma={a.gamma} does not match L/(a_step*b_step)={expected} mod 1")
    ms, ts = L // a_step, L // b_step
    out = np.zeros((L, L), dtype=complex)
    for (j, k), v in a.entries().items():
        out += v * tf_shift_matrix(L, j * ms, k * ts)
    return out


def random_sequence(rng, gamma, radius=2, d=1, density=1.0):
    """Random sequence supported in ``[-radius, radius]^{2d}`` (testing helper)."""
    shape = (2 * radius + 1,) * (2 * d)
    data = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    if density < 1.0:
        data *= rng.random(shape) < density
    return TwistedSequence(data, (-radius,) * (2 * d), gamma, d).trimmed()


def parse_sequence(text, gamma):
    """Parse expressions like ``"e-0.5*d(1,0)+0.3j*d(0,1)"`` (d = 1 only)."""
    import re

    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty sequence expression")
    token = re.compile(
        r"([+-]?)(?:(\([^()]*\)|\d*\.?\d+(?:[eE][+-]?\d+)?j?)\*)?(e|d\((-?\d+),(-?\d+)\))"
    )
    pos = 0
    entries = {}
    while pos < len(s):
        m = token.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse sequence expression at {s[pos:]!r}")
        sign = -1.0 if m.group(1) == "-" else 1.0
        coef = complex(m.group(2).strip("()")) if m.group(2) else 1.0
        key = (0, 0) if m.group(3) == "e" else (int(m.group(4)), int(m.group(5)))
        entries[key] = entries.get(key, 0) + sign * coef
        pos = m.end()
    return TwistedSequence.from_dict(entries, gamma, d=1)


def box_indices(R, d=1):
    return list(itertools.product(range(-R, R + 1), repeat=2 * d))
