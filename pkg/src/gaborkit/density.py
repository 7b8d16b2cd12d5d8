"""Beurling lower density, lattice covolume, and finite approximation probes.

Time-frequency coordinates on C^L are measured in units of ``sqrt(L)``
samples/bins: the atom ``M_m T_n phi`` sits at ``(omega, x) = (m, n) / sqrt(L)``
on a torus of side ``sqrt(L)``.  In these units the unit lattice Z^2 with
the normalised indicator of ``sqrt(L)`` samples is an orthonormal basis,
and a Gabor lattice with steps (a, b) has cell area ``a b / L``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ._validation import check_positive, check_signal
from .tfcore import tf_shift, tf_shift_matrix

RANK_RTOL = 1e-12
EXTENT_TOL = 1e-9


def ball_volume(r, d=1):
    """Volume of a ball of radius r in R^{2d}: ``pi^d r^{2d} / d!``."""
    return math.pi**d * r ** (2 * d) / math.factorial(d)


@dataclass(frozen=True, eq=False)
class PointSet:
    """Finite window onto a discrete set in the (omega, x) plane.

    The set is fully specified inside the box ``max(|omega|, |x|) <= extent``.
    """

    points: np.ndarray
    extent: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if pts.size and np.max(np.abs(pts)) > self.extent + EXTENT_TOL:
            raise ValueError("points lie outside the declared extent")
        if len(np.unique(pts, axis=0)) != len(pts):
            raise ValueError("points must be distinct")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def scaled(self, s):
        return PointSet(self.points * s, self.extent * s)


def lattice_points(u, v, extent, origin=(0.0, 0.0)):
    """Points ``origin + i u + j v`` inside the box of half-side `extent`."""
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    B = np.column_stack([u, v])
    corners = np.array([[s1 * extent, s2 * extent] for s1 in (-1, 1) for s2 in (-1, 1)])
    coef = np.linalg.solve(B, (corners - origin).T)
    lo = np.floor(coef.min(axis=1)).astype(int) - 1
    hi = np.ceil(coef.max(axis=1)).astype(int) + 1
    I, J = np.meshgrid(np.arange(lo[0], hi[0] + 1), np.arange(lo[1], hi[1] + 1), indexing="ij")
    pts = np.asarray(origin) + I.ravel()[:, None] * u + J.ravel()[:, None] * v
    keep = np.max(np.abs(pts), axis=1) <= extent + EXTENT_TOL
    return PointSet(pts[keep], extent)


def read_point_file(path, extent):
    """Read ``omega,x`` pairs, one per line."""
    pts = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'omega,x'")
            pts.append((float(parts[0]), float(parts[1])))
    return PointSet(np.asarray(pts).reshape(-1, 2), extent)


@dataclass(frozen=True)
class DensityReport:
    radii: np.ndarray
    nu_minus: np.ndarray
    estimates: np.ndarray
    density: float
    tail_spread: float


def default_centers(extent, r_max, n=21):
    half = extent - r_max
    if half < 0:
        raise ValueError(f"largest radius {r_max} exceeds the declared extent {extent}")
    g = np.linspace(-half, half, n)
    return np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)


def lower_density(lam, radii, centers=None):
    """Estimate ``D^-`` from minimal ball counts ``nu^-(r)`` over a center grid.

    Ball volume is ``pi r^2``.  The reported density is the estimate at the
    largest radius; `tail_spread` is the range of estimates over the upper
    half of the radii.
    """
    radii = np.asarray(sorted(check_positive(r, "radius") for r in radii))
    r_max = radii[-1]
    if centers is None:
        centers = default_centers(lam.extent, r_max)
    else:
        centers = np.asarray(centers, float).reshape(-1, 2)
        if np.max(np.abs(centers)) + r_max > lam.extent + 1e-12:
            raise ValueError("balls around the centers leave the declared extent")
    if len(lam) == 0:
        nu = np.zeros(radii.size)
    else:
        tree = cKDTree(lam.points)
        nu = np.array(
            [np.min(tree.query_ball_point(centers, r, return_length=True)) for r in radii], dtype=float
        )
    est = nu / np.array([ball_volume(r) for r in radii])
    tail = est[radii.size // 2 :]
    return DensityReport(radii, nu, est, float(est[-1]), float(tail.max() - tail.min()))


def lattice_covolume(u, v):
    """``|det [u v]|``; raises for (near) dependent generators."""
    det = abs(float(np.linalg.det(np.column_stack([np.asarray(u, float), np.asarray(v, float)]))))
    scale = max(np.linalg.norm(u) * np.linalg.norm(v), 1e-300)
    if det <= 1e-12 * scale:
        raise ValueError("generators are linearly dependent")
    return det


def frame_possible(u, v):
    return lattice_covolume(u, v) <= 1.0


# finite time-frequency plane


def tf_side(L):
    return math.sqrt(L)


def lattice_atoms(L, a, b):
    """Coordinates of the atoms ``M_{m b} T_{n a}`` in sqrt(L) units."""
    s = tf_side(L)
    m, n = np.meshgrid(np.arange(L // b) * b, np.arange(L // a) * a, indexing="ij")
    return np.column_stack([m.ravel(), n.ravel()]) / s


def to_indices(coords, L):
    """Nearest grid indices ``(m, n)`` of (omega, x) coordinates."""
    s = tf_side(L)
    return np.rint(np.asarray(coords, float).reshape(-1, 2) * s).astype(int) % L


def torus_distance(coords, center, L):
    s = tf_side(L)
    diff = np.asarray(coords, float).reshape(-1, 2) - np.asarray(center, float)
    diff = (diff + s / 2) % s - s / 2
    return np.hypot(diff[:, 0], diff[:, 1])


def _atoms_in_ball(coords, phi, center, radius, L):
    coords = np.asarray(coords, float).reshape(-1, 2)
    if coords.size == 0:
        return np.zeros((L, 0), dtype=complex), 0
    inside = torus_distance(coords, center, L) <= radius + 1e-12
    idx = np.unique(to_indices(coords[inside], L), axis=0)
    if idx.size == 0:
        return np.zeros((L, 0), dtype=complex), 0
    cols = [tf_shift_matrix(L, m, n) @ phi for m, n in idx]
    return np.stack(cols, axis=1), len(idx)


def _orthonormal_basis(A):
    if A.shape[1] == 0:
        return A
    U, sv, _ = np.linalg.svd(A, full_matrices=False)
    rank = int(np.sum(sv > RANK_RTOL * sv[0])) if sv.size and sv[0] > 0 else 0
    return U[:, :rank]


def hap_residual(atoms, phi, f, center, R):
    """Distance from ``M_eta T_a f`` to the span of the atoms within ``R`` of the center.

    `atoms` are (omega, x) coordinates; `center` is ``(eta, a)`` in the same
    units.  An empty ball gives ``||f||``.
    """
    f = check_signal(f, "f")
    L = f.size
    phi = check_signal(phi, "phi", length=L)
    m0, n0 = to_indices(center, L)[0]
    target = tf_shift(f, m0, n0)
    A, count = _atoms_in_ball(atoms, phi, center, R, L)
    if count == 0:
        return float(np.linalg.norm(f))
    U = _orthonormal_basis(A)
    return float(np.linalg.norm(target - U @ (U.conj().T @ target)))


def unit_cube_window(L):
    """Normalised indicator of ``sqrt(L)`` samples (requires L a perfect square)."""
    s = math.isqrt(L)
    if s * s != L:
        raise ValueError(f"L={L} must be a perfect square")
    chi = np.zeros(L, dtype=complex)
    chi[:s] = 1.0 / math.sqrt(s)
    return chi


@dataclass(frozen=True)
class RSBounds:
    trace_T: float
    card_lam: int
    card_grid: int
    epsilon_witness: float
    eigenvalues: np.ndarray
    r: float
    R: float

    def chain(self):
        """Both sides of ``(1-eps) #grid / v(r) <= (#lam / v(r+R)) (v(r+R) / v(r))``."""
        lhs = (1 - self.epsilon_witness) * self.card_grid / ball_volume(self.r)
        rhs = self.card_lam / ball_volume(self.r + self.R) * (ball_volume(self.r + self.R) / ball_volume(self.r))
        return lhs, rhs

    def chain_holds(self, atol=1e-8):
        lhs, rhs = self.chain()
        return lhs <= rhs + atol


def rs_trace_bounds(lam_atoms, phi, r, R, center, L):
    """Compare the projection trace against the count of nearby atoms.

    ``V`` is spanned by the unit-cube atoms on Z^2 within `r` of `center`,
    ``W`` by the atoms of `lam_atoms` (window `phi`) within ``r + R``, and
    ``T = P_V P_W`` restricted to ``V``.
    """
    chi = unit_cube_window(L)
    s = math.isqrt(L)
    r = check_positive(r, "r")
    if R < 0:
        raise ValueError("R must be nonnegative")
    if 2 * r >= s:
        raise ValueError(f"ball of radius {r} exceeds the unaliased extent of the side-{s} torus")
    phi = check_signal(phi, "phi", length=L)

    jj, kk = np.meshgrid(np.arange(s), np.arange(s), indexing="ij")
    grid = np.column_stack([jj.ravel(), kk.ravel()]).astype(float)
    gsel = grid[torus_distance(grid, center, L) <= r + 1e-12]
    E = np.stack([tf_shift_matrix(L, int(j) * s, int(k) * s) @ chi for j, k in gsel], axis=1) if len(gsel) else np.zeros((L, 0))
    A, card_lam = _atoms_in_ball(lam_atoms, phi, center, r + R, L)
    U = _orthonormal_basis(A)
    proj = U.conj().T @ E
    T = proj.conj().T @ proj
    ev = np.linalg.eigvalsh(T) if T.size else np.zeros(0)
    trace_T = float(np.trace(T).real) if T.size else 0.0
    if ev.size and (ev[0] < -1e-10 or ev[-1] > 1 + 1e-10):
        raise ArithmeticError(f"eigenvalues of T outside [0, 1]: [{ev[0]}, {ev[-1]}]")
    if trace_T > card_lam + 1e-8:
        raise ArithmeticError(f"trace {trace_T} exceeds atom count {card_lam}")
    card_grid = len(gsel)
    eps = 1.0 - trace_T / card_grid if card_grid else 0.0
    return RSBounds(trace_T, card_lam, card_grid, eps, ev, r, R)
