import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaborkit import gabor, tfcore, windows
from gaborkit._validation import NotAFrameError

from .conftest import random_signal, unit

ORTHO = dict(a=2, b=4)


def ortho_system():
    return gabor.build_system(windows.twopoint(8), **ORTHO)


def gauss_system(L=48, a=4, b=6):
    return gabor.build_system(windows.gaussian(L), a, b)


def oracle_frame_operator(sys, psi=None):
    """S_{psi,phi} from explicit atom columns."""
    A = gabor.atom_matrix(sys)
    B = A if psi is None else gabor.atom_matrix(sys.with_window(psi))
    return B @ A.conj().T


# construction


@pytest.mark.parametrize(
    "L,a,b,n_atoms,redundancy",
    [(8, 2, 4, 8, 1.0), (16, 4, 2, 32, 2.0), (8, 4, 4, 4, 0.5)],
)
def test_counts(L, a, b, n_atoms, redundancy):
    sys = gabor.build_system(windows.twopoint(L), a, b)
    assert sys.n_atoms == n_atoms
    assert sys.redundancy == redundancy
    assert sys.coef_shape == (L // b, L // a)


def test_rejects_non_divisor():
    with pytest.raises(ValueError, match="divide"):
        gabor.build_system(windows.gaussian(12), 5, 2)


def test_rejects_zero_window():
    with pytest.raises(ValueError, match="nonzero"):
        gabor.build_system(np.zeros(8), 2, 2)


# analysis / synthesis


def test_analysis_of_atom_is_indicator():
    sys = ortho_system()
    f = tfcore.tf_shift(sys.window, 1 * 4, 2 * 2)
    c = gabor.analysis(sys, f)
    expected = np.zeros(sys.coef_shape)
    expected[1, 2] = 1
    np.testing.assert_allclose(c, expected, atol=1e-14)


def test_analysis_of_zero():
    sys = gauss_system(16, 4, 2)
    np.testing.assert_array_equal(gabor.analysis(sys, np.zeros(16)), 0)


def test_analysis_matches_atoms(rng):
    sys = gauss_system(24, 4, 3)
    f = random_signal(rng, 24)
    A = gabor.atom_matrix(sys)
    np.testing.assert_allclose(gabor.analysis(sys, f).ravel(), A.conj().T @ f, atol=1e-12)


def test_analysis_energy_within_bounds(rng):
    sys = gauss_system(16, 4, 2)
    fb = gabor.frame_bounds(sys)
    for _ in range(20):
        f = random_signal(rng, 16)
        e = np.sum(np.abs(gabor.analysis(sys, f)) ** 2)
        n2 = np.linalg.norm(f) ** 2
        assert fb.lower * n2 * (1 - 1e-9) <= e <= fb.upper * n2 * (1 + 1e-9)


def test_synthesis_single_coefficient():
    sys = gauss_system(12, 3, 2)
    c = np.zeros(sys.coef_shape, complex)
    c[2, 1] = 1
    np.testing.assert_allclose(gabor.synthesis(sys, c), tfcore.tf_shift(sys.window, 2 * 2, 1 * 3), atol=1e-14)


def test_adjointness(rng):
    sys = gabor.build_system(unit(random_signal(rng, 12)), 3, 2)
    f = random_signal(rng, 12)
    c = random_signal(rng, sys.n_atoms).reshape(sys.coef_shape)
    lhs = np.vdot(c, gabor.analysis(sys, f))
    rhs = np.vdot(gabor.synthesis(sys, c), f)
    assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


def test_orthonormal_expansion(rng):
    sys = ortho_system()
    f = random_signal(rng, 8)
    np.testing.assert_allclose(gabor.synthesis(sys, gabor.analysis(sys, f)), f, atol=1e-13)


def test_synthesis_shape_mismatch():
    with pytest.raises(ValueError, match="shape"):
        gabor.synthesis(ortho_system(), np.zeros((3, 3)))


def test_analysis_length_mismatch():
    with pytest.raises(ValueError, match="length"):
        gabor.analysis(ortho_system(), np.zeros(9))


# frame operator


def test_frame_operator_orthonormal_identity():
    assert np.max(np.abs(gabor.frame_operator(ortho_system()) - np.eye(8))) <= 1e-12


@pytest.mark.parametrize("L,a,b", [(16, 4, 2), (24, 3, 4), (48, 4, 6), (12, 6, 2)])
def test_frame_operator_matches_atoms(rng, L, a, b):
    sys = gabor.build_system(random_signal(rng, L), a, b)
    psi = random_signal(rng, L)
    np.testing.assert_allclose(gabor.frame_operator(sys), oracle_frame_operator(sys), atol=1e-11)
    np.testing.assert_allclose(gabor.frame_operator(sys, psi), oracle_frame_operator(sys, psi), atol=1e-11)


def test_frame_operator_commutes_with_lattice_shifts():
    sys = gauss_system(24, 4, 3)
    S = gabor.frame_operator(sys)
    for m, n in [(1, 0), (0, 1), (2, 3)]:
        U = tfcore.tf_shift_matrix(24, m * 3, n * 4)
        assert np.linalg.norm(S @ U - U @ S, 2) <= 1e-12


def test_undersampled_rank():
    sys = gabor.build_system(windows.twopoint(8), 4, 4)
    assert np.linalg.matrix_rank(gabor.frame_operator(sys)) <= 4


def test_matrix_free_apply(rng):
    sys = gauss_system(24, 4, 3)
    f = random_signal(rng, 24)
    np.testing.assert_allclose(gabor.frame_operator_apply(sys) @ f, gabor.frame_operator(sys) @ f, atol=1e-12)


# frame bounds


def test_bounds_orthonormal():
    fb = gabor.frame_bounds(ortho_system())
    assert fb.lower == pytest.approx(1, abs=1e-12)
    assert fb.upper == pytest.approx(1, abs=1e-12)
    assert fb.is_frame


def test_bounds_undersampled():
    fb = gabor.frame_bounds(gabor.build_system(windows.twopoint(8), 4, 4))
    assert abs(fb.lower) <= 1e-10 * fb.upper
    assert not fb.is_frame
    assert fb.condition == np.inf


# frozen from eigvalsh(A A^*) over the explicit atom matrix
FROZEN_BOUNDS = {
    (16, 4, 2): (1.1715565478723786, 2.8495745548160807),
    (48, 4, 6): (1.4812412799096535, 2.5382984151508587),
    (48, 4, 8): (0.602904396366938, 2.4509954286108195),
    (48, 6, 6): (0.8708410666795738, 1.7678975237584842),
}


@pytest.mark.parametrize("key", sorted(FROZEN_BOUNDS))
def test_bounds_gaussian_frozen(key):
    sys = gauss_system(*key)
    A = gabor.atom_matrix(sys)
    ev = np.linalg.eigvalsh(A @ A.conj().T)
    fb = gabor.frame_bounds(sys)
    assert (fb.lower, fb.upper) == pytest.approx((ev[0], ev[-1]), rel=1e-12)
    assert (fb.lower, fb.upper) == pytest.approx(FROZEN_BOUNDS[key], rel=1e-10)


def test_spec_gaussian_formula():
    # exp(-pi ((t - 8) / 4)^2) on L = 16
    t = np.arange(16)
    phi = np.exp(-np.pi * ((t - 8) / 4) ** 2)
    np.testing.assert_allclose(unit(phi), windows.gaussian(16), atol=1e-15)
    assert gabor.frame_bounds(gabor.build_system(phi, 4, 2)).lower > 0


def test_bounds_iterative_branch(monkeypatch):
    sys = gauss_system(48, 4, 6)
    monkeypatch.setattr(gabor, "DENSE_EIG_MAX_L", 16)
    fb = gabor.frame_bounds(sys)
    assert (fb.lower, fb.upper) == pytest.approx(FROZEN_BOUNDS[(48, 4, 6)], rel=1e-8)


# dual window


def test_dual_orthonormal():
    sys = ortho_system()
    assert np.max(np.abs(gabor.dual_window(sys) - sys.window)) <= 1e-12


def test_dual_not_a_frame():
    with pytest.raises(NotAFrameError, match="not a frame: C1 = 0"):
        gabor.dual_window(gabor.build_system(windows.twopoint(8), 4, 4))


def test_dual_matches_dense_solve():
    sys = gauss_system()
    g = gabor.dual_window(sys)
    np.testing.assert_allclose(g, np.linalg.solve(oracle_frame_operator(sys), sys.window), atol=1e-12)


def test_dual_reconstruction(rng):
    sys = gauss_system()
    dsys = sys.with_window(gabor.dual_window(sys))
    for _ in range(5):
        f = random_signal(rng, 48)
        r1 = gabor.synthesis(sys, gabor.analysis(dsys, f))
        r2 = gabor.synthesis(dsys, gabor.analysis(sys, f))
        assert np.linalg.norm(r1 - f) <= 1e-10 * np.linalg.norm(f)
        assert np.linalg.norm(r2 - f) <= 1e-10 * np.linalg.norm(f)


def test_dual_frame_bounds_reciprocal():
    sys = gauss_system()
    fb = gabor.frame_bounds(sys)
    dfb = gabor.frame_bounds(sys.with_window(gabor.dual_window(sys)))
    assert dfb.lower == pytest.approx(1 / fb.upper, rel=1e-9)
    assert dfb.upper == pytest.approx(1 / fb.lower, rel=1e-9)


def test_dense_fallback(monkeypatch):
    sys = gauss_system()
    monkeypatch.setattr(gabor, "conjugate_gradient", lambda *a, **k: (None, False, 0))
    g = gabor.dual_window(sys)
    np.testing.assert_allclose(g, np.linalg.solve(oracle_frame_operator(sys), sys.window), atol=1e-12)


def test_cg_solves_spd(rng):
    M = rng.normal(size=(10, 10))
    A = M @ M.T + 10 * np.eye(10)
    rhs = rng.normal(size=10)
    x, ok, it = gabor.conjugate_gradient(lambda v: A @ v, rhs, tol=1e-13)
    assert ok and it <= 10 * 10
    np.testing.assert_allclose(A @ x, rhs, atol=1e-11)


# Janssen


def test_janssen_orthonormal_only_center():
    rep = gabor.janssen(ortho_system())
    expected = np.zeros_like(rep.coefficients)
    expected[0, 0] = 1
    np.testing.assert_allclose(rep.coefficients, expected, atol=1e-14)
    assert (rep.mod_step, rep.trans_step) == (4, 2)


@pytest.mark.parametrize("L,a,b", [(16, 4, 2), (48, 4, 6), (24, 6, 4), (12, 3, 3)])
def test_janssen_reconstructs(rng, L, a, b):
    sys = gabor.build_system(random_signal(rng, L), a, b)
    psi = random_signal(rng, L)
    for p in (None, psi):
        rep = gabor.janssen(sys, p)
        assert np.linalg.norm(rep.operator() - oracle_frame_operator(sys, p), 2) <= 1e-10


def test_janssen_orthogonal_windows_vanish():
    # delta_0 against delta_1 on a lattice whose adjoint translations are multiples of 4
    sys = gabor.build_system(windows.delta(8), 2, 2)
    psi = windows.delta(8, 1)
    rep = gabor.janssen(sys, psi)
    assert np.max(np.abs(rep.coefficients)) == 0
    assert np.max(np.abs(gabor.frame_operator(sys, psi))) == 0


# traces


def test_normalized_trace_orthonormal():
    assert gabor.normalized_trace(gabor.frame_operator(ortho_system())) == pytest.approx(1, abs=1e-14)


def test_normalized_trace_cross(rng):
    L, a, b = 12, 2, 3
    psi, phi = unit(random_signal(rng, L)), unit(random_signal(rng, L))
    sys = gabor.build_system(phi, a, b)
    # brute force: tr(sum_i g_i h_i^*) = sum_i <g_i, h_i>
    A = gabor.atom_matrix(sys)
    B = gabor.atom_matrix(sys.with_window(psi))
    brute = np.sum(np.conj(A) * B) / L
    tr = gabor.normalized_trace(gabor.frame_operator(sys, psi))
    assert abs(tr - brute) <= 1e-12
    assert abs(tr - 2 * np.vdot(phi, psi)) <= 1e-12


def test_normalized_trace_of_shift_is_zero():
    for m, n in [(1, 0), (0, 3), (2, 5)]:
        assert abs(gabor.normalized_trace(tfcore.tf_shift_matrix(8, m, n))) <= 1e-15


def test_normalized_trace_rejects_rectangular():
    with pytest.raises(ValueError, match="square"):
        gabor.normalized_trace(np.zeros((3, 4)))


# density trace probe


def test_probe_orthonormal_half():
    (r,) = gabor.density_trace_probe(windows.twopoint(8), ortho_system(), [1.0])
    assert r.value == pytest.approx(0.5, abs=1e-14)


def test_probe_gaussian_limit():
    sys = gauss_system()
    res = gabor.density_trace_probe(sys.window, sys, [1.0, 1e-4, 1e-8])
    assert abs(res[-1].value - 0.5) <= 1e-6
    vals = [r.value for r in res]
    assert vals == sorted(vals)
    assert all(r.value <= 1 for r in res)


def test_probe_rejects_nonpositive_eps():
    with pytest.raises(ValueError, match="eps"):
        gabor.density_trace_probe(windows.twopoint(8), ortho_system(), [0.0])


# properties


@st.composite
def systems(draw):
    L = draw(st.sampled_from([6, 8, 12, 16, 24]))
    divs = [d for d in range(1, L + 1) if L % d == 0]
    a, b = draw(st.sampled_from(divs)), draw(st.sampled_from(divs))
    r = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    return gabor.build_system(random_signal(r, L), a, b), r


@settings(max_examples=40, deadline=None)
@given(systems())
def test_frame_operator_hermitian_psd(s):
    sys, _ = s
    S = gabor.frame_operator(sys)
    assert np.max(np.abs(S - S.conj().T)) <= 1e-13 * max(1, np.abs(S).max())
    assert np.linalg.eigvalsh(S)[0] >= -1e-12 * np.abs(S).max()


@settings(max_examples=25, deadline=None)
@given(systems())
def test_operator_inequalities(s):
    sys, r = s
    S = gabor.frame_operator(sys)
    fb = gabor.frame_bounds(sys)
    F = r.normal(size=(200, sys.L)) + 1j * r.normal(size=(200, sys.L))
    q = np.einsum("ij,ij->i", np.conj(F), F @ S.T).real
    n2 = np.sum(np.abs(F) ** 2, axis=1)
    slack = 1e-9 * fb.upper * n2
    assert np.all(q >= fb.lower * n2 - slack)
    assert np.all(q <= fb.upper * n2 + slack)


@settings(max_examples=40, deadline=None)
@given(systems())
def test_janssen_property(s):
    sys, r = s
    psi = random_signal(r, sys.L)
    S = gabor.frame_operator(sys, psi)
    err = np.linalg.norm(gabor.janssen(sys, psi).operator() - S, 2)
    assert err <= 1e-10 * max(1, np.linalg.norm(S, 2))


@settings(max_examples=40, deadline=None)
@given(systems())
def test_trace_equals_redundancy_times_energy(s):
    sys, _ = s
    tr = gabor.normalized_trace(gabor.frame_operator(sys))
    expected = sys.redundancy * np.linalg.norm(sys.window) ** 2
    assert abs(tr - expected) <= 1e-12 * max(1, expected)


@settings(max_examples=25, deadline=None)
@given(systems())
def test_dual_double_expansion(s):
    sys, r = s
    fb = gabor.frame_bounds(sys)
    if not fb.is_frame or fb.condition > 1e6:
        return
    dsys = sys.with_window(gabor.dual_window(sys))
    f = random_signal(r, sys.L)
    for x, y in ((sys, dsys), (dsys, sys)):
        assert np.linalg.norm(gabor.synthesis(x, gabor.analysis(y, f)) - f) <= 1e-10 * np.linalg.norm(f)


@pytest.mark.parametrize("L", [8, 12, 16])
def test_undersampled_never_frame(L):
    divs = [d for d in range(1, L + 1) if L % d == 0]
    for name, phi in windows.window_family(L).items():
        for a in divs:
            for b in divs:
                if a * b > L:
                    assert not gabor.frame_bounds(gabor.build_system(phi, a, b)).is_frame, (name, a, b)
