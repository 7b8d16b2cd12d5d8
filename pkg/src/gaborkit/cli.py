"""Command-line driver: one subcommand per operation, JSON reports.

Exit status: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time

import numpy as np

from . import density as dens
from . import gabor, heisenberg, modspace, tfcore, twisted, windows
from ._validation import InconclusiveError, NotAFrameError

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    return x


def write_atomic(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    write_atomic(path, buf.getvalue())


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _pair(text):
    vals = _floats(text)
    if len(vals) != 2:
        raise ValueError(f"expected two comma-separated numbers, got {text!r}")
    return tuple(vals)


# shared argument groups


def _add_window(p):
    p.add_argument("--window", default="gaussian", help="delta | twopoint | box(n) | gaussian[(width)]")
    p.add_argument("--window-file", help="one complex sample per line as 're,im'")


def _add_lattice(p, a=1, b=1):
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--a", type=int, default=a, help="time step (divides L)")
    p.add_argument("--b", type=int, default=b, help="frequency step (divides L)")
    _add_window(p)


def _window(args, L):
    if args.window_file:
        w = windows.read_window_file(args.window_file)
        if w.size != L:
            raise ValueError(f"window file has {w.size} samples, expected L={L}")
        return w
    return windows.make_window(args.window, L)


def _system(args):
    return gabor.build_system(_window(args, args.L), args.a, args.b)


def _random_signals(rng, n, L):
    return rng.normal(size=(n, L)) + 1j * rng.normal(size=(n, L))


# subcommands


def cmd_stft(args):
    L = args.L
    phi = _window(args, L)
    rng = np.random.default_rng(args.seed)
    f = _random_signals(rng, 1, L)[0]
    V = tfcore.stft(f, phi)
    energy = float(np.sum(np.abs(V) ** 2))
    expected = L * np.vdot(f, f).real * np.vdot(phi, phi).real
    rel = abs(energy - expected) / expected
    rt = float(np.max(np.abs(tfcore.istft(V, phi) - f)))
    if args.csv:
        _write_csv(args.csv, ["m", "n", "magnitude"], [(m, n, abs(V[m, n])) for m in range(L) for n in range(L)])
    return {
        "identity": "stft-isometry-inversion",
        "inputs": {"L": L, "window": args.window, "seed": args.seed},
        "outputs": {"energy": energy, "parseval_constant": expected, "parseval_rel_error": rel, "roundtrip_max_error": rt},
        "tolerances": {"parseval_rel": 1e-10, "roundtrip": 1e-12},
        "checks": {"parseval": rel <= 1e-10, "roundtrip": rt <= 1e-12},
    }


def cmd_frame_bounds(args):
    sys_ = _system(args)
    fb = gabor.frame_bounds(sys_)
    return {
        "identity": "frame-inequalities",
        "inputs": {"L": args.L, "a": args.a, "b": args.b, "window": args.window},
        "outputs": {
            "C1": fb.lower,
            "C2": fb.upper,
            "is_frame": fb.is_frame,
            "n_atoms": sys_.n_atoms,
            "redundancy": sys_.redundancy,
        },
        "tolerances": {"frame_rtol": gabor.FRAME_RTOL},
        "checks": {"bounds_ordered": fb.lower <= fb.upper},
    }


def cmd_dual_window(args):
    sys_ = _system(args)
    fb = gabor.frame_bounds(sys_)
    dual = gabor.dual_window(sys_, bounds=fb)
    dsys = sys_.with_window(dual)
    rng = np.random.default_rng(args.seed)
    errs = []
    for f in _random_signals(rng, args.trials, args.L):
        f1 = gabor.synthesis(sys_, gabor.analysis(dsys, f))
        f2 = gabor.synthesis(dsys, gabor.analysis(sys_, f))
        errs.append(max(np.linalg.norm(f - f1), np.linalg.norm(f - f2)) / np.linalg.norm(f))
    err = float(max(errs)) if errs else 0.0
    return {
        "identity": "dual-frame-expansion",
        "inputs": {"L": args.L, "a": args.a, "b": args.b, "window": args.window, "trials": args.trials, "seed": args.seed},
        "outputs": {"C1": fb.lower, "C2": fb.upper, "dual_window": dual, "max_rel_reconstruction_error": err},
        "tolerances": {"reconstruction": 1e-10},
        "checks": {"reconstruction": err <= 1e-10},
    }


def cmd_janssen(args):
    sys_ = _system(args)
    psi = windows.make_window(args.psi_window, args.L) if args.psi_window else None
    rep = gabor.janssen(sys_, psi)
    err = float(np.linalg.norm(rep.operator() - gabor.frame_operator(sys_, psi), 2))
    coeffs = [
        {"j": j, "k": k, "value": c}
        for (j, k), c in np.ndenumerate(rep.coefficients)
        if abs(c) > 1e-14
    ]
    return {
        "identity": "janssen-representation",
        "inputs": {"L": args.L, "a": args.a, "b": args.b, "window": args.window, "psi_window": args.psi_window},
        "outputs": {
            "modulation_step": rep.mod_step,
            "translation_step": rep.trans_step,
            "coefficients": coeffs,
            "operator_error": err,
        },
        "tolerances": {"operator": 1e-10},
        "checks": {"operator": err <= 1e-10},
    }


def cmd_trace_probe(args):
    sys_ = _system(args)
    psi = sys_.window / np.linalg.norm(sys_.window)
    res = gabor.density_trace_probe(psi, sys_, args.eps)
    fb = gabor.frame_bounds(sys_)
    target = sys_.density
    last = res[-1].value
    out = {
        "identity": "density-trace-probe",
        "inputs": {"L": args.L, "a": args.a, "b": args.b, "window": args.window, "eps": args.eps},
        "outputs": {
            "values": [{"eps": r.eps, "value": r.value, "analysis_norm": r.analysis_norm} for r in res],
            "density": target,
            "is_frame": fb.is_frame,
        },
        "tolerances": {"limit": 1e-6},
        "checks": {"bounds": all(r.lower_ok and r.upper_ok for r in res), "at_most_one": last <= 1 + 1e-12},
    }
    if fb.is_frame:
        out["checks"]["limit"] = abs(last - target) <= 1e-6
    return out


def cmd_twisted_invert(args):
    a = twisted.parse_sequence(args.seq, args.gamma)
    inv, info = twisted.wiener_invert(a, tol=args.tol, max_terms=args.max_terms, full_output=True)
    ok = max(info["left_residual"], info["right_residual"]) <= 10 * args.tol
    return {
        "identity": "wiener-inversion",
        "inputs": {"gamma": args.gamma, "seq": args.seq, "tol": args.tol, "max_terms": args.max_terms},
        "outputs": {
            "residual": max(info["left_residual"], info["right_residual"]),
            "inverse_l1_norm": inv.l1_norm(),
            "inverse_support_radius": inv.support_radius(),
            "inverse_nnz": int(np.count_nonzero(inv.data)),
            **info,
        },
        "tolerances": {"residual": 10 * args.tol},
        "checks": {"residual": ok},
    }


def cmd_spectral_radius(args):
    a = twisted.parse_sequence(args.seq, args.gamma)
    l2 = twisted.spectral_radius_l2(a, args.R)
    out = {"l2_radius": l2, "hermitian": twisted.is_hermitian(a)}
    checks = {}
    if out["hermitian"]:
        l1 = twisted.spectral_radius_l1(a, args.n)
        out["l1_radius"] = l1
        out["relative_gap"] = abs(l1 - l2) / l2 if l2 else 0.0
        checks["l1_l2_agree"] = out["relative_gap"] <= 0.05
    return {
        "identity": "spectral-radius",
        "inputs": {"gamma": args.gamma, "seq": args.seq, "R": args.R, "n": args.n},
        "outputs": out,
        "tolerances": {"l1_l2_relative": 0.05},
        "checks": checks,
    }


def cmd_density(args):
    if args.points:
        lam = dens.read_point_file(args.points, args.extent)
    else:
        u, v = args.lattice.split(";")
        lam = dens.lattice_points(_pair(u), _pair(v), args.extent)
    rep = dens.lower_density(lam, args.radii)
    if args.csv:
        _write_csv(args.csv, ["radius", "nu_minus", "estimate"], zip(rep.radii, rep.nu_minus, rep.estimates))
    out = {
        "radii": rep.radii,
        "nu_minus": rep.nu_minus,
        "estimates": rep.estimates,
        "density": rep.density,
        "tail_spread": rep.tail_spread,
        "n_points": len(lam),
    }
    checks = {"monotone_counts": bool(np.all(np.diff(rep.nu_minus) >= 0))}
    if args.lattice:
        u, v = args.lattice.split(";")
        cov = dens.lattice_covolume(_pair(u), _pair(v))
        out["covolume"] = cov
        out["frame_possible"] = cov <= 1.0
        checks["matches_covolume"] = abs(rep.density * cov - 1.0) <= 0.05
    return {
        "identity": "lower-beurling-density",
        "inputs": {"points": args.points, "lattice": args.lattice, "extent": args.extent, "radii": args.radii},
        "outputs": out,
        "tolerances": {"density_rel": 0.05},
        "checks": checks,
    }


def _hap_window(args, L):
    if args.window_file:
        return _window(args, L)
    name = args.window.strip().lower()
    if name.startswith("gaussian"):
        arg = name.partition("(")[2].rstrip(")")
        return windows.periodic_gaussian(L, float(arg) if arg else None)
    return windows.make_window(args.window, L)


def cmd_hap(args):
    L = args.L
    phi = _hap_window(args, L)
    atoms = dens.lattice_atoms(L, args.a, args.b)
    width = args.pulse_width or math.sqrt(L) / 2
    f = windows.periodic_gaussian(L, width)
    res = dens.hap_residual(atoms, phi, f, args.center, args.R)
    return {
        "identity": "homogeneous-approximation",
        "inputs": {"L": L, "a": args.a, "b": args.b, "window": args.window, "center": args.center, "R": args.R, "pulse_width": width},
        "outputs": {"residual": res, "signal_norm": float(np.linalg.norm(f))},
        "tolerances": {"relative_residual": 0.01},
        "checks": {"local_approximation": res < 0.01 * np.linalg.norm(f)},
    }


def cmd_rs_bounds(args):
    L = args.L
    phi = _hap_window(args, L)
    atoms = dens.lattice_atoms(L, args.a, args.b)
    rs = dens.rs_trace_bounds(atoms, phi, args.r, args.R_outer, args.center, L)
    lhs, rhs = rs.chain()
    return {
        "identity": "projection-trace-vs-rank",
        "inputs": {"L": L, "a": args.a, "b": args.b, "window": args.window, "r": args.r, "R": args.R_outer, "center": args.center},
        "outputs": {
            "trace_T": rs.trace_T,
            "card_lam": rs.card_lam,
            "card_grid": rs.card_grid,
            "epsilon_witness": rs.epsilon_witness,
            "eigenvalue_range": [float(rs.eigenvalues.min()), float(rs.eigenvalues.max())] if rs.eigenvalues.size else [],
            "chain_lhs": lhs,
            "chain_rhs": rhs,
        },
        "tolerances": {"eigenvalues": 1e-10, "trace": 1e-8},
        "checks": {"chain": rs.chain_holds(), "trace_le_rank": rs.trace_T <= rs.card_lam + 1e-8},
    }


def cmd_modnorm(args):
    L = args.L
    f = windows.make_window(args.signal, L)
    w = modspace.WeightSpec(args.weight, args.wa, args.wb)
    g = _window(args, L) if (args.window_file or args.window != "gaussian") else None
    val = modspace.m1v_norm(f, w, g)
    return {
        "identity": "modulation-space-norm",
        "inputs": {"L": L, "signal": args.signal, "weight": args.weight, "wa": args.wa, "wb": args.wb, "window": args.window},
        "outputs": {"norm": val},
        "tolerances": {},
        "checks": {"finite": math.isfinite(val)},
    }


def cmd_heisenberg_check(args):
    rng = np.random.default_rng(args.seed)
    L, a, b = args.L, args.a, args.b
    H = heisenberg.HeisenbergElement

    def rand_el(span=5):
        j, k, l = rng.integers(-span, span + 1, size=3)
        return H(j, k, l)

    assoc = inverse = central = True
    hom_err = 0.0
    for _ in range(args.pairs):
        x, y, z = rand_el(), rand_el(), rand_el()
        assoc &= (x * y) * z == x * (y * z)
        inverse &= x * x.inverse() == H.identity()
        central &= heisenberg.commutator(x, y).is_central()
        lhs = heisenberg.pi_rep(x * y, L, a, b)
        rhs = heisenberg.pi_rep(x, L, a, b) @ heisenberg.pi_rep(y, L, a, b)
        hom_err = max(hom_err, float(np.max(np.abs(lhs - rhs))))
    q = heisenberg.kernel_generator(L, a, b)
    ker_err = float(np.max(np.abs(heisenberg.pi_rep(H(0, 0, q), L, a, b) - np.eye(L))))
    return {
        "identity": "heisenberg-representation",
        "inputs": {"L": L, "a": a, "b": b, "pairs": args.pairs, "seed": args.seed},
        "outputs": {"homomorphism_error": hom_err, "kernel_q": q, "kernel_error": ker_err},
        "tolerances": {"homomorphism": 1e-12, "kernel": 1e-12},
        "checks": {
            "associativity": bool(assoc),
            "inverse": bool(inverse),
            "commutators_central": bool(central),
            "homomorphism": hom_err <= 1e-12,
            "kernel": ker_err <= 1e-12,
        },
    }


COMMANDS = {
    "stft": cmd_stft,
    "frame-bounds": cmd_frame_bounds,
    "dual-window": cmd_dual_window,
    "janssen": cmd_janssen,
    "trace-probe": cmd_trace_probe,
    "twisted-invert": cmd_twisted_invert,
    "spectral-radius": cmd_spectral_radius,
    "density": cmd_density,
    "hap": cmd_hap,
    "rs-bounds": cmd_rs_bounds,
    "modnorm": cmd_modnorm,
    "heisenberg-check": cmd_heisenberg_check,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="gaborkit", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here (default stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--no-timing", action="store_true", help="omit wall time from the report")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stft", parents=[common])
    p.add_argument("--L", type=int, required=True)
    _add_window(p)
    p.add_argument("--csv", help="write |V| as m,n,magnitude rows")

    p = sub.add_parser("frame-bounds", parents=[common])
    _add_lattice(p)

    p = sub.add_parser("dual-window", parents=[common])
    _add_lattice(p)
    p.add_argument("--trials", type=int, default=10)

    p = sub.add_parser("janssen", parents=[common])
    _add_lattice(p)
    p.add_argument("--psi-window", help="second window (defaults to the first)")

    p = sub.add_parser("trace-probe", parents=[common])
    _add_lattice(p)
    p.add_argument("--eps", type=_floats, default=[1.0, 1e-4, 1e-8])

    p = sub.add_parser("twisted-invert", parents=[common])
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--seq", required=True, help='e.g. "e-0.5*d(1,0)"')
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-terms", type=int, default=5000)

    p = sub.add_parser("spectral-radius", parents=[common])
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--seq", required=True)
    p.add_argument("--R", type=int, default=None)
    p.add_argument("--n", type=int, default=64)

    p = sub.add_parser("density", parents=[common])
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--points", help="file of 'omega,x' lines")
    src.add_argument("--lattice", help='generators "u1,u2;v1,v2"')
    p.add_argument("--extent", type=float, required=True)
    p.add_argument("--radii", type=_floats, required=True)
    p.add_argument("--csv", help="write radius,nu_minus,estimate rows")

    p = sub.add_parser("hap", parents=[common])
    _add_lattice(p)
    p.add_argument("--center", type=_pair, default=(0.0, 0.0))
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--pulse-width", type=float, default=None)

    p = sub.add_parser("rs-bounds", parents=[common])
    _add_lattice(p)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--R", dest="R_outer", type=float, required=True)
    p.add_argument("--center", type=_pair, default=(0.0, 0.0))

    p = sub.add_parser("modnorm", parents=[common])
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--signal", default="gaussian", help="signal generator, same vocabulary as --window")
    p.add_argument("--weight", default="constant", choices=modspace.KINDS)
    p.add_argument("--wa", type=float, default=1.0)
    p.add_argument("--wb", type=float, default=0.5)
    _add_window(p)

    p = sub.add_parser("heisenberg-check", parents=[common])
    p.add_argument("--L", type=int, default=12)
    p.add_argument("--a", type=int, default=3)
    p.add_argument("--b", type=int, default=2)
    p.add_argument("--pairs", type=int, default=50)
    return parser


def run(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    t0 = time.perf_counter()
    try:
        report = COMMANDS[args.command](args)
    except (NotAFrameError, InconclusiveError, twisted.SingularAtTruncationError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = {"command": args.command, **report}
    report["passed"] = all(report["checks"].values())
    if not args.no_timing:
        report["wall_time_s"] = time.perf_counter() - t0
    text = json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
