"""Named window generators on the cyclic group of order L.

All generators return unit-norm complex arrays unless ``normalize=False``.
"""

from __future__ import annotations

import numpy as np

from ._validation import check_positive, check_positive_int


def _unit(x, normalize):
    x = np.asarray(x, dtype=complex)
    if normalize:
        x = x / np.linalg.norm(x)
    return x


def delta(L, shift=0):
    L = check_positive_int(L, "L")
    x = np.zeros(L, dtype=complex)
    x[shift % L] = 1.0
    return x


def twopoint(L):
    """(delta_0 + delta_1) / sqrt(2)."""
    L = check_positive_int(L, "L")
    if L < 2:
        raise ValueError("twopoint window needs L >= 2")
    x = np.zeros(L, dtype=complex)
    x[:2] = 1.0
    return x / np.sqrt(2.0)


def box(L, n, normalize=True):
    L = check_positive_int(L, "L")
    n = check_positive_int(n, "n")
    if n > L:
        raise ValueError(f"box length {n} exceeds L={L}")
    x = np.zeros(L, dtype=complex)
    x[:n] = 1.0
    return _unit(x, normalize)


def gaussian(L, width=None, center=None, normalize=True):
    """Sampled Gaussian ``exp(-pi ((t - center) / width)**2)``.

    `width` defaults to ``sqrt(L)``, which balances time and frequency
    spread on Z_L; `center` defaults to ``L // 2``.
    """
    L = check_positive_int(L, "L")
    width = np.sqrt(L) if width is None else check_positive(width, "width")
    center = L // 2 if center is None else center
    t = np.arange(L)
    return _unit(np.exp(-np.pi * ((t - center) / width) ** 2), normalize)


def periodic_gaussian(L, width=None, center=0, normalize=True):
    """Gaussian periodized over Z_L (sum of the 5 nearest wraps)."""
    L = check_positive_int(L, "L")
    width = np.sqrt(L) if width is None else check_positive(width, "width")
    t = np.arange(L)
    x = sum(np.exp(-np.pi * ((t - center + k * L) / width) ** 2) for k in range(-2, 3))
    return _unit(x, normalize)


def make_window(desc, L):
    """Build a window from a descriptor string: ``delta``, ``twopoint``, ``box(n)``,
    ``gaussian`` or ``gaussian(width)``."""
    desc = desc.strip().lower()
    name, _, arg = desc.partition("(")
    arg = arg.rstrip(")").strip()
    if name == "delta":
        return delta(L)
    if name == "twopoint":
        return twopoint(L)
    if name == "box":
        if not arg:
            raise ValueError("box window needs a length, e.g. box(4)")
        return box(L, int(arg))
    if name == "gaussian":
        return gaussian(L, float(arg) if arg else None)
    raise ValueError(f"unknown window {desc!r}")


def window_family(L):
    """Built-in window family used by exhaustive lattice sweeps."""
    fam = {"delta": delta(L), "twopoint": twopoint(L), "gaussian": gaussian(L)}
    for n in (2, 3, 4):
        if n <= L:
            fam[f"box({n})"] = box(L, n)
    return fam


def read_window_file(path):
    """Read one complex sample per line written as ``re,im``."""
    vals = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 're,im'")
            vals.append(complex(float(parts[0]), float(parts[1])))
    if not vals:
        raise ValueError(f"{path}: no samples")
    return np.asarray(vals, dtype=complex)
