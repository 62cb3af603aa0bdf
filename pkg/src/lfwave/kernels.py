"""Hot numeric loops, each with a numba path and a pure-numpy path.

The backend is chosen once at import time from ``LFWAVE_BACKEND``
(``numba`` or ``numpy``).  When unset, numba is used if it imports.
Both paths take and return the same arrays, so callers never branch.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def _select_backend() -> str:
    wanted = os.environ.get("LFWAVE_BACKEND", "").strip().lower()
    if wanted in ("", "auto"):
        return "numba" if HAVE_NUMBA else "numpy"
    if wanted not in ("numba", "numpy"):
        raise ValueError(f"LFWAVE_BACKEND must be 'numba' or 'numpy', got {wanted!r}")
    if wanted == "numba" and not HAVE_NUMBA:
        raise ImportError("LFWAVE_BACKEND=numba but numba is not importable")
    return wanted


BACKEND = _select_backend()

# numpy path: cap on the (cosets x points) exponent block held in memory
_CHUNK = 1 << 22


def roots_of_unity(p: int) -> np.ndarray:
    """exp(2*pi*i*k/p) for k = 0..p-1, with exact 1 at k = 0."""
    k = np.arange(p)
    roots = np.exp(2j * np.pi * k / p)
    roots[0] = 1.0
    if p == 2:
        roots[1] = -1.0
    return roots


# ---------------------------------------------------------------------------
# character sums:  out[j] = sum_c w[c] * omega^(<a_c, x_j> mod p)
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _character_sums_numba(weights, coset_digits, point_digits, roots):
    p = roots.shape[0]
    n_pts = point_digits.shape[0]
    n_cos = coset_digits.shape[0]
    width = coset_digits.shape[1]
    out = np.zeros(n_pts, dtype=np.complex128)
    for j in range(n_pts):
        acc_re = 0.0
        acc_im = 0.0
        for c in range(n_cos):
            e = 0
            for k in range(width):
                e += coset_digits[c, k] * point_digits[j, k]
            z = weights[c] * roots[e % p]
            acc_re += z.real
            acc_im += z.imag
        out[j] = complex(acc_re, acc_im)
    return out


def _character_sums_numpy(weights, coset_digits, point_digits, roots):
    p = roots.shape[0]
    n_pts = point_digits.shape[0]
    n_cos = coset_digits.shape[0]
    out = np.zeros(n_pts, dtype=np.complex128)
    if n_cos == 0 or n_pts == 0:
        return out
    step = max(1, _CHUNK // max(n_cos, 1))
    a = coset_digits.astype(np.int64)
    for start in range(0, n_pts, step):
        x = point_digits[start:start + step].astype(np.int64)
        expo = (a @ x.T) % p
        out[start:start + step] = weights @ roots[expo]
    return out


def character_sums(weights, coset_digits, point_digits, p, backend=None):
    """Sum ``w_c * (chi_c, x_j)`` over cosets for every point.

    ``coset_digits`` and ``point_digits`` are integer arrays of GF(p)
    digits laid out over the same block-index window; the pairing
    exponent is formed in exact integer arithmetic before the root of
    unity is looked up.
    """
    weights = np.ascontiguousarray(weights, dtype=np.complex128)
    coset_digits = np.ascontiguousarray(coset_digits, dtype=np.int64)
    point_digits = np.ascontiguousarray(point_digits, dtype=np.int64)
    if coset_digits.ndim != 2 or point_digits.ndim != 2:
        raise ValueError("digit arrays must be 2-D")
    if coset_digits.shape[1] != point_digits.shape[1]:
        raise ValueError("coset and point digit windows differ in width")
    roots = roots_of_unity(p)
    if (backend or BACKEND) == "numba":
        return _character_sums_numba(weights, coset_digits, point_digits, roots)
    return _character_sums_numpy(weights, coset_digits, point_digits, roots)


# ---------------------------------------------------------------------------
# sliding-window products:  out[i] = prod_n table[code(strings[i, n:n+w])]
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _window_products_numba(strings, table, q, window, n_factors):
    n_rows = strings.shape[0]
    width = strings.shape[1]
    out = np.empty(n_rows, dtype=np.complex128)
    for i in range(n_rows):
        acc = complex(1.0, 0.0)
        for n in range(n_factors):
            code = 0
            scale = 1
            for j in range(window):
                col = n + j
                if col < width:
                    code += strings[i, col] * scale
                scale *= q
            acc *= table[code]
            if acc == 0:
                break
        out[i] = acc
    return out


def _window_products_numpy(strings, table, q, window, n_factors):
    n_rows, width = strings.shape
    padded = np.zeros((n_rows, max(width, n_factors + window - 1)), dtype=np.int64)
    padded[:, :width] = strings
    scales = q ** np.arange(window, dtype=np.int64)
    out = np.ones(n_rows, dtype=np.complex128)
    for n in range(n_factors):
        codes = padded[:, n:n + window] @ scales
        out *= table[codes]
    return out


def window_products(strings, table, q, window, n_factors, backend=None):
    """Product of table lookups over ``n_factors`` sliding windows.

    Row ``i`` of ``strings`` holds block codes in ascending index order;
    window ``n`` covers columns ``n .. n + window - 1`` (columns past
    the end read as zero) and is encoded little-endian in base ``q``.
    """
    strings = np.ascontiguousarray(strings, dtype=np.int64)
    table = np.ascontiguousarray(table, dtype=np.complex128)
    if strings.ndim != 2:
        raise ValueError("strings must be 2-D")
    if table.shape[0] != q ** window:
        raise ValueError("table size must be q**window")
    if (backend or BACKEND) == "numba":
        return _window_products_numba(strings, table, q, window, n_factors)
    return _window_products_numpy(strings, table, q, window, n_factors)
