"""Row reduction kernels over prime fields.

Two implementations of the same Gauss-Jordan elimination mod p live here: a
numba ``@njit`` kernel and a pure-numpy one. ``USE_NUMBA`` picks the default;
set ``PTWIST_NUMBA=0`` in the environment to force the numpy path. Both
kernels use the same pivot rule (first nonzero entry, columns scanned left to
right) so their outputs are identical.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("PTWIST_NUMBA", "1").lower() not in (
    "0",
    "false",
    "no",
    "off",
)


def _inv_mod_py(a, p):
    return pow(int(a), -1, int(p))


def rref_modp_numpy(a: np.ndarray, p: int) -> np.ndarray:
    """Reduce ``a`` (int64, entries in [0, p)) in place; return pivot columns."""
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = _inv_mod_py(a[r, c], p)
        a[r, c:] = a[r, c:] * inv % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit, c:] = (a[hit, c:] - np.outer(col[hit], a[r, c:])) % p
        pivots.append(c)
        r += 1
    return np.asarray(pivots, dtype=np.int64)


if NUMBA_AVAILABLE:

    @njit(cache=True)
    def _inv_mod_nb(a, p):
        t, new_t = 0, 1
        r, new_r = p, a % p
        while new_r != 0:
            q = r // new_r
            t, new_t = new_t, t - q * new_t
            r, new_r = new_r, r - q * new_r
        if t < 0:
            t += p
        return t

    @njit(cache=True)
    def _rref_modp_nb(a, p):
        rows, cols = a.shape
        pivots = np.empty(min(rows, cols), dtype=np.int64)
        r = 0
        for c in range(cols):
            if r == rows:
                break
            piv = -1
            for i in range(r, rows):
                if a[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for j in range(cols):
                    tmp = a[r, j]
                    a[r, j] = a[piv, j]
                    a[piv, j] = tmp
            inv = _inv_mod_nb(a[r, c], p)
            for j in range(c, cols):
                a[r, j] = a[r, j] * inv % p
            for i in range(rows):
                if i != r:
                    f = a[i, c]
                    if f != 0:
                        for j in range(c, cols):
                            a[i, j] = (a[i, j] - f * a[r, j]) % p
            pivots[r] = c
            r += 1
        return pivots[:r]

    def rref_modp_numba(a: np.ndarray, p: int) -> np.ndarray:
        return _rref_modp_nb(a, np.int64(p))

else:  # pragma: no cover
    rref_modp_numba = rref_modp_numpy


def rref_modp(a: np.ndarray, p: int) -> np.ndarray:
    """Dispatch to the selected backend. ``a`` must be a writable int64 array."""
    if a.size == 0:
        return np.zeros(0, dtype=np.int64)
    if USE_NUMBA:
        return rref_modp_numba(a, p)
    return rref_modp_numpy(a, p)
