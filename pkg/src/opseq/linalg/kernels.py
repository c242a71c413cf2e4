"""Row-reduction kernels over small prime fields.

Two interchangeable implementations of the same elimination:

* ``rref_modp_numba``: an ``@njit`` scalar loop,
* ``rref_modp_numpy``: a pure numpy path with vectorised row updates.

``rref_modp`` dispatches to numba unless ``OPSEQ_NUMBA=0`` is set in the
environment (or numba cannot be imported).  Both return identical results;
``benchmarks/bench_kernels.py`` compares their speed.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba as nb
except ImportError:  # pragma: no cover - numba is a declared dependency
    nb = None

USE_NUMBA = nb is not None and os.environ.get("OPSEQ_NUMBA", "1") not in ("0", "false", "no")


def _inv_mod(a: int, p: int) -> int:
    return pow(int(a), -1, p)


def rref_modp_numpy(a: np.ndarray, p: int):
    """Reduced row echelon form of ``a`` over F_p with the transform.

    Returns ``(R, T, pivots)`` with ``T @ a == R (mod p)``.  Pivots are found
    by scanning columns left to right and taking the topmost usable row.
    """
    m, n = a.shape
    R = np.array(a, dtype=np.int64) % p
    T = np.eye(m, dtype=np.int64)
    pivots = []
    row = 0
    for col in range(n):
        if row == m:
            break
        nz = np.nonzero(R[row:, col])[0]
        if nz.size == 0:
            continue
        r = row + int(nz[0])
        if r != row:
            R[[row, r]] = R[[r, row]]
            T[[row, r]] = T[[r, row]]
        inv = _inv_mod(R[row, col], p)
        R[row] = (R[row] * inv) % p
        T[row] = (T[row] * inv) % p
        f = R[:, col].copy()
        f[row] = 0
        rows = np.nonzero(f)[0]
        if rows.size:
            R[rows] = (R[rows] - np.outer(f[rows], R[row])) % p
            T[rows] = (T[rows] - np.outer(f[rows], T[row])) % p
        pivots.append(col)
        row += 1
    return R, T, np.array(pivots, dtype=np.int64)


if nb is not None:

    @nb.njit(cache=True)
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

    @nb.njit(cache=True)
    def _rref_modp_nb(a, p):
        m, n = a.shape
        R = a.copy()
        for i in range(m):
            for k in range(n):
                R[i, k] %= p
        T = np.zeros((m, m), dtype=np.int64)
        for i in range(m):
            T[i, i] = 1
        pivots = np.empty(min(m, n), dtype=np.int64)
        npiv = 0
        row = 0
        for col in range(n):
            if row == m:
                break
            r = -1
            for i in range(row, m):
                if R[i, col] != 0:
                    r = i
                    break
            if r < 0:
                continue
            if r != row:
                for k in range(n):
                    R[row, k], R[r, k] = R[r, k], R[row, k]
                for k in range(m):
                    T[row, k], T[r, k] = T[r, k], T[row, k]
            inv = _inv_mod_nb(R[row, col], p)
            for k in range(n):
                R[row, k] = (R[row, k] * inv) % p
            for k in range(m):
                T[row, k] = (T[row, k] * inv) % p
            for i in range(m):
                if i == row:
                    continue
                f = R[i, col]
                if f == 0:
                    continue
                for k in range(n):
                    R[i, k] = (R[i, k] - f * R[row, k]) % p
                for k in range(m):
                    T[i, k] = (T[i, k] - f * T[row, k]) % p
            pivots[npiv] = col
            npiv += 1
            row += 1
        return R, T, pivots[:npiv]

    def rref_modp_numba(a: np.ndarray, p: int):
        return _rref_modp_nb(np.ascontiguousarray(a, dtype=np.int64), np.int64(p))

else:  # pragma: no cover
    rref_modp_numba = None


def rref_modp(a: np.ndarray, p: int):
    if USE_NUMBA:
        return rref_modp_numba(a, p)
    return rref_modp_numpy(a, p)
