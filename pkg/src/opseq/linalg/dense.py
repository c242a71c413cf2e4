"""Dense exact linear algebra: echelon forms, kernels, solving, Smith form."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .kernels import rref_modp
from .rings import Ring


class NoSolution(ValueError):
    """Raised when a linear system ``m x = b`` has no solution over the ring."""


def _rows(a: np.ndarray):
    return [list(r) for r in a.tolist()] if a.size else [[] for _ in range(a.shape[0])]


def _rref_python(m: np.ndarray, ring: Ring):
    """Gauss-Jordan over Q or a large prime field, on Python lists."""
    nr, nc = m.shape
    R = _rows(m)
    T = _rows(ring.eye(nr))
    p = ring.p
    pivots = []
    row = 0
    for col in range(nc):
        if row == nr:
            break
        r = next((i for i in range(row, nr) if R[i][col] != 0), None)
        if r is None:
            continue
        R[row], R[r] = R[r], R[row]
        T[row], T[r] = T[r], T[row]
        inv = ring.inv(R[row][col])
        if p:
            R[row] = [(x * inv) % p for x in R[row]]
            T[row] = [(x * inv) % p for x in T[row]]
        else:
            R[row] = [x * inv for x in R[row]]
            T[row] = [x * inv for x in T[row]]
        for i in range(nr):
            f = R[i][col]
            if i == row or f == 0:
                continue
            if p:
                R[i] = [(x - f * y) % p for x, y in zip(R[i], R[row])]
                T[i] = [(x - f * y) % p for x, y in zip(T[i], T[row])]
            else:
                R[i] = [x - f * y for x, y in zip(R[i], R[row])]
                T[i] = [x - f * y for x, y in zip(T[i], T[row])]
        pivots.append(col)
        row += 1
    Ra = ring.array(R, shape=(nr, nc)) if nr else ring.zeros((0, nc))
    Ta = ring.array(T, shape=(nr, nr)) if nr else ring.zeros((0, 0))
    return Ra, Ta, pivots


def rref(m: np.ndarray, ring: Ring):
    """Reduced row echelon form over a field.

    Returns ``(reduced, pivots, basis_change)`` with
    ``basis_change @ m == reduced``.
    """
    if not ring.is_field:
        raise TypeError("rref needs a field; use snf over the integers")
    m = np.asarray(m)
    if m.ndim != 2:
        raise ValueError("rref expects a matrix")
    if ring.machine:
        if m.shape[0] == 0 or m.shape[1] == 0:
            return ring.zeros(m.shape), [], ring.eye(m.shape[0])
        R, T, piv = rref_modp(m, ring.p)
        return R, [int(x) for x in piv], T
    R, T, piv = _rref_python(m, ring)
    return R, piv, T


# ---------------------------------------------------------------------------
# Smith normal form over Z


def snf_full(m: np.ndarray):
    """Smith form with both transforms and their inverses.

    Returns ``(U, D, V, Uinv, Vinv, diag)`` where ``U @ m @ V == D`` and
    ``diag`` lists the nonzero diagonal entries d_1 | d_2 | ...
    """
    nr, nc = m.shape
    D = [[int(x) for x in row] for row in np.asarray(m).tolist()] if nr and nc else [[0] * nc for _ in range(nr)]
    U = [[int(i == j) for j in range(nr)] for i in range(nr)]
    Ui = [[int(i == j) for j in range(nr)] for i in range(nr)]
    V = [[int(i == j) for j in range(nc)] for i in range(nc)]
    Vi = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def row_add(dst, src, c):  # row_dst += c * row_src
        if c == 0:
            return
        D[dst] = [x + c * y for x, y in zip(D[dst], D[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]
        for r in Ui:
            r[src] -= c * r[dst]

    def row_swap(a, b):
        if a == b:
            return
        D[a], D[b] = D[b], D[a]
        U[a], U[b] = U[b], U[a]
        for r in Ui:
            r[a], r[b] = r[b], r[a]

    def row_neg(a):
        D[a] = [-x for x in D[a]]
        U[a] = [-x for x in U[a]]
        for r in Ui:
            r[a] = -r[a]

    def col_add(dst, src, c):  # col_dst += c * col_src
        if c == 0:
            return
        for r in D:
            r[dst] += c * r[src]
        for r in V:
            r[dst] += c * r[src]
        Vi[src] = [x - c * y for x, y in zip(Vi[src], Vi[dst])]

    def col_swap(a, b):
        if a == b:
            return
        for r in D:
            r[a], r[b] = r[b], r[a]
        for r in V:
            r[a], r[b] = r[b], r[a]
        Vi[a], Vi[b] = Vi[b], Vi[a]

    def nearest_quotient(a, b):
        q, r = divmod(a, b)
        # divmod leaves r with the sign of b; step once more if that halves |r|
        if 2 * abs(r) > abs(b):
            q += 1
        return q

    diag = []
    t = 0
    while t < min(nr, nc):
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                x = D[i][j]
                if x != 0 and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, bi, bj = best
        row_swap(t, bi)
        col_swap(t, bj)
        while True:
            piv = D[t][t]
            clean = True
            for i in range(t + 1, nr):
                if D[i][t]:
                    row_add(i, t, -nearest_quotient(D[i][t], piv))
                    clean = clean and D[i][t] == 0
            for j in range(t + 1, nc):
                if D[t][j]:
                    col_add(j, t, -nearest_quotient(D[t][j], piv))
                    clean = clean and D[t][j] == 0
            if not clean:
                best = None
                for i in range(t, nr):
                    x = D[i][t]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, "r")
                for j in range(t + 1, nc):
                    x = D[t][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), j, "c")
                if best[2] == "r":
                    row_swap(t, best[1])
                else:
                    col_swap(t, best[1])
                continue
            bad = None
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if D[i][j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(t, bad, 1)
        if D[t][t] < 0:
            row_neg(t)
        diag.append(D[t][t])
        t += 1

    def arr(rows, r, c):
        a = np.empty((r, c), dtype=object)
        for i in range(r):
            for j in range(c):
                a[i, j] = rows[i][j]
        return a

    return (arr(U, nr, nr), arr(D, nr, nc), arr(V, nc, nc), arr(Ui, nr, nr), arr(Vi, nc, nc), diag)


def snf(m: np.ndarray):
    """Smith normal form ``U @ m @ V == D`` of an integer matrix."""
    U, D, V, _, _, _ = snf_full(m)
    return U, D, V


# ---------------------------------------------------------------------------
# Factorisations reused for many right-hand sides


class Solver:
    """Factor ``m`` once; solve ``m x = b`` and read off kernel/image."""

    def __init__(self, m: np.ndarray, ring: Ring):
        self.ring = ring
        self.m = m
        self.shape = m.shape
        nr, nc = m.shape
        if ring.is_field:
            self.R, self.pivots, self.T = rref(m, ring)
            self.rank = len(self.pivots)
        else:
            self.U, self.D, self.V, self.Uinv, self.Vinv, self.diag = snf_full(m)
            self.rank = len(self.diag)

    def solve(self, b: np.ndarray) -> np.ndarray:
        """One solution of ``m x = b`` (b a vector or a matrix of columns)."""
        ring = self.ring
        vec = b.ndim == 1
        B = b.reshape(-1, 1) if vec else b
        nr, nc = self.shape
        if B.shape[0] != nr:
            raise ValueError(f"right-hand side has {B.shape[0]} rows, expected {nr}")
        k = B.shape[1]
        if ring.is_field:
            Y = ring.matmul(self.T, B) if nr else ring.zeros((0, k))
            if not ring.is_zero(Y[self.rank:]):
                raise NoSolution("right-hand side not in the column span")
            X = ring.zeros((nc, k))
            for r, c in enumerate(self.pivots):
                X[c] = Y[r]
        else:
            Y = self.U @ B if nr else ring.zeros((0, k))
            Z = ring.zeros((nc, k))
            for r in range(nr):
                row = Y[r]
                if r < self.rank:
                    d = self.diag[r]
                    if any(x % d for x in row):
                        raise NoSolution("right-hand side not in the integer column span")
                    Z[r] = [x // d for x in row]
                elif any(x != 0 for x in row):
                    raise NoSolution("right-hand side not in the column span")
            X = self.V @ Z if nc else Z
        return X.reshape(-1) if vec else X

    def kernel(self) -> np.ndarray:
        ring = self.ring
        nr, nc = self.shape
        if ring.is_field:
            free = [c for c in range(nc) if c not in set(self.pivots)]
            K = ring.zeros((nc, len(free)))
            for k, f in enumerate(free):
                K[f, k] = ring.coerce(1)
                for r, c in enumerate(self.pivots):
                    K[c, k] = ring.reduce(-self.R[r, f]) if ring.machine else ring.coerce(-self.R[r, f])
            return K
        return self.V[:, self.rank:].copy()

    def image_basis(self) -> np.ndarray:
        """A basis of the column span (columns independent)."""
        ring = self.ring
        if ring.is_field:
            return self.m[:, self.pivots].copy()
        basis = self.Uinv[:, : self.rank].copy()
        for k, d in enumerate(self.diag):
            basis[:, k] = basis[:, k] * d
        return basis


def rank(m: np.ndarray, ring: Ring) -> int:
    if m.size == 0:
        return 0
    return Solver(m, ring).rank


def kernel(m: np.ndarray, ring: Ring) -> np.ndarray:
    """Columns spanning ``ker m`` (a Z-basis of the kernel lattice over Z)."""
    return Solver(m, ring).kernel()


def solve(m: np.ndarray, b: np.ndarray, ring: Ring) -> np.ndarray:
    """Deterministic solution of ``m x = b``; raises NoSolution."""
    return Solver(m, ring).solve(b)


def image_basis(m: np.ndarray, ring: Ring) -> np.ndarray:
    if m.shape[1] == 0:
        return ring.zeros((m.shape[0], 0))
    return Solver(m, ring).image_basis()


def hstack(ring: Ring, nrows: int, *mats) -> np.ndarray:
    parts = [x for x in mats if x is not None and x.shape[1]]
    if not parts:
        return ring.zeros((nrows, 0))
    out = np.hstack(parts)
    return out.astype(ring.dtype) if out.dtype != ring.dtype else out


def contains(span: np.ndarray, vecs: np.ndarray, ring: Ring) -> bool:
    """Is every column of ``vecs`` in the column span of ``span``?"""
    if vecs.shape[1] == 0:
        return True
    if span.shape[1] == 0:
        return ring.is_zero(vecs)
    try:
        Solver(span, ring).solve(vecs)
    except NoSolution:
        return False
    return True


def same_span(a: np.ndarray, b: np.ndarray, ring: Ring) -> bool:
    return contains(a, b, ring) and contains(b, a, ring)


def det(m: np.ndarray, ring: Ring):
    """Exact determinant (fraction-free Bareiss over Z/Q, elimination over F_p)."""
    n = m.shape[0]
    if n == 0:
        return ring.coerce(1)
    if ring.kind == "Fp":
        return _det_fp(m, ring)
    return _det_fraction(m, ring)


def _det_fraction(m, ring):
    a = [[Fraction(x) for x in row] for row in np.asarray(m).tolist()]
    n = len(a)
    sign = 1
    d = Fraction(1)
    for c in range(n):
        r = next((i for i in range(c, n) if a[i][c] != 0), None)
        if r is None:
            return ring.coerce(0)
        if r != c:
            a[c], a[r] = a[r], a[c]
            sign = -sign
        d *= a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] / a[c][c]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return ring.coerce(sign * d)


def _det_fp(m, ring):
    p = ring.p
    a = [[int(x) % p for x in row] for row in np.asarray(m).tolist()]
    n = len(a)
    d = 1
    for c in range(n):
        r = next((i for i in range(c, n) if a[i][c]), None)
        if r is None:
            return 0
        if r != c:
            a[c], a[r] = a[r], a[c]
            d = -d
        d = d * a[c][c] % p
        inv = pow(a[c][c], -1, p)
        for i in range(c + 1, n):
            f = a[i][c] * inv % p
            if f:
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[c])]
    return d % p
