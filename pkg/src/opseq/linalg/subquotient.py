"""Subquotients Z/B of a free module R^n, with lift and project maps."""
from __future__ import annotations

import numpy as np

from .dense import NoSolution, Solver, hstack, image_basis, rref, snf_full
from .rings import Ring


class NotASubmodule(ValueError):
    pass


class ProjectUndefined(ValueError):
    """A vector handed to ``project`` is not in the cycle span Z."""


class Subquotient:
    """The module ``span(Z) / span(B)`` inside ``R^ambient_rank``.

    ``gens`` (ambient x g) holds chosen representatives of the normal-form
    generators; ``orders[k]`` is 0 for a free generator and the invariant
    factor d_k >= 2 for a torsion one (always 0 over a field).  ``project``
    sends vectors of span(Z) to normal-form coordinates and raises
    ProjectUndefined elsewhere.
    """

    def __init__(self, ring: Ring, ambient_rank: int, Z: np.ndarray, B: np.ndarray | None = None):
        self.ring = ring
        self.ambient_rank = n = ambient_rank
        Z = ring.zeros((n, 0)) if Z is None else Z
        B = ring.zeros((n, 0)) if B is None else B
        if Z.shape[0] != n or B.shape[0] != n:
            raise ValueError("generator matrices must have ambient_rank rows")
        self._identity = False
        self.Zb = image_basis(Z, ring)
        self.Bb = image_basis(B, ring)
        z = self.Zb.shape[1]
        self._zsolver = Solver(self.Zb, ring) if z else None
        if self.Bb.shape[1]:
            if z == 0:
                if not ring.is_zero(self.Bb):
                    raise NotASubmodule("B is not contained in Z")
                X = ring.zeros((0, 0))
            else:
                try:
                    X = self._zsolver.solve(self.Bb)
                except NoSolution:
                    raise NotASubmodule("B is not contained in Z") from None
        else:
            X = ring.zeros((z, 0))
        if ring.is_field:
            if X.shape[1]:
                R, piv, _ = rref(X.T.copy(), ring)
            else:
                R, piv = ring.zeros((0, z)), []
            nonpiv = [c for c in range(z) if c not in set(piv)]
            Q = ring.zeros((len(nonpiv), z))
            for a, c in enumerate(nonpiv):
                Q[a, c] = ring.coerce(1)
                for r, pc in enumerate(piv):
                    if R[r, c] != 0:
                        Q[a, pc] = ring.reduce(-R[r, c]) if ring.machine else ring.coerce(-R[r, c])
            self._Q = Q
            self.gens = self.Zb[:, nonpiv].copy()
            self.orders = [0] * len(nonpiv)
        else:
            U, _, _, Uinv, _, diag = snf_full(X) if X.size else (
                ring.eye(z), None, None, ring.eye(z), None, [])
            keep = [k for k in range(z) if k >= len(diag) or diag[k] != 1]
            self._Q = U[keep, :] if z else ring.zeros((0, 0))
            self.gens = (self.Zb @ Uinv[:, keep]) if z else ring.zeros((n, 0))
            self.orders = [diag[k] if k < len(diag) else 0 for k in keep]
        if self.gens.dtype != ring.dtype:
            self.gens = self.gens.astype(ring.dtype)

    # -- constructors -----------------------------------------------------
    @classmethod
    def free(cls, ring: Ring, n: int) -> "Subquotient":
        self = cls.__new__(cls)
        self.ring = ring
        self.ambient_rank = n
        self._identity = True
        self.Zb = ring.eye(n)
        self.Bb = ring.zeros((n, 0))
        self._zsolver = None
        self._Q = ring.eye(n)
        self.gens = ring.eye(n)
        self.orders = [0] * n
        return self

    @classmethod
    def cyclic(cls, ring: Ring, orders) -> "Subquotient":
        """R^n modulo the diagonal relations d_k e_k (d_k = 0 means free)."""
        orders = [int(d) for d in orders]
        n = len(orders)
        if all(d == 0 for d in orders):
            return cls.free(ring, n)
        if ring.is_field:
            raise ValueError("torsion orders only make sense over Z")
        tors = [d for d in orders if d]
        if all(d >= 2 for d in tors) and all(b % a == 0 for a, b in zip(tors, tors[1:])):
            # already a normal form: keep the ambient coordinates
            self = cls.free(ring, n)
            self._identity = False
            self.Bb = ring.zeros((n, len(tors)))
            for c, k in enumerate(k for k, d in enumerate(orders) if d):
                self.Bb[k, c] = orders[k]
            self.orders = orders
            return self
        B = ring.zeros((n, n))
        for k, d in enumerate(orders):
            B[k, k] = ring.coerce(d)
        return cls(ring, n, ring.eye(n), B)

    # -- structure ----------------------------------------------------------
    @property
    def ngens(self) -> int:
        return len(self.orders)

    @property
    def is_zero(self) -> bool:
        return self.ngens == 0

    @property
    def is_free(self) -> bool:
        return all(d == 0 for d in self.orders)

    @property
    def free_rank(self) -> int:
        return sum(1 for d in self.orders if d == 0)

    @property
    def torsion(self) -> list:
        """Invariant factors d_1 | d_2 | ... of the torsion part."""
        return sorted(d for d in self.orders if d)

    @property
    def normal_form(self):
        if self.ring.is_field:
            return self.ngens
        return (self.free_rank, self.torsion)

    def invariants(self) -> tuple:
        return (self.free_rank, tuple(self.torsion))

    def __repr__(self):
        if self.ring.is_field:
            return f"Subquotient(dim={self.ngens}, ambient={self.ambient_rank})"
        return f"Subquotient(Z^{self.free_rank} + {self.torsion}, ambient={self.ambient_rank})"

    # -- coordinates ----------------------------------------------------------
    def reduce(self, coords: np.ndarray) -> np.ndarray:
        """Canonical representatives of coordinates (torsion entries mod d_k)."""
        ring = self.ring
        if ring.is_field or self.is_free:
            return ring.reduce(coords)
        out = coords.copy()
        for k, d in enumerate(self.orders):
            if d:
                out[k] = out[k] % d
        return out

    def coords_equal(self, a: np.ndarray, b: np.ndarray) -> bool:
        return self.ring.is_zero(self.reduce(self.ring.sub(a, b)))

    def lift(self, coords: np.ndarray) -> np.ndarray:
        if self._identity:
            return coords.copy()
        return self.ring.matmul(self.gens, coords)

    def contains(self, v: np.ndarray) -> bool:
        try:
            self._zcoords(v)
        except ProjectUndefined:
            return False
        return True

    def _zcoords(self, v: np.ndarray) -> np.ndarray:
        if self._zsolver is None:
            if self.Zb.shape[1] == 0:
                if not self.ring.is_zero(v):
                    raise ProjectUndefined("vector is not in the cycle span")
                shape = (0,) if v.ndim == 1 else (0, v.shape[1])
                return self.ring.zeros(shape)
            return v
        try:
            return self._zsolver.solve(v)
        except NoSolution:
            raise ProjectUndefined("vector is not in the cycle span") from None

    def project(self, v: np.ndarray) -> np.ndarray:
        """Normal-form coordinates of ``v`` (vector or matrix of columns)."""
        ring = self.ring
        if self._identity:
            return ring.reduce(v.copy())
        c = self._zcoords(v)
        if self.ngens == 0:
            return ring.zeros((0,) if v.ndim == 1 else (0, v.shape[1]))
        return self.reduce(ring.matmul(self._Q, c))

    def in_B(self, v: np.ndarray) -> bool:
        """Does ``v`` (in span Z) represent the zero class?"""
        return self.ring.is_zero(self.project(v))

    # -- submodules in the same ambient ---------------------------------------
    def sub_from_coords(self, X: np.ndarray) -> np.ndarray:
        """Ambient generators of the submodule spanned by coordinate columns X (plus B)."""
        n = self.ambient_rank
        return hstack(self.ring, n, self.lift(X) if X.shape[1] else None, self.Bb)

    def same_as(self, other: "Subquotient") -> bool:
        """Equal Z-spans and equal B-spans in the same ambient module."""
        from .dense import same_span

        if self.ambient_rank != other.ambient_rank:
            return False
        return same_span(self.Zb, other.Zb, self.ring) and same_span(self.Bb, other.Bb, self.ring)


def zero_module(ring: Ring, n: int = 0) -> Subquotient:
    return Subquotient(ring, n, ring.zeros((n, 0)))


# ---------------------------------------------------------------------------
# coordinate-level kernels and preimages for maps between subquotients


def coord_kernel(f: np.ndarray, source: Subquotient, target: Subquotient) -> np.ndarray:
    """Coordinate columns generating ker(f: source -> target)."""
    ring = source.ring
    g1 = source.ngens
    if g1 == 0:
        return ring.zeros((0, 0))
    if ring.is_field or target.is_free:
        M = f
    else:
        rel = [k for k, d in enumerate(target.orders) if d]
        R = ring.zeros((target.ngens, len(rel)))
        for c, k in enumerate(rel):
            R[k, c] = target.orders[k]
        M = hstack(ring, target.ngens, f, R)
    if M.shape[0] == 0:
        return ring.eye(g1)
    K = Solver(M, ring).kernel()
    return K[:g1].copy()


def coord_preimage(f: np.ndarray, source: Subquotient, target: Subquotient, S: np.ndarray) -> np.ndarray:
    """Coordinate columns generating f^{-1}(span S) inside ``source``."""
    ring = source.ring
    g1 = source.ngens
    if g1 == 0:
        return ring.zeros((0, 0))
    parts = [f, S if S.shape[1] else None]
    if not (ring.is_field or target.is_free):
        rel = [k for k, d in enumerate(target.orders) if d]
        R = ring.zeros((target.ngens, len(rel)))
        for c, k in enumerate(rel):
            R[k, c] = target.orders[k]
        parts.append(R)
    M = hstack(ring, target.ngens, *parts)
    if M.shape[0] == 0:
        return ring.eye(g1)
    K = Solver(M, ring).kernel()
    return K[:g1].copy()


def coord_solve(f: np.ndarray, target: Subquotient, b: np.ndarray) -> np.ndarray:
    """Some x with f x == b modulo the relations of ``target``; raises NoSolution."""
    ring = target.ring
    if ring.is_field or target.is_free:
        M = f
    else:
        rel = [k for k, d in enumerate(target.orders) if d]
        R = ring.zeros((target.ngens, len(rel)))
        for c, k in enumerate(rel):
            R[k, c] = target.orders[k]
        M = hstack(ring, target.ngens, f, R)
    n = f.shape[1]
    if M.shape[0] == 0:
        return ring.zeros((n,) if b.ndim == 1 else (n, b.shape[1]))
    if M.shape[1] == 0:
        if not ring.is_zero(b):
            raise NoSolution("no solution")
        return ring.zeros((n,) if b.ndim == 1 else (n, b.shape[1]))
    x = Solver(M, ring).solve(b)
    return x[:n].copy()


def induced_matrix(F: np.ndarray, source: Subquotient, target: Subquotient) -> np.ndarray:
    """Coordinate matrix of the map induced by the ambient linear map F."""
    ring = source.ring
    if source.ngens == 0 or target.ngens == 0:
        return ring.zeros((target.ngens, source.ngens))
    return target.project(ring.matmul(F, source.gens))


def transfer(coords: np.ndarray, source: Subquotient, target: Subquotient) -> np.ndarray:
    """Re-express classes of ``source`` in ``target`` (same ambient)."""
    return target.project(source.lift(coords))


def mod_orders(ring: Ring, v: np.ndarray, orders) -> np.ndarray:
    """Reduce the rows of ``v`` modulo cyclic orders (0 leaves a row alone)."""
    if ring.is_field or not orders or not any(orders):
        return ring.reduce(v)
    out = v.copy()
    for k, d in enumerate(orders):
        if d:
            out[k] = out[k] % d
    return out


def relation_matrix(ring: Ring, orders) -> np.ndarray:
    """Columns d_k e_k for the nonzero orders."""
    rel = [k for k, d in enumerate(orders) if d]
    R = ring.zeros((len(orders), len(rel)))
    for c, k in enumerate(rel):
        R[k, c] = orders[k]
    return R
