"""Bigraded dg modules, graded maps and homology with representatives.

A component at bidegree (p, q) is the free module on its labels, optionally
(over Z) divided by cyclic relations ``orders[k] * e_k``.  Elements are
ambient coordinate vectors; two vectors are equal when they agree modulo
those relations.

Modules and maps may be *clamped* above ``p_top``: the component at
p > p_top is a copy of the one at p_top, and a map's block at p > p_top is
its block at p_top.  This is how infinite towers are stored finitely.
"""
from __future__ import annotations

import numpy as np

from .linalg import Ring, Solver, Subquotient, hstack, mod_orders, relation_matrix
from .report import Report, Violation

# Koszul signs are computed from the vertical degree q of a bidegree (p, q).
# The horizontal shift of i: A_p -> A_{p+1} must not change the sign of an
# element, otherwise conditions (i)/(ii) clash with the derivation relation.


def sign_degree(bidegree) -> int:
    return bidegree[1]


def koszul(*degrees) -> int:
    """(-1)**sum(degrees) as +1/-1."""
    return -1 if sum(degrees) % 2 else 1


class BigradedModule:
    """Finitely presented family of based modules indexed by (p, q)."""

    def __init__(self, ring: Ring, labels: dict, orders: dict | None = None, p_top: int | None = None,
                 name: str = ""):
        self.ring = ring
        self.name = name
        self.p_top = p_top
        self._labels = {tuple(k): tuple(v) for k, v in labels.items() if len(v)}
        self._orders = {}
        for k, v in (orders or {}).items():
            k = tuple(k)
            if k in self._labels and any(v):
                if ring.is_field:
                    raise ValueError("cyclic orders are only allowed over Z")
                if len(v) != len(self._labels[k]):
                    raise ValueError(f"orders at {k} do not match the basis size")
                self._orders[k] = tuple(int(d) for d in v)
        self._modules = {}

    def key(self, p: int, q: int):
        if self.p_top is not None and p > self.p_top:
            p = self.p_top
        return (p, q)

    def labels(self, p: int, q: int) -> tuple:
        return self._labels.get(self.key(p, q), ())

    def rank(self, p: int, q: int) -> int:
        if self.p_top is not None and p > self.p_top:
            p = self.p_top
        return len(self._labels.get((p, q), ()))

    def orders(self, p: int, q: int) -> tuple:
        k = self.key(p, q)
        return self._orders.get(k, (0,) * len(self._labels.get(k, ())))

    def module(self, p: int, q: int) -> Subquotient:
        k = self.key(p, q)
        m = self._modules.get(k)
        if m is None:
            m = self._modules[k] = Subquotient.cyclic(self.ring, self.orders(*k))
        return m

    @property
    def support(self) -> list:
        return sorted(self._labels)

    @property
    def is_free(self) -> bool:
        return not self._orders

    def q_range(self):
        qs = [q for _, q in self._labels]
        return (min(qs), max(qs)) if qs else (0, -1)

    def p_range(self):
        ps = [p for p, _ in self._labels]
        return (min(ps), max(ps)) if ps else (0, -1)

    def reduce(self, p: int, q: int, v: np.ndarray) -> np.ndarray:
        return mod_orders(self.ring, v, self.orders(p, q))

    def is_zero_at(self, p: int, q: int, v: np.ndarray) -> bool:
        return self.ring.is_zero(self.reduce(p, q, v))

    def index(self, p: int, q: int, label: str) -> int:
        try:
            return self.labels(p, q).index(label)
        except ValueError:
            raise KeyError(f"no basis element {label!r} at {(p, q)}") from None

    def __repr__(self):
        return f"BigradedModule({self.name or '?'}, {len(self._labels)} bidegrees, ring={self.ring.name})"


class GradedMap:
    """A map of fixed bidegree (a, b); missing blocks are zero.

    ``compute(p, q)`` may supply blocks lazily (used for induced maps on
    infinite clamped families); results are cached.
    """

    def __init__(self, source, target, bidegree, blocks: dict | None = None, p_top: int | None = None,
                 compute=None, name: str = ""):
        self.source = source
        self.target = target
        self.bidegree = tuple(bidegree)
        self.p_top = p_top
        self.name = name
        self._blocks = {tuple(k): v for k, v in (blocks or {}).items()}
        self._compute = compute
        self._cache = {}

    @property
    def ring(self) -> Ring:
        return self.source.ring

    def _key(self, p, q):
        if self.p_top is not None and p > self.p_top:
            p = self.p_top
        return (p, q)

    def block(self, p: int, q: int) -> np.ndarray:
        a, b = self.bidegree
        rows, cols = self.target.rank(p + a, q + b), self.source.rank(p, q)
        if rows == 0 or cols == 0:
            return self.ring.zeros((rows, cols))
        k = self._key(p, q)
        m = self._blocks.get(k)
        if m is None and self._compute is not None:
            m = self._cache.get((p, q))
            if m is None:
                m = self._cache[(p, q)] = self._compute(p, q)
        if m is None:
            return self.ring.zeros((rows, cols))
        if m.shape != (rows, cols):
            raise ValueError(f"block of {self.name or 'map'} at {(p, q)} has shape {m.shape}, expected {(rows, cols)}")
        return m

    def stored(self) -> list:
        return sorted(self._blocks)

    def apply(self, p: int, q: int, v: np.ndarray) -> np.ndarray:
        return self.ring.matmul(self.block(p, q), v)

    def then(self, other: "GradedMap", name: str = "") -> "GradedMap":
        """The composite ``other o self``."""
        a, b = self.bidegree
        ring = self.ring

        def compute(p, q):
            return ring.matmul(other.block(p + a, q + b), self.block(p, q))

        bideg = (a + other.bidegree[0], b + other.bidegree[1])
        return GradedMap(self.source, other.target, bideg, compute=compute, name=name)


class DGBigradedModule:
    """A bigraded module with a differential of bidegree (0, -1).

    Pages of a spectral sequence reuse this class with differentials of
    bidegree (-r, -1); the vertical part is always -1.
    """

    def __init__(self, module: BigradedModule, d: GradedMap, check: bool = True):
        if d.bidegree[1] != -1:
            raise ValueError("a differential lowers q by one")
        self.module = module
        self.d = d
        if check:
            rep = check_complex(self)
            if not rep:
                raise ValueError(str(rep.violation))

    @property
    def ring(self) -> Ring:
        return self.module.ring

    def keys(self):
        """Bidegrees where d must be checked: the stored support."""
        return self.module.support


def check_complex(c: DGBigradedModule) -> Report:
    """d o d = 0 at every bidegree, and d respects the cyclic relations."""
    M, d, ring = c.module, c.d, c.ring
    a = d.bidegree[0]
    n = 0
    for p, q in c.keys():
        D = d.block(p, q)
        rel = relation_matrix(ring, M.orders(p, q))
        if rel.shape[1] and not M.is_zero_at(p + a, q - 1, ring.matmul(D, rel)):
            return Report(Violation("d_well_defined", ((p, q),), "d does not preserve the relations"), n)
        DD = ring.matmul(d.block(p + a, q - 1), D)
        n += 1
        if not M.is_zero_at(p + 2 * a, q - 2, DD):
            return Report(Violation("d_squared", ((p, q),), f"d o d = {DD.tolist()}"), n)
    return Report(None, n)


class HomologyData:
    """H = ker d / im d per bidegree, with cycle representatives.

    ``module(p, q)`` is a Subquotient of the ambient component, ``gens`` its
    chosen cycle representatives, ``project`` the map cycles -> classes.
    """

    def __init__(self, complex_: DGBigradedModule):
        self.complex = complex_
        self.ring = complex_.ring
        self._cache = {}

    def key(self, p, q):
        return self.complex.module.key(p, q)

    def module(self, p: int, q: int) -> Subquotient:
        k = self.key(p, q)
        h = self._cache.get(k)
        if h is None:
            h = self._cache[k] = self._compute(*k)
        return h

    def _compute(self, p, q) -> Subquotient:
        M, d, ring = self.complex.module, self.complex.d, self.ring
        n = M.rank(p, q)
        if n == 0:
            return Subquotient.free(ring, 0)
        out = hstack(ring, M.rank(p, q - 1), d.block(p, q), relation_matrix(ring, M.orders(p, q - 1)))
        if out.shape[0] == 0 or out.shape[1] == 0:
            Z = ring.eye(n)
        else:
            Z = Solver(out, ring).kernel()[:n]
        B = hstack(ring, n, d.block(p, q + 1), relation_matrix(ring, M.orders(p, q)))
        return Subquotient(ring, n, Z, B)

    def rank(self, p: int, q: int) -> int:
        return self.module(p, q).ngens

    def gens(self, p: int, q: int) -> np.ndarray:
        return self.module(p, q).gens

    def lift(self, p: int, q: int, coords: np.ndarray) -> np.ndarray:
        return self.module(p, q).lift(coords)

    def project(self, p: int, q: int, v: np.ndarray) -> np.ndarray:
        return self.module(p, q).project(v)

    def support(self, keys=None) -> list:
        keys = self.complex.module.support if keys is None else keys
        return [k for k in keys if self.rank(*k)]


def homology(c: DGBigradedModule) -> HomologyData:
    return HomologyData(c)


def check_chain_map(f: GradedMap, source: DGBigradedModule, target: DGBigradedModule, keys=None) -> Report:
    """f o d = (-1)**b d o f for f of bidegree (a, b), plus well-definedness on relations."""
    ring = f.ring
    a, b = f.bidegree
    sign = koszul(b)
    S, T = source.module, target.module
    keys = S.support if keys is None else keys
    n = 0
    for p, q in keys:
        F = f.block(p, q)
        rel = relation_matrix(ring, S.orders(p, q))
        if rel.shape[1] and not T.is_zero_at(p + a, q + b, ring.matmul(F, rel)):
            return Report(Violation("map_well_defined", ((p, q),), f"{f.name} does not preserve relations"), n)
        lhs = ring.matmul(f.block(p, q - 1), source.d.block(p, q))
        rhs = ring.matmul(target.d.block(p + a, q + b), F)
        diff = ring.sub(lhs, ring.scale(rhs, sign))
        n += 1
        if not T.is_zero_at(p + a, q + b - 1, diff):
            return Report(Violation("chain_map", ((p, q),), f"{f.name or 'map'} does not commute with d"), n)
    return Report(None, n)


def induced_map_on_homology(f: GradedMap, hs: HomologyData, ht: HomologyData, name: str = "") -> GradedMap:
    """The map [x] -> [f x]; blocks are computed on demand."""
    a, b = f.bidegree
    ring = f.ring

    def compute(p, q):
        src = hs.module(p, q)
        return ht.project(p + a, q + b, ring.matmul(f.block(p, q), src.gens))

    return GradedMap(hs, ht, f.bidegree, compute=compute, name=name or f"H({f.name})")
