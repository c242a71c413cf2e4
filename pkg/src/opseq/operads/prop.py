"""PROPs: operations with several inputs and outputs.

Conventions
-----------
* ``P(m, n)`` holds operations with m inputs and n outputs, m, n >= 1 and
  m + n <= biarity_cap.
* ``left[(m, n)][h-1]`` is the matrix of f -> tau_h . f (permuting outputs),
  ``right[(m, n)][h-1]`` the matrix of f -> f . tau_h (permuting inputs).
* ``vertical[(m, k, n)]`` is ``T[c, g, f]`` with g o f = sum_c T[c, g, f] e_c
  for f in P(m, k), g in P(k, n).
* ``horizontal[(m1, n1, m2, n2)]`` is ``T[c, a, b]`` for a (x) b with a in
  P(m1, n1), b in P(m2, n2).
* A permutation s acts through a word s = tau_w1 o ... o tau_wk; it moves the
  tensor factor in position j to position s(j).
"""
from __future__ import annotations

from itertools import product

import numpy as np

from ..graded import DGBigradedModule
from ..linalg import Ring
from ..report import Report, Violation
from .perms import word


def block_swap(a: int, b: int) -> tuple:
    """The permutation moving a block of a factors past a block of b factors."""
    return tuple(b + j for j in range(a)) + tuple(range(b))


class Prop:
    def __init__(self, ring: Ring, basis: dict, degrees: dict, left: dict, right: dict,
                 vertical: dict, horizontal: dict, unit, biarity_cap: int = 4, name: str = ""):
        self.ring = ring
        self.cap = biarity_cap
        self.name = name
        self.shapes = [(m, n) for m in range(1, biarity_cap) for n in range(1, biarity_cap - m + 1)]
        self.basis = {s: tuple(basis.get(s, ())) for s in self.shapes}
        self.degrees = {s: tuple(int(x) for x in degrees.get(s, ())) for s in self.shapes}
        self.left, self.right = {}, {}
        for s in self.shapes:
            d = self.dim(*s)
            self.left[s] = [ring.array(M).reshape(d, d) for M in left.get(s, ())]
            self.right[s] = [ring.array(M).reshape(d, d) for M in right.get(s, ())]
            if len(self.left[s]) != s[1] - 1 or len(self.right[s]) != s[0] - 1:
                raise ValueError(f"P{s} needs {s[1] - 1} output and {s[0] - 1} input transpositions")
        self.vertical = {}
        for (m, k, n), T in vertical.items():
            if self.fits(m, k) and self.fits(k, n) and self.fits(m, n):
                self.vertical[(m, k, n)] = ring.array(T).reshape(self.dim(m, n), self.dim(k, n), self.dim(m, k))
        self.horizontal = {}
        for (m1, n1, m2, n2), T in horizontal.items():
            if self.fits(m1 + m2, n1 + n2):
                self.horizontal[(m1, n1, m2, n2)] = ring.array(T).reshape(
                    self.dim(m1 + m2, n1 + n2), self.dim(m1, n1), self.dim(m2, n2))
        self.unit = ring.array(unit).reshape(self.dim(1, 1))
        self._perm = {}

    def fits(self, m: int, n: int) -> bool:
        return m >= 1 and n >= 1 and m + n <= self.cap

    def dim(self, m: int, n: int) -> int:
        return len(self.basis.get((m, n), ()))

    def __repr__(self):
        return f"Prop({self.name or '?'}; cap {self.cap}; {self.ring.name})"

    def zeros3(self, a, b, c):
        return self.ring.zeros((self.dim(*a), self.dim(*b), self.dim(*c)))

    def ver(self, m, k, n):
        T = self.vertical.get((m, k, n))
        return self.zeros3((m, n), (k, n), (m, k)) if T is None else T

    def hor(self, m1, n1, m2, n2):
        T = self.horizontal.get((m1, n1, m2, n2))
        return self.zeros3((m1 + m2, n1 + n2), (m1, n1), (m2, n2)) if T is None else T

    def act_matrix(self, shape, s, side: str) -> np.ndarray:
        """Matrix of f -> s . f (side "left") or f -> f . s (side "right")."""
        key = (shape, tuple(s), side)
        M = self._perm.get(key)
        if M is None:
            ring = self.ring
            gens = self.left[shape] if side == "left" else self.right[shape]
            M = ring.eye(self.dim(*shape))
            w = word(tuple(s))
            # s . f = tau_w1 . (tau_w2 . ...);  f . s = (f . tau_w1) . tau_w2 ...
            for h in (reversed(w) if side == "left" else w):
                M = ring.matmul(gens[h - 1], M)
            self._perm[key] = M
        return M

    def identity(self, n: int) -> np.ndarray:
        """1 (x) ... (x) 1 in P(n, n)."""
        v = self.unit
        for k in range(2, n + 1):
            v = self.ring.matmul(self.ring.tensordot(self.hor(k - 1, k - 1, 1, 1), self.unit, axes=([2], [0])), v)
        return v


def endomorphism_prop(rank: int, ring: Ring | None = None, biarity_cap: int = 4) -> Prop:
    """Hom(V^{(x)m}, V^{(x)n}) for a free module V of the given rank, in degree 0.

    Basis: matrix units "E{outputs};{inputs}" sending e_{inputs} to e_{outputs}.
    """
    ring = ring or Ring.rationals()
    shapes = [(m, n) for m in range(1, biarity_cap) for n in range(1, biarity_cap - m + 1)]
    elems = {(m, n): [(o, a) for o in product(range(rank), repeat=n) for a in product(range(rank), repeat=m)]
             for m, n in shapes}
    index = {s: {e: k for k, e in enumerate(elems[s])} for s in shapes}

    def lab(o, a):
        return "E%s;%s" % ("".join(map(str, o)), "".join(map(str, a)))

    def swap(t, h):
        t = list(t)
        t[h - 1], t[h] = t[h], t[h - 1]
        return tuple(t)

    basis = {s: [lab(o, a) for o, a in elems[s]] for s in shapes}
    degrees = {s: [0] * len(elems[s]) for s in shapes}
    left, right = {}, {}
    for s in shapes:
        m, n = s
        d = len(elems[s])
        left[s], right[s] = [], []
        for h in range(1, n):
            M = ring.zeros((d, d))
            for k, (o, a) in enumerate(elems[s]):
                M[index[s][(swap(o, h), a)], k] = ring.coerce(1)
            left[s].append(M)
        for h in range(1, m):
            M = ring.zeros((d, d))
            for k, (o, a) in enumerate(elems[s]):
                M[index[s][(o, swap(a, h))], k] = ring.coerce(1)
            right[s].append(M)
    vertical = {}
    for (m, k) in shapes:
        for n in range(1, biarity_cap):
            if (k, n) not in index or (m, n) not in index:
                continue
            T = ring.zeros((len(elems[(m, n)]), len(elems[(k, n)]), len(elems[(m, k)])))
            for gi, (o, b) in enumerate(elems[(k, n)]):
                for fi, (b2, a) in enumerate(elems[(m, k)]):
                    if b == b2:
                        T[index[(m, n)][(o, a)], gi, fi] = ring.coerce(1)
            vertical[(m, k, n)] = T
    horizontal = {}
    for (m1, n1) in shapes:
        for (m2, n2) in shapes:
            tgt = (m1 + m2, n1 + n2)
            if tgt not in index:
                continue
            T = ring.zeros((len(elems[tgt]), len(elems[(m1, n1)]), len(elems[(m2, n2)])))
            for ai, (o, a) in enumerate(elems[(m1, n1)]):
                for bi, (o2, b) in enumerate(elems[(m2, n2)]):
                    T[index[tgt][(o + o2, a + b)], ai, bi] = ring.coerce(1)
            horizontal[(m1, n1, m2, n2)] = T
    unit = ring.zeros(len(elems[(1, 1)]))
    for o in range(rank):
        unit[index[(1, 1)][((o,), (o,))]] = ring.coerce(1)
    return Prop(ring, basis, degrees, left, right, vertical, horizontal, unit, biarity_cap,
                name=f"End_prop({rank})")


# ---------------------------------------------------------------------------
# verification


def _sign_matrix(ring, da, db):
    S = np.array([[-1 if (x * y) % 2 else 1 for y in db] for x in da], dtype=object)
    return ring.array(S) if S.size else ring.zeros(S.shape)


def check_prop(P: Prop) -> Report:
    """Symmetric group relations, units, associativity, interchange and bimodule laws."""
    ring = P.ring
    count = [0]

    def differs(lhs, rhs):
        count[0] += 1
        return not ring.is_zero(ring.sub(lhs, rhs))

    def fail(axiom, *where):
        return Report(Violation(axiom, where), count[0])

    # group relations and commuting actions
    for s in P.shapes:
        I = ring.eye(P.dim(*s))
        for side, gens in (("left", P.left[s]), ("right", P.right[s])):
            for h, M in enumerate(gens, 1):
                for b, a in zip(*np.nonzero(M != 0)):
                    if P.degrees[s][a] != P.degrees[s][b]:
                        return fail("degree", f"P{s}", f"{side} tau_{h}")
                if differs(ring.matmul(M, M), I):
                    return fail("involution", f"P{s}", f"{side} tau_{h}")
            for h in range(1, len(gens)):
                A, B = gens[h - 1], gens[h]
                if differs(ring.matmul(A, ring.matmul(B, A)), ring.matmul(B, ring.matmul(A, B))):
                    return fail("braid", f"P{s}", f"{side} tau_{h}")
            for h in range(1, len(gens) + 1):
                for h2 in range(h + 2, len(gens) + 1):
                    A, B = gens[h - 1], gens[h2 - 1]
                    if differs(ring.matmul(A, B), ring.matmul(B, A)):
                        return fail("braid", f"P{s}", f"{side} tau_{h}", f"tau_{h2}")
        for L in P.left[s]:
            for R in P.right[s]:
                if differs(ring.matmul(L, R), ring.matmul(R, L)):
                    return fail("bimodule", f"P{s}", "left and right actions do not commute")

    if P.dim(1, 1) == 0 or any(P.degrees[(1, 1)][k] for k in np.nonzero(P.unit != 0)[0]):
        return fail("unit", "P(1,1)", "unit must be a nonzero degree-0 element")

    # degree laws for compositions
    for (m, k, n), T in P.vertical.items():
        for c, g, f in zip(*np.nonzero(T != 0)):
            if P.degrees[(m, n)][c] != P.degrees[(k, n)][g] + P.degrees[(m, k)][f]:
                return fail("degree", "vertical", (m, k, n))
    for (m1, n1, m2, n2), T in P.horizontal.items():
        for c, a, b in zip(*np.nonzero(T != 0)):
            if P.degrees[(m1 + m2, n1 + n2)][c] != P.degrees[(m1, n1)][a] + P.degrees[(m2, n2)][b]:
                return fail("degree", "horizontal", (m1, n1, m2, n2))

    # vertical units: 1_n o f = f and g o 1_m = g
    for (m, n) in P.shapes:
        if P.fits(n, n):
            lhs = ring.tensordot(P.ver(m, n, n), P.identity(n), axes=([1], [0]))
            if differs(lhs, ring.eye(P.dim(m, n))):
                return fail("unit", f"P({m},{n})", "identity o f != f")
        if P.fits(m, m):
            lhs = ring.tensordot(P.ver(m, m, n), P.identity(m), axes=([2], [0]))
            if differs(lhs, ring.eye(P.dim(m, n))):
                return fail("unit", f"P({m},{n})", "g o identity != g")

    # vertical associativity: h o (g o f) = (h o g) o f
    for (m, k) in P.shapes:
        for l in range(1, P.cap):
            for n in range(1, P.cap):
                if not all(P.fits(*s) for s in ((k, l), (l, n), (m, l), (k, n), (m, n))):
                    continue
                # [c, h, g, f]
                lhs = ring.einsum("cHx,xgf->cHgf", P.ver(m, l, n), P.ver(m, k, l))
                rhs = ring.einsum("cyf,yHg->cHgf", P.ver(m, k, n), P.ver(k, l, n))
                if differs(lhs, rhs):
                    return fail("associativity", "vertical", (m, k, l, n))

    # horizontal associativity: (a (x) b) (x) c = a (x) (b (x) c)
    for s1, s2, s3 in product(P.shapes, repeat=3):
        tot = (s1[0] + s2[0] + s3[0], s1[1] + s2[1] + s3[1])
        if not P.fits(*tot):
            continue
        lhs = ring.einsum("cxz,xab->cabz", P.hor(s1[0] + s2[0], s1[1] + s2[1], *s3), P.hor(*s1, *s2))
        rhs = ring.einsum("cax,xbz->cabz", P.hor(*s1, s2[0] + s3[0], s2[1] + s3[1]), P.hor(*s2, *s3))
        if differs(lhs, rhs):
            return fail("associativity", "horizontal", (s1, s2, s3))

    # interchange: (g1 (x) g2) o (f1 (x) f2) = (-1)^{|g2||f1|} (g1 o f1) (x) (g2 o f2)
    for (m1, k1), (m2, k2) in product(P.shapes, repeat=2):
        for n1 in range(1, P.cap):
            for n2 in range(1, P.cap):
                shapes = [(k1, n1), (k2, n2), (m1 + m2, k1 + k2), (k1 + k2, n1 + n2), (m1 + m2, n1 + n2),
                          (m1, n1), (m2, n2)]
                if not all(P.fits(*s) for s in shapes):
                    continue
                V = P.ver(m1 + m2, k1 + k2, n1 + n2)  # [c, G, F]
                X = ring.einsum("cGF,Gab->cabF", V, P.hor(k1, n1, k2, n2))
                lhs = ring.einsum("cabF,Fxy->cabxy", X, P.hor(m1, k1, m2, k2))  # [c, g1, g2, f1, f2]
                V1, V2 = P.ver(m1, k1, n1), P.ver(m2, k2, n2)
                H = P.hor(m1, n1, m2, n2)
                rhs = ring.einsum("cxy,xgf->cgfy", H, V1)  # [c, g1, f1, y]
                rhs = ring.einsum("cgfy,yhe->cghfe", rhs, V2)  # [c, g1, g2, f1, f2]
                S = _sign_matrix(ring, P.degrees[(k2, n2)], P.degrees[(m1, k1)])  # [g2, f1]
                rhs = rhs * S[None, None, :, :, None]
                if differs(lhs, ring.reduce(rhs)):
                    return fail("interchange", ((m1, k1, n1), (m2, k2, n2)))

    # vertical equivariance
    for (m, k) in P.shapes:
        for n in range(1, P.cap):
            if not (P.fits(k, n) and P.fits(m, n)):
                continue
            V = P.ver(m, k, n)
            for h in range(1, n):  # (tau . g) o f = tau . (g o f)
                lhs = ring.einsum("cxf,xg->cgf", V, P.left[(k, n)][h - 1])
                rhs = ring.einsum("cx,xgf->cgf", P.left[(m, n)][h - 1], V)
                if differs(lhs, rhs):
                    return fail("equivariance", "vertical", "outputs", (m, k, n), h)
            for h in range(1, m):  # g o (f . tau) = (g o f) . tau
                lhs = ring.einsum("cgx,xf->cgf", V, P.right[(m, k)][h - 1])
                rhs = ring.einsum("cx,xgf->cgf", P.right[(m, n)][h - 1], V)
                if differs(lhs, rhs):
                    return fail("equivariance", "vertical", "inputs", (m, k, n), h)
            for h in range(1, k):  # (g . tau) o f = g o (tau . f)
                lhs = ring.einsum("cxf,xg->cgf", V, P.right[(k, n)][h - 1])
                rhs = ring.einsum("cgx,xf->cgf", V, P.left[(m, k)][h - 1])
                if differs(lhs, rhs):
                    return fail("equivariance", "vertical", "middle", (m, k, n), h)

    # horizontal equivariance and the symmetry of (x)
    for (m1, n1), (m2, n2) in product(P.shapes, repeat=2):
        tot = (m1 + m2, n1 + n2)
        if not P.fits(*tot):
            continue
        H = P.hor(m1, n1, m2, n2)
        for side, blocks in (("left", (n1, n2)), ("right", (m1, m2))):
            acts = P.left if side == "left" else P.right
            for h in range(1, blocks[0]):
                lhs = ring.einsum("cxb,xa->cab", H, acts[(m1, n1)][h - 1])
                rhs = ring.einsum("cx,xab->cab", acts[tot][h - 1], H)
                if differs(lhs, rhs):
                    return fail("equivariance", "horizontal", side, ((m1, n1), (m2, n2)), h)
            for h in range(1, blocks[1]):
                lhs = ring.einsum("cax,xb->cab", H, acts[(m2, n2)][h - 1])
                rhs = ring.einsum("cx,xab->cab", acts[tot][blocks[0] + h - 1], H)
                if differs(lhs, rhs):
                    return fail("equivariance", "horizontal", side, ((m1, n1), (m2, n2)), blocks[0] + h)
        # beta . (a (x) b) = (-1)^{|a||b|} (b (x) a) . beta
        lhs = ring.einsum("cx,xab->cab", P.act_matrix(tot, block_swap(n1, n2), "left"), H)
        Hs = P.hor(m2, n2, m1, n1)
        rhs = ring.einsum("cx,xba->cab", P.act_matrix(tot, block_swap(m1, m2), "right"), Hs)
        S = _sign_matrix(ring, P.degrees[(m1, n1)], P.degrees[(m2, n2)])
        if differs(lhs, ring.reduce(rhs * S[None])):
            return fail("symmetry", ((m1, n1), (m2, n2)))
    return Report(None, count[0])


# ---------------------------------------------------------------------------
# algebras over a PROP


class PropAlgebra:
    """A PROP acting on a based module V placed in bidegree (0, 0).

    ``tables[(m, n)]`` is ``T[o_1..o_n, k, i_1..i_m]``: the coefficient of
    e_{o_1} (x) ... (x) e_{o_n} in Gamma(e_k; e_{i_1}, ..., e_{i_m}).
    """

    def __init__(self, prop: Prop, carrier: DGBigradedModule, tables: dict, name: str = ""):
        self.prop = prop
        self.carrier = carrier
        self.ring = prop.ring
        self.name = name
        support = carrier.module.support
        if support not in ([], [(0, 0)]):
            raise ValueError("PROP algebras are carried by a module in bidegree (0, 0)")
        self.rank = carrier.module.rank(0, 0)
        r = self.rank
        self.tables = {}
        for (m, n) in prop.shapes:
            shape = (r,) * n + (prop.dim(m, n),) + (r,) * m
            T = tables.get((m, n))
            self.tables[(m, n)] = self.ring.zeros(shape) if T is None else self.ring.array(T).reshape(shape)

    def gamma(self, m: int, n: int, op: np.ndarray, xs) -> np.ndarray:
        """Gamma(op; x_1 (x) ... (x) x_m) for op in P(m, n), as an n-fold tensor."""
        ring = self.ring
        T = ring.tensordot(self.tables[(m, n)], ring.array(op), axes=([n], [0]))
        for x in reversed(xs):
            T = ring.tensordot(T, ring.array(x), axes=([T.ndim - 1], [0]))
        return T


def tautological_algebra(P: Prop, carrier: DGBigradedModule) -> PropAlgebra:
    """The endomorphism PROP of V acting on V itself."""
    r = carrier.module.rank(0, 0)
    ring = P.ring
    tables = {}
    for (m, n) in P.shapes:
        T = ring.zeros((r,) * n + (P.dim(m, n),) + (r,) * m)
        for k, lab in enumerate(P.basis[(m, n)]):
            o, a = lab[1:].split(";")
            T[tuple(int(c) for c in o) + (k,) + tuple(int(c) for c in a)] = ring.coerce(1)
        tables[(m, n)] = T
    return PropAlgebra(P, carrier, tables, name="tautological")


def check_prop_algebra(A: PropAlgebra) -> Report:
    """Units, both compositions and both actions, checked on all basis tuples."""
    P, ring, r = A.prop, A.ring, A.rank
    count = [0]

    def differs(lhs, rhs):
        count[0] += 1
        return not ring.is_zero(ring.sub(lhs, rhs))

    def fail(axiom, *where):
        return Report(Violation(axiom, where), count[0])

    def op_first(m, n):
        # [k, o_1..o_n, i_1..i_m]
        return np.moveaxis(A.tables[(m, n)], n, 0)

    # unit
    U = ring.tensordot(A.tables[(1, 1)], P.unit, axes=([1], [0]))
    if differs(U, ring.eye(r)):
        return fail("unit", "Gamma(1; x) != x")

    # vertical: Gamma(g o f; x) = Gamma(g; Gamma(f; x))
    for (m, k) in P.shapes:
        for n in range(1, P.cap):
            if not (P.fits(k, n) and P.fits(m, n)):
                continue
            V = P.ver(m, k, n)  # [c, g, f]
            Tmn = op_first(m, n)  # [c, o.., i..]
            lhs = ring.tensordot(V, Tmn, axes=([0], [0]))  # [g, f, o.., i..]
            G, F = op_first(k, n), op_first(m, k)  # G[g, o.., y..], F[f, y.., i..]
            rhs = ring.tensordot(G, F, axes=(list(range(1 + n, 1 + n + k)), list(range(1, 1 + k))))
            # rhs axes: [g, o.., f, i..] -> [g, f, o.., i..]
            rhs = np.moveaxis(rhs, 1 + n, 1)
            if differs(lhs, rhs):
                return fail("vertical", (m, k, n))

    # horizontal: Gamma(a (x) b; x, y) = Gamma(a; x) (x) Gamma(b; y)   (degree-0 carrier)
    for (m1, n1), (m2, n2) in product(P.shapes, repeat=2):
        if not P.fits(m1 + m2, n1 + n2):
            continue
        H = P.hor(m1, n1, m2, n2)
        lhs = ring.tensordot(H, op_first(m1 + m2, n1 + n2), axes=([0], [0]))  # [a, b, o.., i..]
        Ta, Tb = op_first(m1, n1), op_first(m2, n2)
        rhs = np.multiply.outer(Ta, Tb)  # [a, oa.., ia.., b, ob.., ib..]
        na = 1 + n1 + m1
        order = [0, na] + list(range(1, 1 + n1)) + list(range(na + 1, na + 1 + n2)) + \
            list(range(1 + n1, na)) + list(range(na + 1 + n2, na + 1 + n2 + m2))
        rhs = ring.reduce(np.transpose(rhs, order))
        if differs(lhs, rhs):
            return fail("horizontal", ((m1, n1), (m2, n2)))

    # actions: Gamma(tau . f; x) swaps outputs, Gamma(f . tau; x) swaps inputs
    for (m, n) in P.shapes:
        T = op_first(m, n)
        for h in range(1, n):
            lhs = ring.tensordot(P.left[(m, n)][h - 1], T, axes=([0], [0]))
            perm = list(range(T.ndim))
            perm[h], perm[h + 1] = perm[h + 1], perm[h]
            if differs(lhs, np.transpose(T, perm)):
                return fail("equivariance", "outputs", (m, n), h)
        for h in range(1, m):
            lhs = ring.tensordot(P.right[(m, n)][h - 1], T, axes=([0], [0]))
            perm = list(range(T.ndim))
            perm[n + h], perm[n + h + 1] = perm[n + h + 1], perm[n + h]
            if differs(lhs, np.transpose(T, perm)):
                return fail("equivariance", "inputs", (m, n), h)
    return Report(None, count[0])
