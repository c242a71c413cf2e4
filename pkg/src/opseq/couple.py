"""Towers of operad algebras and their exact couples.

A tower is a short exact sequence 0 -> A --i--> A --j--> C -> 0 of bigraded
dg modules, with i of bidegree (1, 0) and j of bidegree (0, 0), stored on a
window p_min <= p <= p_max.  Below the window everything is zero; above it
the extension policy decides:

``constant_above``
    A_p = A_{p_max} and i = identity for p >= p_max, so C_p = 0 for p > p_max.
``repeat_last_map``
    single-stage towers only (p_min = p_max = P >= 0): A_p = A_P for p >= P,
    the block of i at P repeats (a Bockstein tower, i = multiplication by a
    prime), C_P = A_P and C_p = C_{P+1} for p > P.

Couples are presented in coordinates: D^1 = H(A) and E^1 = H(C) are
replaced by the normal-form coordinate modules of their homology
subquotients, and every later D^r, E^r is a Subquotient of those
coordinate modules.
"""
from __future__ import annotations

import numpy as np

from .graded import (BigradedModule, DGBigradedModule, GradedMap, check_chain_map, check_complex,
                     homology)
from .linalg import (NoSolution, Solver, Subquotient, coord_kernel, coord_solve, hstack, relation_matrix,
                     same_span)
from .operads import OperadAlgebra, check_algebra
from .report import Report, Violation

POLICIES = ("constant_above", "repeat_last_map")


class LiftFailed(ValueError):
    """A preimage that exactness guarantees does not exist."""


class PreimageFailed(LiftFailed):
    pass


class AlgebraTower:
    """0 -> A -> A -> C -> 0 with compatible operad actions on A and C."""

    def __init__(self, A: OperadAlgebra, i: GradedMap, C: OperadAlgebra, j: GradedMap,
                 window: tuple, policy: str = "constant_above", name: str = ""):
        if policy not in POLICIES:
            raise ValueError(f"unknown extension policy {policy!r}")
        p_min, p_max = window
        if p_min > p_max:
            raise ValueError("empty window")
        if i.bidegree != (1, 0) or j.bidegree != (0, 0):
            raise ValueError("i has bidegree (1, 0) and j has bidegree (0, 0)")
        if A.operad is not C.operad:
            raise ValueError("A and C must be algebras over the same operad")
        if policy == "repeat_last_map" and not (p_min == p_max and p_min >= 0):
            raise ValueError("repeat_last_map needs a single-stage window [P, P] with P >= 0")
        self.A, self.C, self.i, self.j = A, C, i, j
        self.p_min, self.p_max = p_min, p_max
        self.policy = policy
        self.name = name
        self.ring = A.ring
        self.operad = A.operad
        self._first = None

    @property
    def repeat(self) -> bool:
        return self.policy == "repeat_last_map"

    @property
    def width(self) -> int:
        return self.p_max - self.p_min

    def q_range(self) -> tuple:
        qs = [q for _, q in self.A.module.support + self.C.module.support]
        return (min(qs), max(qs)) if qs else (0, -1)

    def p_keys(self) -> range:
        """Filtration degrees where the stored data can differ."""
        return range(self.p_min, self.p_max + (2 if self.repeat else 1))

    def keys_A(self) -> list:
        M = self.A.module
        q0, q1 = self.q_range()
        return [(p, q) for p in self.p_keys() for q in range(q0, q1 + 1) if M.rank(p, q)]

    def keys_C(self) -> list:
        M = self.C.module
        q0, q1 = self.q_range()
        return [(p, q) for p in self.p_keys() for q in range(q0, q1 + 1) if M.rank(p, q)]

    def first(self) -> "FirstData":
        if self._first is None:
            self._first = FirstData(self)
        return self._first

    def __repr__(self):
        return f"AlgebraTower({self.name or '?'}, window [{self.p_min}, {self.p_max}], {self.policy})"


def build_tower(ring, operad, a_labels: dict, c_labels: dict, window: tuple, policy: str = "constant_above",
                d_a: dict | None = None, d_c: dict | None = None, i_blocks: dict | None = None,
                j_blocks: dict | None = None, a_tables: dict | None = None, c_tables: dict | None = None,
                a_orders: dict | None = None, c_orders: dict | None = None, name: str = "") -> AlgebraTower:
    """Assemble a tower from stored components, applying the clamps of ``policy``.

    For ``constant_above`` the identity blocks of i at p_max are filled in
    when absent.  Γ tables are keyed ``(k, bidegs)`` with inputs inside the
    stored range; outputs beyond p_max live in the clamped component.
    """
    p_min, p_max = window
    repeat = policy == "repeat_last_map"
    A_mod = BigradedModule(ring, a_labels, a_orders, p_top=p_max, name="A")
    C_mod = BigradedModule(ring, c_labels, c_orders, p_top=p_max + 1 if repeat else None, name="C")
    for (p, q) in A_mod.support:
        if not p_min <= p <= p_max:
            raise ValueError(f"A has a component at {(p, q)} outside the window")
    for (p, q) in C_mod.support:
        if not p_min <= p <= p_max + (1 if repeat else 0):
            raise ValueError(f"C has a component at {(p, q)} outside the window")
    dA = GradedMap(A_mod, A_mod, (0, -1), d_a or {}, p_top=p_max, name="d_A")
    dC = GradedMap(C_mod, C_mod, (0, -1), d_c or {}, p_top=C_mod.p_top, name="d_C")
    blocks = dict(i_blocks or {})
    if not repeat:
        for (p, q) in A_mod.support:
            if p == p_max and (p, q) not in blocks:
                blocks[(p, q)] = ring.eye(A_mod.rank(p, q))
    i = GradedMap(A_mod, A_mod, (1, 0), blocks, p_top=p_max, name="i")
    j = GradedMap(A_mod, C_mod, (0, 0), j_blocks or {}, p_top=C_mod.p_top, name="j")
    Adg = DGBigradedModule(A_mod, dA, check=False)
    Cdg = DGBigradedModule(C_mod, dC, check=False)

    def transport_A(src, dst, T):
        if repeat:
            return T
        for p in range(src[0], dst[0]):
            T = ring.tensordot(i.block(p, src[1]), T, axes=([1], [0]))
        return T

    def transport_C(src, dst, T):
        return T

    A = OperadAlgebra(operad, Adg, a_tables or {}, transport=transport_A, name="A")
    C = OperadAlgebra(operad, Cdg, c_tables or {}, transport=transport_C, name="C")
    return AlgebraTower(A, i, C, j, window, policy, name=name)


# ---------------------------------------------------------------------------
# verification


def _rel(ring, M, p, q):
    return relation_matrix(ring, M.orders(p, q))


def _injective(ring, F, src_rel, tgt_rel) -> bool:
    n = F.shape[1]
    if n == 0:
        return True
    M = hstack(ring, F.shape[0], F, tgt_rel)
    if M.shape[0] == 0:
        K = ring.eye(n)
    else:
        K = Solver(M, ring).kernel()[:n]
    if K.shape[1] == 0 or ring.is_zero(K):
        return True
    if src_rel.shape[1] == 0:
        return False
    try:
        Solver(src_rel, ring).solve(K)
    except NoSolution:
        return False
    return True


def _surjective(ring, F, tgt_rel) -> bool:
    m = F.shape[0]
    if m == 0:
        return True
    return same_span(hstack(ring, m, F, tgt_rel), ring.eye(m), ring)


def check_exactness(t: AlgebraTower) -> Report:
    """i injective, j surjective and ker j = im i at every bidegree."""
    ring, M, Cm = t.ring, t.A.module, t.C.module
    q0, q1 = t.q_range()
    n = 0
    for p in t.p_keys():
        for q in range(q0, q1 + 1):
            I = t.i.block(p - 1, q)
            J = t.j.block(p, q)
            RA, RAprev, RC = _rel(ring, M, p, q), _rel(ring, M, p - 1, q), _rel(ring, Cm, p, q)
            n += 3
            if not _injective(ring, I, RAprev, RA):
                return Report(Violation("exactness", ((p - 1, q),), "i is not injective"), n)
            if not _surjective(ring, J, RC):
                return Report(Violation("exactness", ((p, q),), "j is not surjective"), n)
            a = M.rank(p, q)
            if a == 0:
                continue
            JM = hstack(ring, Cm.rank(p, q), J, RC)
            K = Solver(JM, ring).kernel()[:a] if JM.shape[0] else ring.eye(a)
            if not same_span(hstack(ring, a, K, RA), hstack(ring, a, I, RA), ring):
                return Report(Violation("exactness", ((p, q),), "ker j != im i"), n)
    return Report(None, n)


def check_conditions(t: AlgebraTower, arities=None) -> Report:
    """Condition (i): j Γ_A = Γ_C (j, ..., j); condition (ii): i Γ = Γ(.., i x_h, ..) for each slot h."""
    from itertools import product

    ring, o = t.ring, t.operad
    A, C = t.A, t.C
    MA, MC = A.module, C.module
    keys = t.keys_A()
    arities = range(1, o.arity_cap + 1) if arities is None else arities
    n_checks = 0

    def T(alg, k, bidegs):
        M = alg.module
        tt = alg.tensor(k, bidegs)
        if tt is None:
            return ring.zeros((M.rank(*alg.out_bidegree(k, bidegs)),) + tuple(M.rank(*b) for b in bidegs))
        return tt

    for n in arities:
        for bidegs in product(keys, repeat=n):
            for k in range(o.dim(n)):
                out = A.out_bidegree(k, bidegs)
                ra, rc = MA.rank(*out), MC.rank(*out)
                up = (out[0] + 1, out[1])
                if ra == 0 and rc == 0 and MA.rank(*up) == 0:
                    continue
                base = T(A, k, bidegs)
                label = o.basis[n][k]
                # (i)
                if rc:
                    lhs = ring.tensordot(t.j.block(*out), base, axes=([1], [0]))
                    rhs = T(C, k, bidegs)
                    for h, b in enumerate(bidegs):
                        rhs = np.moveaxis(ring.tensordot(rhs, t.j.block(*b), axes=([h + 1], [0])), -1, h + 1)
                    n_checks += 1
                    if not MC.is_zero_at(*out, _flat(ring.sub(lhs, rhs))):
                        return Report(Violation("condition_i", (label, bidegs)), n_checks)
                # (ii), one slot at a time
                if MA.rank(*up) == 0:
                    continue
                lhs = ring.tensordot(t.i.block(*out), base, axes=([1], [0]))
                for h, b in enumerate(bidegs):
                    shifted = list(bidegs)
                    shifted[h] = (b[0] + 1, b[1])
                    rhs = np.moveaxis(ring.tensordot(T(A, k, tuple(shifted)), t.i.block(*b), axes=([h + 1], [0])),
                                      -1, h + 1)
                    n_checks += 1
                    if not MA.is_zero_at(*up, _flat(ring.sub(lhs, rhs))):
                        return Report(Violation("condition_ii", (label, bidegs, f"slot {h + 1}")), n_checks)
    return Report(None, n_checks)


def _flat(x):
    return x.reshape(x.shape[0], int(np.prod(x.shape[1:], dtype=np.int64)))


def _check_policy(t: AlgebraTower) -> Report:
    ring = t.ring
    n = 0
    if not t.repeat:
        for (p, q) in t.keys_A():
            n += 1
            if p == t.p_max and not ring.is_zero(ring.sub(t.i.block(p, q), ring.eye(t.A.module.rank(p, q)))):
                return Report(Violation("extension_policy", ((p, q),), "i must be the identity at p_max"), n)
        for (p, q) in t.C.module.support:
            n += 1
            if p > t.p_max:
                return Report(Violation("extension_policy", ((p, q),), "C must vanish above p_max"), n)
    return Report(None, n)


def _named_algebra_check(alg, keys, arities):
    rep = check_algebra(alg, keys, arities)
    if rep:
        return rep
    v = rep.violation
    return Report(Violation(v.axiom, (alg.name,) + tuple(v.where), v.detail), rep.checked)


def tower_steps(t: AlgebraTower, algebras: bool = True, arities=None) -> list:
    """The checks behind ``check_tower`` as (name, thunk) pairs, in order."""
    A, C = t.A.carrier, t.C.carrier
    keys_A, keys_C = t.keys_A(), t.keys_C()
    steps = [
        ("complex A", lambda: check_complex(A)),
        ("complex C", lambda: check_complex(C)),
        ("chain map i", lambda: check_chain_map(t.i, A, A, keys_A)),
        ("chain map j", lambda: check_chain_map(t.j, A, C, keys_A)),
        ("extension policy", lambda: _check_policy(t)),
        ("exactness", lambda: check_exactness(t)),
    ]
    if algebras:
        steps += [
            ("algebra A", lambda: _named_algebra_check(t.A, keys_A, arities)),
            ("algebra C", lambda: _named_algebra_check(t.C, keys_C, arities)),
        ]
    steps.append(("conditions (i)/(ii)", lambda: check_conditions(t, arities)))
    return steps


def check_tower(t: AlgebraTower, algebras: bool = True, arities=None) -> Report:
    """Complexes, chain maps, clamps, exactness, the algebra laws and conditions (i)/(ii)."""
    total = 0
    for _, step in tower_steps(t, algebras, arities):
        rep = step()
        total += rep.checked
        if not rep:
            return Report(rep.violation, total)
    return Report(None, total)


# ---------------------------------------------------------------------------
# level one: D^1 = H(A), E^1 = H(C)


class FirstData:
    """Homology of A and C with the induced maps i1, j1 and the connecting map k1.

    All matrices are in homology coordinates (normal-form generators).
    """

    def __init__(self, t: AlgebraTower):
        self.tower = t
        self.ring = t.ring
        self.HA = homology(t.A.carrier)
        self.HC = homology(t.C.carrier)
        self._cache = {}

    def _get(self, name, p, q, fn):
        key = (name, p, q)
        v = self._cache.get(key)
        if v is None:
            v = self._cache[key] = fn(p, q)
        return v

    def D(self, p, q) -> Subquotient:
        return self.HA.module(p, q)

    def E(self, p, q) -> Subquotient:
        return self.HC.module(p, q)

    def i1(self, p, q):
        """H(A)_{p,q} -> H(A)_{p+1,q}."""
        def f(p, q):
            src, tgt = self.D(p, q), self.D(p + 1, q)
            if src.ngens == 0 or tgt.ngens == 0:
                return self.ring.zeros((tgt.ngens, src.ngens))
            return tgt.project(self.ring.matmul(self.tower.i.block(p, q), src.gens))
        return self._get("i", p, q, f)

    def j1(self, p, q):
        """H(A)_{p,q} -> H(C)_{p,q}."""
        def f(p, q):
            src, tgt = self.D(p, q), self.E(p, q)
            if src.ngens == 0 or tgt.ngens == 0:
                return self.ring.zeros((tgt.ngens, src.ngens))
            return tgt.project(self.ring.matmul(self.tower.j.block(p, q), src.gens))
        return self._get("j", p, q, f)

    def ipow(self, p, q, n):
        """i^n : H(A)_{p,q} -> H(A)_{p+n,q} in homology coordinates."""
        key = ("ipow", p, q, n)
        M = self._cache.get(key)
        if M is None:
            if n <= 0:
                M = self.ring.eye(self.D(p, q).ngens)
            else:
                amb = coordinate_module(self.D(p + n, q))
                M = amb.reduce(self.ring.matmul(self.i1(p + n - 1, q), self.ipow(p, q, n - 1)))
            self._cache[key] = M
        return M

    def k1(self, p, q):
        """The connecting map H(C)_{p,q} -> H(A)_{p-1,q-1}."""
        return self._get("k", p, q, lambda p, q: self.connect(p, q, self.E(p, q).gens))

    def connect(self, p, q, cycles):
        """k = i^{-1} d j^{-1} on cycle columns of C_{p,q}, in H(A)_{p-1,q-1} coordinates."""
        t, ring = self.tower, self.ring
        tgt = self.D(p - 1, q - 1)
        ncols = cycles.shape[1]
        if ncols == 0 or tgt.ngens == 0:
            return ring.zeros((tgt.ngens, ncols))
        MA, MC = t.A.module, t.C.module
        a = MA.rank(p, q)
        J = hstack(ring, MC.rank(p, q), t.j.block(p, q), _rel(ring, MC, p, q))
        try:
            lift = Solver(J, ring).solve(cycles)[:a]
        except NoSolution:
            raise LiftFailed(f"no j-preimage at {(p, q)}") from None
        da = ring.matmul(t.A.carrier.d.block(p, q), lift)
        b = MA.rank(p - 1, q - 1)
        I = hstack(ring, MA.rank(p, q - 1), t.i.block(p - 1, q - 1), _rel(ring, MA, p, q - 1))
        try:
            pre = Solver(I, ring).solve(da)[:b]
        except NoSolution:
            raise LiftFailed(f"d of a j-preimage is not in the image of i at {(p, q - 1)}") from None
        return tgt.project(pre)


def connecting(t: AlgebraTower, p: int, q: int, coords) -> np.ndarray:
    """k of a class in H(C)_{p,q} (given by coordinates), as coordinates in H(A)_{p-1,q-1}."""
    f = t.first()
    ring = t.ring
    v = ring.array(coords).reshape(-1, 1) if np.ndim(coords) == 1 else ring.array(coords)
    cyc = f.E(p, q).lift(v)
    out = f.connect(p, q, cyc)
    return f.D(p - 1, q - 1).reduce(out[:, 0] if np.ndim(coords) == 1 else out)


# ---------------------------------------------------------------------------
# couples in coordinates


def coordinate_module(sq: Subquotient) -> Subquotient:
    """The normal-form module of ``sq``: Z^g modulo its torsion orders."""
    return Subquotient.cyclic(sq.ring, sq.orders)


class Couple:
    """Level-r exact couple <E^r, D^r, i_r, j_r, k_r> in E^1/D^1 coordinates.

    ``E(p, q)`` and ``D(p, q)`` are Subquotients of the coordinate modules
    of H(C)_{p,q} and H(A)_{p,q}.  ``J(p, q)`` holds, for each generator of
    D^r_{p,q}, an E^1-representative of its image under j_r (which lands
    at (p - r + 1, q)).
    """

    def __init__(self, tower: AlgebraTower, r: int, parent: "Couple | None" = None):
        self.tower = tower
        self.r = r
        self.parent = parent
        self.ring = tower.ring
        self.first = tower.first()
        self._cache = {}

    # -- clamping -----------------------------------------------------------
    def p_top(self):
        t = self.tower
        return t.p_max + 2 * self.r if t.repeat else None

    def key(self, p, q):
        top = self.p_top()
        return (min(p, top) if top is not None else p, q)

    def _get(self, name, p, q, fn):
        k = (name,) + self.key(p, q)
        v = self._cache.get(k)
        if v is None:
            v = self._cache[k] = fn(*self.key(p, q))
        return v

    def keys(self) -> list:
        t = self.tower
        q0, q1 = t.q_range()
        top = self.p_top() if t.repeat else t.p_max
        return [(p, q) for p in range(t.p_min, top + 1) for q in range(q0, q1 + 1)]

    # -- modules ------------------------------------------------------------
    def E(self, p, q) -> Subquotient:
        return self._get("E", p, q, self._E)

    def D(self, p, q) -> Subquotient:
        return self._get("D", p, q, self._D)

    def J(self, p, q) -> np.ndarray:
        return self._get("J", p, q, self._J)

    def _E(self, p, q):
        if self.parent is None:
            return coordinate_module(self.first.E(p, q))
        c, ring = self.parent, self.ring
        r = c.r
        Er = c.E(p, q)
        g = Er.ambient_rank
        if g == 0:
            return Er
        out = c.d(p, q)
        K = coord_kernel(out, Er, c.E(p - r, q - 1))
        inc = c.d(p + r, q + 1)
        Z = hstack(ring, g, Er.lift(K) if K.shape[1] else None, Er.Bb)
        B = hstack(ring, g, Er.lift(inc) if inc.shape[1] else None, Er.Bb)
        return Subquotient(ring, g, Z, B)

    def _D(self, p, q):
        if self.parent is None:
            return coordinate_module(self.first.D(p, q))
        c, ring = self.parent, self.ring
        amb = coordinate_module(self.first.D(p, q))
        g = amb.ambient_rank
        prev = c.D(p - 1, q)
        img = ring.matmul(self.first.i1(p - 1, q), prev.gens) if prev.ngens and g else None
        return Subquotient(ring, g, hstack(ring, g, img, amb.Bb), amb.Bb)

    def _J(self, p, q):
        ring = self.ring
        if self.parent is None:
            return self.first.j1(p, q)
        c = self.parent
        Dn = self.D(p, q)
        prev = c.D(p - 1, q)
        amb = coordinate_module(self.first.D(p, q))
        rows = self.first.E(p - self.r + 1, q).ngens
        if Dn.ngens == 0:
            return ring.zeros((rows, 0))
        F = ring.matmul(self.first.i1(p - 1, q), prev.gens)
        try:
            coeffs = coord_solve(F, amb, Dn.gens)
        except NoSolution:
            raise PreimageFailed(f"generator of D^{self.r} at {(p, q)} is not in i(D^{c.r})") from None
        return ring.matmul(c.J(p - 1, q), coeffs)

    # -- maps (coordinates with respect to the generators) --------------------
    def i_map(self, p, q):
        def f(p, q):
            src, tgt = self.D(p, q), self.D(p + 1, q)
            if src.ngens == 0 or tgt.ngens == 0:
                return self.ring.zeros((tgt.ngens, src.ngens))
            return tgt.project(self.ring.matmul(self.first.i1(p, q), src.gens))
        return self._get("i", p, q, f)

    def j_map(self, p, q):
        def f(p, q):
            src, tgt = self.D(p, q), self.E(p - self.r + 1, q)
            if src.ngens == 0 or tgt.ngens == 0:
                return self.ring.zeros((tgt.ngens, src.ngens))
            return tgt.project(self.J(p, q))
        return self._get("j", p, q, f)

    def k_map(self, p, q):
        def f(p, q):
            src, tgt = self.E(p, q), self.D(p - 1, q - 1)
            if src.ngens == 0 or tgt.ngens == 0:
                return self.ring.zeros((tgt.ngens, src.ngens))
            return tgt.project(self.ring.matmul(self.first.k1(p, q), src.gens))
        return self._get("k", p, q, f)

    def d(self, p, q):
        """d_r = j_r k_r : E^r_{p,q} -> E^r_{p-r,q-1}."""
        def f(p, q):
            tgt = self.E(p - self.r, q - 1)
            K = self.k_map(p, q)
            if K.shape[1] == 0 or tgt.ngens == 0:
                return self.ring.zeros((tgt.ngens, K.shape[1]))
            return tgt.reduce(self.ring.matmul(self.j_map(p - 1, q - 1), K))
        return self._get("d", p, q, f)

    def d_map(self, name: str = "") -> GradedMap:
        carrier = self.carrier()
        return GradedMap(carrier, carrier, (-self.r, -1), compute=lambda p, q: self.d(p, q), name=name or f"d_{self.r}")

    def carrier(self) -> BigradedModule:
        """E^r as a bigraded module on its generators (cached)."""
        key = ("carrier",)
        if key not in self._cache:
            self._cache[key] = page_module(self.ring, self.E, self.keys(), self.p_top(), f"E{self.r}")
        return self._cache[key]

    def check_exact(self) -> Report:
        """im = ker at the three corners of the couple, and d_r d_r = 0."""
        ring, r = self.ring, self.r
        n = 0
        for p, q in self.keys():
            corners = [
                # D_{p-1,q} --i--> D_{p,q} --j--> E_{p-r+1,q}
                ("i/j", self.i_map(p - 1, q), self.j_map(p, q), self.D(p - 1, q), self.D(p, q),
                 self.E(p - r + 1, q)),
                # D_{p,q} --j--> E_{p-r+1,q} --k--> D_{p-r,q-1}
                ("j/k", self.j_map(p, q), self.k_map(p - r + 1, q), self.D(p, q), self.E(p - r + 1, q),
                 self.D(p - r, q - 1)),
                # E_{p,q} --k--> D_{p-1,q-1} --i--> D_{p,q-1}
                ("k/i", self.k_map(p, q), self.i_map(p - 1, q - 1), self.E(p, q), self.D(p - 1, q - 1),
                 self.D(p, q - 1)),
            ]
            for name, f, g, X, Y, W in corners:
                n += 1
                if not _exact_at(ring, f, g, X, Y, W):
                    return Report(Violation("couple_exactness", ((p, q),), f"{name} at level {r}"), n)
            dd = ring.matmul(self.d(p - r, q - 1), self.d(p, q))
            n += 1
            if not ring.is_zero(self.E(p - 2 * r, q - 2).reduce(dd)):
                return Report(Violation("d_squared", ((p, q),), f"d_{r} o d_{r} != 0"), n)
        return Report(None, n)


def _exact_at(ring, f, g, X, Y, W) -> bool:
    """im(f: X -> Y) = ker(g: Y -> W) in coordinates."""
    if Y.ngens == 0:
        return True
    rel = relation_matrix(ring, Y.orders)
    K = coord_kernel(g, Y, W)
    im = f if f.shape[1] else None
    return same_span(hstack(ring, Y.ngens, im, rel), hstack(ring, Y.ngens, K if K.shape[1] else None, rel), ring)


def page_module(ring, E, keys, p_top, name) -> BigradedModule:
    labels, orders = {}, {}
    for key in keys:
        sq = E(*key)
        if sq.ngens:
            labels[key] = [f"e{g}" for g in range(sq.ngens)]
            orders[key] = sq.orders
    return BigradedModule(ring, labels, None if ring.is_field else orders, p_top=p_top, name=name)


def first_couple(t: AlgebraTower) -> Couple:
    return Couple(t, 1)


def derive(c: Couple) -> Couple:
    """The derived couple: D' = i(D), E' = H(E, d), j' through an i-preimage."""
    return Couple(c.tower, c.r + 1, parent=c)


__all__ = ["POLICIES", "AlgebraTower", "Couple", "FirstData", "LiftFailed", "PreimageFailed", "build_tower",
           "check_conditions", "check_exactness", "check_tower", "tower_steps", "connecting", "coordinate_module", "derive",
           "first_couple", "page_module"]
