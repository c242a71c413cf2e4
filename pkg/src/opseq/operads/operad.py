"""Operads in (graded) modules, stored by partial compositions.

Conventions
-----------
* ``P(n)`` for 1 <= n <= arity_cap has an ordered basis of homogeneous
  elements with internal degree ``degrees[n][k]``.
* Symmetric groups act on the right.  ``transpositions[n][h-1]`` is the
  matrix of ``v -> v . tau_h`` on column vectors, so ``v . (s o t)`` is
  computed by applying the matrix of ``s`` first.
* ``compositions[(m, n, i)]`` is a tensor ``T[k, a, b]`` with
  ``e_a o_i e_b = sum_k T[k, a, b] e_k`` (slots are 1-based).
* ``delta[n]`` is the differential (degree -1); zero when omitted.
"""
from __future__ import annotations

from itertools import product

import numpy as np

from ..linalg import NoSolution, Ring, Solver
from ..report import Report, Violation
from .perms import all_perms, block_perm, transposition, word


class UnsupportedArity(ValueError):
    pass


class Operad:
    def __init__(self, ring: Ring, basis: dict, degrees: dict, transpositions: dict, compositions: dict,
                 unit, delta: dict | None = None, arity_cap: int = 3, name: str = ""):
        self.ring = ring
        self.arity_cap = arity_cap
        self.name = name
        self.basis = {n: tuple(basis.get(n, ())) for n in range(1, arity_cap + 1)}
        self.degrees = {n: tuple(int(s) for s in degrees.get(n, ())) for n in range(1, arity_cap + 1)}
        for n in self.basis:
            if len(self.degrees[n]) != len(self.basis[n]):
                raise ValueError(f"P({n}) needs one degree per basis element")
        self.transpositions = {}
        for n in range(2, arity_cap + 1):
            mats = list(transpositions.get(n, ()))
            d = self.dim(n)
            if d and len(mats) != n - 1:
                raise ValueError(f"P({n}) needs {n - 1} transposition matrices")
            self.transpositions[n] = [ring.array(m).reshape(d, d) for m in mats] if d else [
                ring.zeros((0, 0)) for _ in range(n - 1)]
        self.compositions = {}
        for (m, n, i), T in compositions.items():
            if m + n - 1 > arity_cap:
                continue
            shape = (self.dim(m + n - 1), self.dim(m), self.dim(n))
            self.compositions[(m, n, i)] = ring.array(T).reshape(shape)
        self.unit = ring.array(unit).reshape(self.dim(1))
        self.delta = {}
        for n in range(1, arity_cap + 1):
            d = self.dim(n)
            D = (delta or {}).get(n)
            self.delta[n] = ring.zeros((d, d)) if D is None else ring.array(D).reshape(d, d)
        self._perm_cache = {}
        self._decomp = {}
        # homology operads remember how their basis lifts (see homology_operad)
        self.lifts = None
        self.parent = None

    # -- basics -----------------------------------------------------------
    def dim(self, n: int) -> int:
        return len(self.basis.get(n, ()))

    def degree(self, n: int, k: int) -> int:
        return self.degrees[n][k]

    def index(self, n: int, label: str) -> int:
        try:
            return self.basis[n].index(label)
        except ValueError:
            raise KeyError(f"{label!r} is not a basis element of P({n})") from None

    def element(self, n: int, label: str) -> np.ndarray:
        v = self.ring.zeros(self.dim(n))
        v[self.index(n, label)] = self.ring.coerce(1)
        return v

    def degree_of(self, n: int, v: np.ndarray) -> int | None:
        """Degree of a homogeneous vector (None for zero; ValueError if mixed)."""
        degs = {self.degrees[n][k] for k in np.nonzero(np.asarray(v) != 0)[0]}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("operad element is not homogeneous")
        return degs.pop()

    @property
    def has_differential(self) -> bool:
        return any(not self.ring.is_zero(D) for D in self.delta.values())

    def __repr__(self):
        dims = ", ".join(str(self.dim(n)) for n in range(1, self.arity_cap + 1))
        return f"Operad({self.name or '?'}; dims {dims}; {self.ring.name})"

    # -- structure maps ---------------------------------------------------
    def compose(self, m: int, i: int, a: np.ndarray, n: int, b: np.ndarray) -> np.ndarray:
        """a o_i b for a in P(m), b in P(n)."""
        if m + n - 1 > self.arity_cap:
            raise UnsupportedArity(f"arity {m + n - 1} exceeds the cap {self.arity_cap}")
        if not 1 <= i <= m:
            raise ValueError(f"slot {i} out of range for arity {m}")
        T = self.compositions.get((m, n, i))
        ring = self.ring
        if T is None or T.size == 0:
            return ring.zeros(self.dim(m + n - 1))
        return ring.matmul(ring.tensordot(T, b, axes=([2], [0])), a)

    def perm_matrix(self, n: int, s) -> np.ndarray:
        """Matrix of v -> v . s for a permutation s of range(n)."""
        s = tuple(s)
        key = (n, s)
        M = self._perm_cache.get(key)
        if M is None:
            ring = self.ring
            M = ring.eye(self.dim(n))
            # v . (t1 o t2 o ...) = ((v . t1) . t2) ...
            for h in word(s):
                M = ring.matmul(self.transpositions[n][h - 1], M)
            self._perm_cache[key] = M
        return M

    def act(self, n: int, v: np.ndarray, s) -> np.ndarray:
        return self.ring.matmul(self.perm_matrix(n, s), v)

    # -- decompositions used to derive algebra structure --------------------
    def decomposition(self, n: int, given: tuple):
        """Express each basis element of P(n) through simpler operations.

        Candidates are ``(e_a o_i e_b) . s`` for basis elements of lower
        arities and ``e_g . s`` for ``g`` in ``given``.  Returns, per basis
        index, a list of ``(coef, term)`` with ``term`` either
        ``("comp", m, a, i, k, b, s)`` or ``("perm", g, s)``; entries for
        ``given`` indices are ``None``.  Raises NoSolution when P(n) is not
        generated this way.
        """
        key = (n, tuple(given))
        if key in self._decomp:
            return self._decomp[key]
        ring = self.ring
        terms, cols = [], []
        perms = all_perms(n)
        for g in given:
            for s in perms:
                terms.append(("perm", g, s))
                cols.append(self.act(n, self.element_idx(n, g), s))
        for m in range(2, n):
            k = n - m + 1
            for a in range(self.dim(m)):
                for b in range(self.dim(k)):
                    for i in range(1, m + 1):
                        base = self.compose(m, i, self.element_idx(m, a), k, self.element_idx(k, b))
                        if ring.is_zero(base):
                            continue
                        for s in perms:
                            terms.append(("comp", m, a, i, k, b, s))
                            cols.append(self.act(n, base, s))
        out = []
        if cols:
            M = np.stack(cols, axis=1)
            solver = Solver(M, ring)
        for e in range(self.dim(n)):
            if e in given:
                out.append(None)
                continue
            if not cols:
                raise NoSolution(f"P({n}) has no decomposable elements")
            c = solver.solve(self.element_idx(n, e))
            out.append([(c[t], terms[t]) for t in np.nonzero(c != 0)[0]])
        self._decomp[key] = out
        return out

    def element_idx(self, n: int, k: int) -> np.ndarray:
        v = self.ring.zeros(self.dim(n))
        v[k] = self.ring.coerce(1)
        return v


# ---------------------------------------------------------------------------
# axiom checker (whole composition tensors are compared at once)


def _parity_signs(ring, degs_a, degs_b):
    """Matrix of (-1)**(|a| |b|) as ring elements."""
    S = np.array([[-1 if (x * y) % 2 else 1 for y in degs_b] for x in degs_a], dtype=object)
    return ring.array(S) if S.size else ring.zeros(S.shape)


def _first_nonzero(ring, diff):
    idx = np.argwhere(np.asarray(diff) != 0)
    return tuple(int(x) for x in idx[0]) if len(idx) else None


class _Checker:
    def __init__(self, o: Operad):
        self.o = o
        self.ring = o.ring
        self.n = 0

    def comp(self, m, n, i):
        o = self.o
        T = o.compositions.get((m, n, i))
        if T is None:
            return self.ring.zeros((o.dim(m + n - 1), o.dim(m), o.dim(n)))
        return T

    def differs(self, lhs, rhs):
        self.n += 1
        diff = self.ring.sub(lhs, rhs)
        return _first_nonzero(self.ring, diff)

    def labels(self, arities, idx):
        return tuple(self.o.basis[a][k] for a, k in zip(arities, idx))


def check_operad(o: Operad) -> Report:
    """Exhaustive check of the operad laws up to the arity cap."""
    ring, N = o.ring, o.arity_cap
    ck = _Checker(o)

    def fail(axiom, where, detail=""):
        return Report(Violation(axiom, where, detail), ck.n)

    if o.dim(1) == 0:
        return fail("unit", ("P(1)",), "P(1) is zero")
    if o.degree_of(1, o.unit) != 0:
        return fail("unit", ("P(1)",), "unit must be a nonzero degree-0 element")

    # symmetric group relations
    for n in range(2, N + 1):
        T = o.transpositions[n]
        I = ring.eye(o.dim(n))
        for h in range(1, n):
            M = T[h - 1]
            for b, a in zip(*np.nonzero(M != 0)):
                if o.degrees[n][b] != o.degrees[n][a]:
                    return fail("degree", (f"P({n})", f"tau_{h}", o.basis[n][a]), "action changes degree")
            if ck.differs(ring.matmul(M, M), I):
                return fail("involution", (f"P({n})", f"tau_{h}"), "tau_h squared is not the identity")
        for h in range(1, n - 1):
            A, B = T[h - 1], T[h]
            if ck.differs(ring.matmul(A, ring.matmul(B, A)), ring.matmul(B, ring.matmul(A, B))):
                return fail("braid", (f"P({n})", f"tau_{h}", f"tau_{h + 1}"))
        for h in range(1, n):
            for g in range(h + 2, n):
                A, B = T[h - 1], T[g - 1]
                if ck.differs(ring.matmul(A, B), ring.matmul(B, A)):
                    return fail("braid", (f"P({n})", f"tau_{h}", f"tau_{g}"), "distant transpositions do not commute")

    for (m, n, i), Tc in o.compositions.items():
        for k, a, b in zip(*np.nonzero(Tc != 0)):
            if o.degrees[m + n - 1][k] != o.degrees[m][a] + o.degrees[n][b]:
                return fail("degree", (f"o_{i}", (m, n), (o.basis[m][a], o.basis[n][b])),
                            "composition is not additive in degree")

    # unit laws
    for n in range(1, N + 1):
        I = ring.eye(o.dim(n))
        bad = ck.differs(ring.einsum("kua,u->ka", ck.comp(1, n, 1), o.unit), I)
        if bad:
            return fail("unit", ("1 o_1 p", n, o.basis[n][bad[1]]))
        for i in range(1, n + 1):
            bad = ck.differs(ring.einsum("kau,u->ka", ck.comp(n, 1, i), o.unit), I)
            if bad:
                return fail("unit", (f"p o_{i} 1", n, o.basis[n][bad[1]]))

    # associativity (sequential and parallel)
    for m, n, l in product(range(1, N + 1), repeat=3):
        if m + n + l - 2 > N or not (o.dim(m) and o.dim(n) and o.dim(l)):
            continue
        S = _parity_signs(ring, o.degrees[n], o.degrees[l])
        for i in range(1, m + 1):
            for j in range(1, m + n):
                # (x o_i y) o_j z  as  T[k, a, b, c]
                lhs = ring.einsum("ktc,tab->kabc", ck.comp(m + n - 1, l, j), ck.comp(m, n, i))
                if i <= j <= i + n - 1:
                    rhs = ring.einsum("kau,ubc->kabc", ck.comp(m, n + l - 1, i), ck.comp(n, l, j - i + 1))
                    kind = "sequential"
                else:
                    if j < i:
                        rhs = ring.einsum("kub,uac->kabc", ck.comp(m + l - 1, n, i + l - 1), ck.comp(m, l, j))
                    else:
                        rhs = ring.einsum("kub,uac->kabc", ck.comp(m + l - 1, n, i), ck.comp(m, l, j - n + 1))
                    rhs = ring.reduce(rhs * S[None, None, :, :])
                    kind = "parallel"
                bad = ck.differs(lhs, rhs)
                if bad:
                    where = (f"{kind} associativity", (m, n, l), (i, j), ck.labels((m, n, l), bad[1:]))
                    return fail("associativity", where)

    # equivariance
    for m, n in product(range(1, N + 1), repeat=2):
        if m + n - 1 > N or not (o.dim(m) and o.dim(n)):
            continue
        for i in range(1, m + 1):
            C = ck.comp(m, n, i)
            for h in range(1, n):
                lhs = ring.einsum("kau,ub->kab", C, o.transpositions[n][h - 1])
                rhs = ring.einsum("ku,uab->kab", o.transpositions[m + n - 1][h + i - 2], C)
                bad = ck.differs(lhs, rhs)
                if bad:
                    return fail("equivariance", ("p o_i (q . tau)", (m, n), i, h, ck.labels((m, n), bad[1:])))
            for h in range(1, m):
                s = transposition(m, h)
                lhs = ring.einsum("kub,ua->kab", C, o.transpositions[m][h - 1])
                P = o.perm_matrix(m + n - 1, block_perm(s, i, n))
                rhs = ring.einsum("ku,uab->kab", P, ck.comp(m, n, s[i - 1] + 1))
                bad = ck.differs(lhs, rhs)
                if bad:
                    return fail("equivariance", ("(p . tau) o_i q", (m, n), i, h, ck.labels((m, n), bad[1:])))

    # differential: degree -1, square zero, equivariant, Leibniz
    for n in range(1, N + 1):
        D = o.delta[n]
        for k, a in zip(*np.nonzero(D != 0)):
            if o.degrees[n][k] != o.degrees[n][a] - 1:
                return fail("delta_degree", (n, o.basis[n][a]))
        if ck.differs(ring.matmul(D, D), ring.zeros(D.shape)):
            return fail("delta_squared", (f"P({n})",))
        for h in range(1, n):
            M = o.transpositions[n][h - 1]
            if ck.differs(ring.matmul(D, M), ring.matmul(M, D)):
                return fail("delta_equivariance", (f"P({n})", f"tau_{h}"))
    if not ring.is_zero(ring.matmul(o.delta[1], o.unit)):
        return fail("delta_unit", ("P(1)",))
    for m, n in product(range(1, N + 1), repeat=2):
        if m + n - 1 > N or not (o.dim(m) and o.dim(n)):
            continue
        sx = ring.array([-1 if s % 2 else 1 for s in o.degrees[m]])
        for i in range(1, m + 1):
            C = ck.comp(m, n, i)
            lhs = ring.einsum("ku,uab->kab", o.delta[m + n - 1], C)
            first = ring.einsum("kub,ua->kab", C, o.delta[m])
            second = ring.einsum("kau,ub->kab", C, o.delta[n])
            rhs = ring.add(first, ring.reduce(second * sx[None, :, None]))
            bad = ck.differs(lhs, rhs)
            if bad:
                return fail("leibniz", (f"o_{i}", (m, n), ck.labels((m, n), bad[1:])))
    return Report(None, ck.n)
