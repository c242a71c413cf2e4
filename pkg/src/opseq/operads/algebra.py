"""Algebras over an operad, carried by a bigraded dg module.

Structure maps are stored as tensors: ``tables[(k, bidegs)]`` is an array
``T[out, e_1, ..., e_n]`` giving Gamma(pi_k; e_1, ..., e_n) for inputs at
the bidegrees ``bidegs``.  The output lives at (sum p_i, s + sum q_i) where
s is the degree of pi_k.  Basis operations without explicit tables are
either declared zero (``given``) or derived from lower arities through the
operad's decomposition of P(n) into composites and permutations.

Koszul signs use the vertical degree q of each input (see
``opseq.graded.sign_degree``).
"""
from __future__ import annotations

import math

from itertools import product

import numpy as np

from ..graded import DGBigradedModule, koszul, sign_degree
from ..linalg import NoSolution, relation_matrix
from ..report import Report, Violation
from .operad import Operad, UnsupportedArity
from .perms import koszul_sign, transposition


class ArityOutOfRange(ValueError):
    pass


class OperadAlgebra:
    """An algebra over ``operad`` with carrier ``carrier``.

    Parameters
    ----------
    tables : dict
        ``{(k, bidegs): tensor}`` for basis operation index ``k`` of arity
        ``len(bidegs)``; inputs must lie in the stored (unclamped) range.
    given : dict, optional
        ``{n: set of basis indices}`` whose tables are authoritative (missing
        tables mean zero).  Defaults to the indices present in ``tables``.
    transport : callable, optional
        ``transport(src, dst, T)`` moves a tensor whose output axis lives at
        bidegree ``src`` to bidegree ``dst``; needed when clamped inputs shift
        the output to a different stored component.
    compute : callable, optional
        ``compute(k, bidegs)`` returns the structure tensor for any inputs;
        used by algebras induced on homology and on pages.  Overrides
        ``tables``.
    """

    def __init__(self, operad: Operad, carrier: DGBigradedModule, tables: dict | None = None,
                 given: dict | None = None, transport=None, compute=None, name: str = ""):
        self.operad = operad
        self.carrier = carrier
        self.module = carrier.module
        self.ring = carrier.ring
        if operad.ring != self.ring:
            raise ValueError("operad and carrier must share a ring")
        self.name = name
        self.tables = {}
        for (k, bidegs), T in (tables or {}).items():
            bidegs = tuple(tuple(b) for b in bidegs)
            self.tables[(k, bidegs)] = T
        self.given = {n: set() for n in range(1, operad.arity_cap + 1)}
        for (k, bidegs) in self.tables:
            self.given[len(bidegs)].add(k)
        for n, ks in (given or {}).items():
            self.given[n].update(ks)
        # non-unit unary operations are never derived
        self._unit_idx = self._unit_index()
        self.given[1].update(k for k in range(operad.dim(1)) if k != self._unit_idx)
        self.transport = transport
        self.compute = compute
        self._cache = {}

    def _unit_index(self):
        nz = np.nonzero(np.asarray(self.operad.unit) != 0)[0]
        if len(nz) == 1 and self.operad.unit[nz[0]] == 1:
            return int(nz[0])
        return None

    # -- bookkeeping -------------------------------------------------------
    def out_bidegree(self, k: int, bidegs) -> tuple:
        n = len(bidegs)
        s = self.operad.degrees[n][k]
        return (sum(b[0] for b in bidegs), s + sum(b[1] for b in bidegs))

    def out_bidegree_vec(self, n: int, op, bidegs) -> tuple:
        """Output bidegree for a homogeneous operad vector ``op`` of arity n."""
        s = self.operad.degree_of(n, op)
        return (sum(b[0] for b in bidegs), (s or 0) + sum(b[1] for b in bidegs))

    def _clamp(self, b):
        return self.module.key(*b)

    def _move(self, src, dst, T):
        if self._clamp(src) == self._clamp(dst):
            return T
        if self.transport is None:
            raise ValueError(f"no transport from {src} to {dst}")
        return self.transport(src, dst, T)

    # -- structure tensors ---------------------------------------------------
    def tensor(self, k: int, bidegs) -> np.ndarray | None:
        """Gamma(e_k; -) on the inputs ``bidegs`` as ``T[out, e_1..e_n]``; None when zero."""
        try:
            return self._cache[(k, bidegs)]
        except (KeyError, TypeError):
            pass
        bidegs = tuple(tuple(b) for b in bidegs)
        key = (k, bidegs)
        if key in self._cache:
            return self._cache[key]
        T = self._tensor(k, bidegs)
        if T is not None and self.ring.is_zero(T):
            T = None
        self._cache[key] = T
        return T

    def _tensor(self, k, bidegs):
        n = len(bidegs)
        if n > self.operad.arity_cap:
            raise ArityOutOfRange(f"arity {n} exceeds the cap {self.operad.arity_cap}")
        M, ring = self.module, self.ring
        ranks = [M.rank(*b) for b in bidegs]
        if 0 in ranks:
            return None
        out = self.out_bidegree(k, bidegs)
        if M.rank(*out) == 0:
            return None
        if self.compute is not None:
            return self.compute(k, bidegs)
        clamped = tuple(self._clamp(b) for b in bidegs)
        if clamped != bidegs:
            T = self.tensor(k, clamped)
            if T is None:
                return None
            return self._move(self.out_bidegree(k, clamped), out, T)
        if n == 1 and k == self._unit_idx:
            return ring.eye(ranks[0])
        if (k, bidegs) in self.tables:
            return self.tables[(k, bidegs)]
        if k in self.given[n]:
            return None
        return self._derived(k, bidegs)

    def _derived(self, k, bidegs):
        n = len(bidegs)
        o, ring = self.operad, self.ring
        try:
            terms = o.decomposition(n, tuple(sorted(self.given[n])))[k]
        except NoSolution:
            raise ValueError(f"P({n}) element {o.basis[n][k]!r} needs explicit tables") from None
        degs = [sign_degree(b) for b in bidegs]
        out_rank = self.module.rank(*self.out_bidegree(k, bidegs))
        total = ring.zeros((out_rank,) + tuple(self.module.rank(*b) for b in bidegs))
        for coef, term in terms:
            if term[0] == "perm":
                _, g, s = term
                T = self._permuted(g, s, bidegs, degs, n)
            else:
                _, m, a, i, kk, b, s = term
                T = self._composite_permuted(m, a, i, kk, b, s, bidegs, degs)
            if T is not None:
                total = ring.add(total, ring.scale(T, coef))
        return total

    def _permuted(self, g, s, bidegs, degs, n):
        # Gamma(e_g . s; x) = eps * Gamma(e_g; x_{s^-1(1)}, ...)
        sinv = [0] * n
        for j, v in enumerate(s):
            sinv[v] = j
        perm_b = tuple(bidegs[sinv[t]] for t in range(n))
        T = self.tensor(g, perm_b)
        if T is None:
            return None
        T = np.transpose(T, [0] + [1 + s[j] for j in range(n)])
        return self.ring.scale(T, koszul_sign(s, degs))

    def _composite_permuted(self, m, a, i, kk, b, s, bidegs, degs):
        n = len(bidegs)
        sinv = [0] * n
        for j, v in enumerate(s):
            sinv[v] = j
        y = tuple(bidegs[sinv[t]] for t in range(n))
        T = self.composite(m, a, i, kk, b, y)
        if T is None:
            return None
        T = np.transpose(T, [0] + [1 + s[j] for j in range(n)])
        return self.ring.scale(T, koszul_sign(s, degs))

    def composite(self, m, a, i, kk, b, y):
        """Gamma(e_a o_i e_b; y) through nested structure maps, with its sign."""
        return _nested(self, m, a, i, kk, b, y, sign_degree)

    # -- evaluation ----------------------------------------------------------
    def act(self, op: np.ndarray, xs) -> tuple:
        """Gamma(op; x_1, ..., x_n) for homogeneous inputs ``xs = [(bidegree, vector), ...]``.

        Returns ``(bidegree, vector)``.
        """
        n = len(xs)
        if n < 1 or n > self.operad.arity_cap:
            raise ArityOutOfRange(f"arity {n} is outside 1..{self.operad.arity_cap}")
        ring, o = self.ring, self.operad
        op = ring.array(op).reshape(o.dim(n))
        s = o.degree_of(n, op)
        bidegs = tuple(tuple(b) for b, _ in xs)
        out = (sum(b[0] for b in bidegs), (s or 0) + sum(b[1] for b in bidegs))
        res = ring.zeros(self.module.rank(*out))
        if s is None:
            return out, res
        for k in np.nonzero(np.asarray(op) != 0)[0]:
            T = self.tensor(int(k), bidegs)
            if T is None:
                continue
            for _, v in reversed(xs):
                T = ring.tensordot(T, v, axes=([T.ndim - 1], [0]))
            res = ring.add(res, ring.scale(T, op[k]))
        return out, self.module.reduce(*out, res)

    def gamma(self, label: str, *xs):
        """Convenience: act with a basis operation named by its label."""
        n = len(xs)
        return self.act(self.operad.element(n, label), list(xs))

    def __repr__(self):
        return f"OperadAlgebra({self.name or '?'} over {self.operad.name})"


# ---------------------------------------------------------------------------
# verification


def _flat(x):
    return x.reshape(x.shape[0], math.prod(x.shape[1:]))


def _input_tuples(a: OperadAlgebra, n: int, keys):
    """Input bidegree tuples whose checks can be nonzero."""
    M, o = a.module, a.operad
    dp = a.carrier.d.bidegree[0]
    degs = set(o.degrees[n]) or {0}
    for bidegs in product(keys, repeat=n):
        P = sum(b[0] for b in bidegs)
        Q = sum(b[1] for b in bidegs)
        if any(M.rank(P, s + Q) or M.rank(P + dp, s + Q - 1) for s in degs):
            yield bidegs


def _contract_axis(ring, T, axis, Mtx):
    """Replace index ``axis`` of T by Mtx applied to it: T'[..., j, ...] = sum_i T[..., i, ...] Mtx[i, j]."""
    R = ring.tensordot(T, Mtx, axes=([axis], [0]))
    return np.moveaxis(R, -1, axis)


AXIOMS = ("well_defined", "equivariance", "derivation", "associativity", "unit")


def check_algebra(a: OperadAlgebra, keys=None, arities=None, grading: str = "vertical",
                  axioms=AXIOMS) -> Report:
    """Unit, equivariance, associativity and derivation laws on all basis tuples.

    The derivation relation uses the carrier's differential, whatever its
    bidegree.  ``grading="total"`` uses p + q for every Koszul sign instead
    of q; it exists to exhibit why the vertical convention is used.
    """
    o, ring, M = a.operad, a.ring, a.module
    d = a.carrier.d
    dp, dq = d.bidegree
    axioms = set(axioms)
    keys = M.support if keys is None else keys
    arities = range(1, o.arity_cap + 1) if arities is None else arities
    sd = (lambda b: b[1]) if grading == "vertical" else (lambda b: b[0] + b[1])
    n_checks = 0

    def zeros_for(k, bidegs):
        return ring.zeros((M.rank(*a.out_bidegree(k, bidegs)),) + tuple(M.rank(*b) for b in bidegs))

    def T(k, bidegs):
        t = a.tensor(k, bidegs)
        return zeros_for(k, bidegs) if t is None else t

    def same(out, lhs, rhs):
        return M.is_zero_at(*out, ring.sub(lhs, rhs))

    def fail(axiom, where, detail=""):
        return Report(Violation(axiom, where, detail), n_checks)

    def labels(n, k):
        return o.basis[n][k]

    for n in arities:
        for bidegs in _input_tuples(a, n, keys):
            degs = [sd(b) for b in bidegs]
            for k in range(o.dim(n)):
                out = a.out_bidegree(k, bidegs)
                base = T(k, bidegs)
                # relations of torsion inputs map to relations
                for h, b in enumerate(bidegs):
                    rel = relation_matrix(ring, M.orders(*b))
                    if rel.shape[1] and "well_defined" in axioms:
                        n_checks += 1
                        img = _contract_axis(ring, base, h + 1, rel)
                        if not M.is_zero_at(*out, _flat(img)):
                            return fail("well_defined", (labels(n, k), bidegs, f"slot {h + 1}"))
                # equivariance on adjacent transpositions
                for h in range(1, n if "equivariance" in axioms else 1):
                    col = o.transpositions[n][h - 1][:, k]
                    sw = list(bidegs)
                    sw[h - 1], sw[h] = sw[h], sw[h - 1]
                    n_checks += 1
                    terms = [int(k2) for k2 in np.nonzero(col != 0)[0] if a.tensor(int(k2), bidegs) is not None]
                    if not terms and a.tensor(k, tuple(sw)) is None:
                        continue  # both sides vanish
                    n_checks -= 1
                    lhs = zeros_for(k, bidegs)
                    for k2 in terms:
                        lhs = ring.add(lhs, ring.scale(T(k2, bidegs), col[k2]))
                    perm = list(range(n + 1))
                    perm[h], perm[h + 1] = perm[h + 1], perm[h]
                    rhs = np.transpose(T(k, tuple(sw)), perm)
                    if (degs[h - 1] * degs[h]) % 2:
                        rhs = ring.scale(rhs, -1)
                    n_checks += 1
                    if not same(out, _flat(lhs), _flat(rhs)):
                        return fail("equivariance", (labels(n, k), f"tau_{h}", bidegs))
                # derivation relation
                if "derivation" not in axioms:
                    continue
                col = o.delta[n][:, k]
                lowered_all = []
                for h, b in enumerate(bidegs):
                    lowered = list(bidegs)
                    lowered[h] = (b[0] + dp, b[1] + dq)
                    lowered_all.append(tuple(lowered))
                if (a.tensor(k, bidegs) is None and not np.any(col != 0)
                        and all(M.rank(*lw[h]) == 0 or a.tensor(k, lw) is None for h, lw in enumerate(lowered_all))):
                    n_checks += 1  # every term vanishes
                    continue
                dout = d.block(*out)
                lhs = ring.tensordot(dout, base, axes=([1], [0])) if base.size else ring.zeros(
                    (M.rank(out[0] + dp, out[1] + dq),) + base.shape[1:])
                col = o.delta[n][:, k]
                rhs = ring.zeros(lhs.shape)
                for k2 in np.nonzero(col != 0)[0]:
                    rhs = ring.add(rhs, ring.scale(T(int(k2), bidegs), col[k2]))
                s = o.degrees[n][k]
                for h, b in enumerate(bidegs):
                    lowered = list(bidegs)
                    lowered[h] = (b[0] + dp, b[1] + dq)
                    if M.rank(*lowered[h]) == 0:
                        continue
                    term = _contract_axis(ring, T(k, tuple(lowered)), h + 1, d.block(*b))
                    sgn = koszul(s + sum(degs[:h]))
                    rhs = ring.add(rhs, ring.scale(term, sgn) if sgn < 0 else term)
                n_checks += 1
                dout_b = (out[0] + dp, out[1] + dq)
                if not same(dout_b, _flat(lhs), _flat(rhs)):
                    return fail("derivation", (labels(n, k), bidegs))
            # associativity: Gamma(pi o_i rho; x) = sign Gamma(pi; .., Gamma(rho; ..), ..)
            for m in range(1, n + 1 if "associativity" in axioms else 1):
                kk = n - m + 1
                for i in range(1, m + 1):
                    C = o.compositions.get((m, kk, i))
                    if C is None:
                        continue
                    for pa in range(o.dim(m)):
                        for rb in range(o.dim(kk)):
                            if (m == 1 and pa == a._unit_idx) or (kk == 1 and rb == a._unit_idx):
                                continue
                            col = C[:, pa, rb]
                            nz = [int(c) for c in np.nonzero(col != 0)[0] if a.tensor(int(c), bidegs) is not None]
                            inner = a.tensor(rb, bidegs[i - 1:i - 1 + kk])
                            if not nz and inner is None:
                                n_checks += 1  # both sides vanish
                                continue
                            comp_deg = o.degrees[m][pa] + o.degrees[kk][rb]
                            out = (sum(b[0] for b in bidegs), comp_deg + sum(b[1] for b in bidegs))
                            shape = (M.rank(*out),) + tuple(M.rank(*b) for b in bidegs)
                            lhs = ring.zeros(shape)
                            for c in nz:
                                lhs = ring.add(lhs, ring.scale(T(int(c), bidegs), col[c]))
                            rhs = _nested(a, m, pa, i, kk, rb, bidegs, sd)
                            if rhs is None:
                                rhs = ring.zeros(shape)
                            n_checks += 1
                            if not same(out, _flat(lhs), _flat(rhs)):
                                return fail("associativity", ((labels(m, pa), f"o_{i}", labels(kk, rb)), bidegs))
    # unit acts as the identity when it is a combination of basis elements
    if a._unit_idx is None and 1 in arities and "unit" in axioms:
        for b in keys:
            out = b
            acc = ring.zeros((M.rank(*b), M.rank(*b)))
            for k in np.nonzero(np.asarray(o.unit) != 0)[0]:
                acc = ring.add(acc, ring.scale(T(int(k), (b,)), o.unit[k]))
            n_checks += 1
            if not same(out, acc, ring.eye(M.rank(*b))):
                return fail("unit", (b,))
    return Report(None, n_checks)


def _nested(a, m, pa, i, kk, rb, bidegs, sd):
    ring, o = a.ring, a.operad
    inner_in = bidegs[i - 1:i - 1 + kk]
    inner = a.tensor(rb, inner_in)
    if inner is None:
        return None
    inner_out = a.out_bidegree(rb, inner_in)
    outer_in = bidegs[:i - 1] + (inner_out,) + bidegs[i - 1 + kk:]
    outer = a.tensor(pa, outer_in)
    if outer is None:
        return None
    T = ring.tensordot(outer, inner, axes=([i], [0]))
    last = list(range(T.ndim - kk, T.ndim))
    T = np.moveaxis(T, last, list(range(i, i + kk)))
    sgn = koszul(o.degrees[kk][rb] * sum(sd(v) for v in bidegs[:i - 1]))
    return ring.scale(T, sgn) if sgn < 0 else T
