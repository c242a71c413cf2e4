"""Seeded generators of verified towers (and of mutated, deliberately invalid ones).

Filtered examples are square-zero extensions A = R + R.W of R = k[x]/(x^2)
by a random filtered complex W, with d(x) = 0, products 1.a = a, x.(1.w) =
x.w and all products of two elements of R.W zero.  A basis element has a
filtration degree; the tower is A_p = F_p A, i the inclusion, C_p =
F_p / F_{p-1} and j the projection.  Bockstein examples are integral
square-zero extensions Z.1 + M with i = multiplication by a prime.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..linalg import Ring, Solver
from ..operads import OperadAlgebra, lie
from ..graded import BigradedModule, DGBigradedModule, GradedMap
from .document import Side, TowerDocument

GENERATORS = ("filtered_dga", "bockstein", "bicomplex", "random", "collapsed", "trivial", "mutation")


@dataclass
class Element:
    label: str
    q: int
    filt: int


class FilteredAlgebra:
    """A finite dg algebra with a multiplicative, d-compatible filtration on its basis.

    ``D`` is the differential on the whole basis; ``mult(a, b)`` returns the
    product of basis elements ``a`` and ``b`` as a dict {index: coefficient}.
    ``twist(side, stages, a, b)`` (default 1) rescales a structure constant
    and is used only to build mutated towers.
    """

    def __init__(self, ring: Ring, elements, D, mult, window, operad="comm", arity_cap=3, name=""):
        self.ring = ring
        self.elements = list(elements)
        self.D = D
        self.mult = mult
        self.window = window
        self.operad = operad
        self.arity_cap = arity_cap
        self.name = name
        self.twist = None

    def indices(self, q, pred):
        return [k for k, e in enumerate(self.elements) if e.q == q and pred(e.filt)]

    def stage(self, p, q):
        return self.indices(q, lambda f: f <= p)

    def column(self, p, q):
        return self.indices(q, lambda f: f == p)

    def q_values(self):
        return sorted({e.q for e in self.elements})

    def document(self) -> TowerDocument:
        ring = self.ring
        p_min, p_max = self.window
        qs = self.q_values()
        A = Side(p_top=p_max)
        C = Side()
        for p in range(p_min, p_max + 1):
            for q in qs:
                st, col = self.stage(p, q), self.column(p, q)
                if st:
                    A.labels[(p, q)] = [self.elements[k].label for k in st]
                if col:
                    C.labels[(p, q)] = [self.elements[k].label for k in col]
        i_blocks, j_blocks = {}, {}
        for p in range(p_min, p_max + 1):
            for q in qs:
                st = self.stage(p, q)
                if not st:
                    continue
                src_d = self.stage(p, q - 1)
                if src_d:
                    A.d[(p, q)] = self.D[np.ix_(src_d, st)]
                if p < p_max:
                    nxt = self.stage(p + 1, q)
                    i_blocks[(p, q)] = _inclusion(ring, st, nxt)
                col = self.column(p, q)
                if col:
                    j_blocks[(p, q)] = _projection(ring, st, col)
                    lower = self.column(p, q - 1)
                    if lower:
                        C.d[(p, q)] = self.D[np.ix_(lower, col)]
        op2 = "mu2" if self.operad == "comm" else "12"
        keys_A = sorted(A.labels)
        for b1 in keys_A:
            for b2 in keys_A:
                out = (min(b1[0] + b2[0], p_max), b1[1] + b2[1])
                if out not in A.labels:
                    continue
                T = self._table(self.stage(*out), self.stage(*b1), self.stage(*b2), "A", (b1[0], b2[0]))
                if T is not None:
                    A.gamma[(op2, (b1, b2))] = T
        keys_C = sorted(C.labels)
        for b1 in keys_C:
            for b2 in keys_C:
                out = (b1[0] + b2[0], b1[1] + b2[1])
                if out not in C.labels:
                    continue
                T = self._table(self.column(*out), self.column(*b1), self.column(*b2), "C", (b1[0], b2[0]))
                if T is not None:
                    C.gamma[(op2, (b1, b2))] = T
        q_range = (min(qs), max(qs)) if qs else (0, 0)
        return TowerDocument(ring, self.window, q_range, "constant_above",
                             {"builtin": self.operad, "arity_cap": self.arity_cap}, A, C, i_blocks, j_blocks,
                             name=self.name)

    def _table(self, out_idx, idx1, idx2, side, stages):
        ring = self.ring
        pos = {k: n for n, k in enumerate(out_idx)}
        T = ring.zeros((len(out_idx), len(idx1), len(idx2)))
        nonzero = False
        for a_pos, a in enumerate(idx1):
            for b_pos, b in enumerate(idx2):
                for c, coef in self.mult(a, b).items():
                    if c not in pos:
                        continue  # projected away in the associated graded
                    if self.twist is not None:
                        coef = coef * self.twist(side, stages, a, b)
                    T[pos[c], a_pos, b_pos] = ring.coerce(coef)
                    nonzero = nonzero or ring.coerce(coef) != 0
        return T if nonzero else None


def _inclusion(ring, small, big):
    pos = {k: n for n, k in enumerate(big)}
    M = ring.zeros((len(big), len(small)))
    for n, k in enumerate(small):
        M[pos[k], n] = ring.coerce(1)
    return M


def _projection(ring, full, part):
    pos = {k: n for n, k in enumerate(full)}
    M = ring.zeros((len(part), len(full)))
    for n, k in enumerate(part):
        M[n, pos[k]] = ring.coerce(1)
    return M


# ---------------------------------------------------------------------------
# random filtered complexes


def random_filtered_complex(ring: Ring, rng: np.random.Generator, n_pairs: int, n_free: int, width: int,
                            q_hi: int = 2):
    """A random filtered complex W as specs [(q, filt)] and a differential D.

    W is a sum of pairs d(b) = a, with filt(a) <= filt(b) so the pair is
    seen by d_r for r = filt(b) - filt(a), and of free cycles; a random
    unitriangular, filtration-preserving change of basis then mixes them.
    """
    specs = []
    for _ in range(n_pairs):
        q = int(rng.integers(0, q_hi + 1))
        if width and rng.random() < 0.8:
            fa = int(rng.integers(0, width))
            fb = int(rng.integers(fa + 1, width + 1))
        else:
            fa = fb = int(rng.integers(0, width + 1))
        specs += [(q, fa), (q + 1, fb)]
    for _ in range(n_free):
        specs.append((int(rng.integers(0, q_hi + 1)), int(rng.integers(0, width + 1))))
    n = len(specs)
    D = ring.zeros((n, n))
    for k in range(n_pairs):
        D[2 * k, 2 * k + 1] = ring.coerce(1)
    B = ring.eye(n)
    for k in range(n):
        for m in range(n):
            if m != k and specs[m][0] == specs[k][0] and (specs[m][1], m) < (specs[k][1], k) and rng.random() < 0.5:
                B[m, k] = ring.coerce(int(rng.integers(1, max(2, min(ring.characteristic, 4)))))
    Binv = Solver(B, ring).solve(ring.eye(n)) if n else B
    return specs, ring.matmul(Binv, ring.matmul(D, B))


def _sign(ring, e):
    return ring.coerce(-1 if e % 2 else 1)


def square_zero(ring: Ring, w_specs, w_D, x_q: int, x_filt: int, window, operad="comm", arity_cap=3, name="",
                with_x: bool = True):
    """A = R + R.W for R = k[x]/(x^2) (or R = k when ``with_x`` is False)."""
    p_max = window[1]
    elems = [Element("1", 0, window[0])]
    if with_x:
        elems.append(Element("x", x_q, x_filt))
    nw = len(w_specs)
    w0 = len(elems)
    for n, (q, f) in enumerate(w_specs):
        elems.append(Element(f"w{n}", q, f))
    xw0 = len(elems)
    if with_x:
        for n, (q, f) in enumerate(w_specs):
            elems.append(Element(f"xw{n}", q + x_q, min(f + x_filt, p_max)))
    N = len(elems)
    D = ring.zeros((N, N))
    D[w0:w0 + nw, w0:w0 + nw] = w_D
    if with_x:
        D[xw0:xw0 + nw, xw0:xw0 + nw] = ring.reduce(ring.scale(w_D, _sign(ring, x_q)))
    one = ring.coerce(1)

    def kind(a):
        if a == 0:
            return "1"
        if with_x and a == 1:
            return "x"
        return "w" if w0 <= a < w0 + nw else "xw"

    def mult(a, b):
        ka, kb = kind(a), kind(b)
        if ka == "1":
            return {b: one}
        if kb == "1":
            return {a: one}
        if ka == "x" and kb == "w":
            return {xw0 + (b - w0): one}
        if ka == "w" and kb == "x":
            return {xw0 + (a - w0): _sign(ring, elems[a].q * x_q)}
        return {}

    return FilteredAlgebra(ring, elems, D, mult, window, operad, arity_cap, name)


def filtered_dga(seed: int = 1, ring: str = "F2", operad: str = "comm", width: int = 2, size: int = 4,
                 arity_cap: int = 3, name: str = "") -> TowerDocument:
    """A filtered square-zero dg algebra over a prime field; conditions (i)/(ii) hold by construction."""
    rng = np.random.default_rng(seed)
    R = Ring.parse(ring)
    n_pairs = int(rng.integers(1, size // 2 + 1))
    specs, D = random_filtered_complex(R, rng, n_pairs, size - 2 * n_pairs, width)
    x_q = int(rng.integers(0, 2))
    x_filt = int(rng.integers(0, min(width, 1) + 1))
    fa = square_zero(R, specs, D, x_q, x_filt, (0, width), operad, arity_cap, name or f"filtered_dga-{seed}")
    return fa.document()


def bicomplex(seed: int = 1, ring: str = "F2", operad: str = "comm", size: int = 4, arity_cap: int = 3,
              name: str = "") -> TowerDocument:
    """Two-column bicomplex: the filtration of a total complex by columns p = 0, 1."""
    return filtered_dga(seed, ring, operad, width=1, size=size, arity_cap=arity_cap,
                        name=name or f"bicomplex-{seed}")


RANDOM_MAX_WIDTH = 4  # p-window of the random towers
RANDOM_MAX_Q_SPAN = 6
RANDOM_MAX_RANK = 4


def _within_random_bounds(doc: TowerDocument) -> bool:
    t = doc.to_tower()
    q0, q1 = t.q_range()
    ranks = [m.rank(*k) for m in (t.A.module, t.C.module) for k in m.support]
    return (t.p_max - t.p_min + 1 <= RANDOM_MAX_WIDTH and q1 - q0 + 1 <= RANDOM_MAX_Q_SPAN
            and max(ranks, default=0) <= RANDOM_MAX_RANK)


def random_tower(seed: int = 0, arity_cap: int = 3) -> TowerDocument:
    """A seeded random verified tower over F_2 or F_5 with a Comm or Assoc action.

    Draws are repeated from the same seeded stream until every stage and
    quotient has rank at most 4 in each bidegree.
    """
    rng = np.random.default_rng([seed, 7])
    while True:
        ring = "F2" if rng.random() < 0.5 else "F5"
        operad = "comm" if rng.random() < 0.5 else "assoc"
        width = int(rng.integers(1, 4))
        size = int(rng.integers(2, 5))
        doc = filtered_dga(int(rng.integers(0, 2**31)), ring, operad, width, size, arity_cap,
                           name=f"random-{seed}")
        if _within_random_bounds(doc):
            return doc


def collapsed(seed: int = 0, ring: str = "F2", operad: str = "comm", width: int = 2, size: int = 3,
              arity_cap: int = 3, name: str = "") -> TowerDocument:
    """Zero differential and A_p = A for every p in the window (i = identity)."""
    rng = np.random.default_rng(seed)
    R = Ring.parse(ring)
    specs = [(int(rng.integers(0, 3)), 0) for _ in range(size)]
    fa = square_zero(R, specs, R.zeros((size, size)), int(rng.integers(0, 2)), 0, (0, width), operad, arity_cap,
                     name or f"collapsed-{seed}")
    return fa.document()


def trivial(ring: str = "F2") -> TowerDocument:
    """One generator in bidegree (0, 0): the unit of k, single stage."""
    R = Ring.parse(ring)
    fa = square_zero(R, [], R.zeros((0, 0)), 0, 0, (0, 0), "comm", 3, "trivial", with_x=False)
    return fa.document()


# ---------------------------------------------------------------------------
# mutations


def mutation(seed: int = 0, kind: str = "i", ring: str | None = None, operad: str = "comm",
             arity_cap: int = 3) -> TowerDocument:
    """A tower whose algebras are valid but which breaks condition (i) or (ii).

    A core pair d(w1) = w0 with w1 one column above w0 makes x.w1 -> x.w0 a
    nonzero d_1, so the rescaled products are visible on E^1.

    kind "i": the C-products of x with column p are multiplied by lambda_p
    (lambda differs on the two columns of the core pair).
    kind "ii": both A and C products on stages (s1, s2) are multiplied by
    g(s1) g(s2) / g(s1 + s2) for a non-geometric g; this keeps both algebras
    valid and j multiplicative, but i no longer commutes with the products.
    """
    rng = np.random.default_rng([seed, 11])
    if ring is None:
        ring = "F5" if kind == "ii" or rng.random() < 0.5 else "F2"
    R = Ring.parse(ring)
    if kind == "ii" and R.characteristic == 2:
        raise ValueError("condition (ii) mutations need a field with a unit other than 1")
    width = 2
    core_q = int(rng.integers(1, 3))
    base = 0
    extra, rest = random_filtered_complex(R, rng, int(rng.integers(0, 2)), int(rng.integers(0, 2)), width)
    specs = [(core_q - 1, base), (core_q, base + 1)] + extra
    D = R.zeros((len(specs), len(specs)))
    D[2:, 2:] = rest
    D[0, 1] = R.coerce(1)
    x_q = int(rng.integers(0, 2))
    x_filt = 0 if kind == "i" else 1
    fa = square_zero(R, specs, D, x_q, x_filt, (0, width), operad, arity_cap, f"mutation-{kind}-{seed}")
    is_x = {k for k, e in enumerate(fa.elements) if e.label == "x"}
    is_w = {k for k, e in enumerate(fa.elements) if e.label.startswith("w")}
    if kind == "i":
        lam = {p: R.coerce(int(rng.integers(1, R.characteristic))) for p in range(width + 1)}
        lam[base] = R.coerce(0 if R.characteristic == 2 else 1)
        lam[base + 1] = R.coerce(1 if R.characteristic == 2 else 2)

        def twist(side, stages, a, b):
            if side == "C" and ((a in is_x and b in is_w) or (a in is_w and b in is_x)):
                w = b if a in is_x else a
                return lam[fa.elements[w].filt]
            return 1
    elif kind == "ii":
        g = {0: 1, 1: 1, 2: 2}

        def gval(s):
            return g[min(s, width)]

        def twist(side, stages, a, b):
            s1, s2 = stages
            return R.coerce(gval(s1) * gval(s2)) * R.inv(R.coerce(gval(s1 + s2)))
    else:
        raise ValueError(f"unknown mutation kind {kind!r}")
    fa.twist = twist
    return fa.document()


# ---------------------------------------------------------------------------
# Bockstein towers


def _unimodular(rng, n):
    U = np.eye(n, dtype=object)
    for _ in range(2 * n * n):
        a, b = rng.integers(0, n, size=2)
        if a != b:
            U[a] += int(rng.choice([-1, 1])) * U[b]
    perm = rng.permutation(n)
    return U[perm]


def _inverse_unimodular(U):
    from fractions import Fraction
    n = U.shape[0]
    ring = Ring.rationals()
    inv = Solver(ring.array(U), ring).solve(ring.eye(n))
    out = np.empty((n, n), dtype=object)
    for a in range(n):
        for b in range(n):
            v = Fraction(inv[a, b])
            if v.denominator != 1:
                raise ArithmeticError("matrix is not unimodular")
            out[a, b] = v.numerator
    return out


def bockstein(q: int = 2, torsion=(4,), free: int = 1, seed: int = 0, degrees=None, arity_cap: int = 3,
              name: str = "") -> TowerDocument:
    """Z.1 + M where H(M) = Z^free + sum Z/t (each t a power of q), i = multiplication by q.

    Each torsion summand is an elementary block d(e) = t f; free summands are
    cycles; every degree is then mixed by a random unimodular change of basis.
    ``degrees`` optionally fixes the degree of each f (and of each free cycle,
    listed after the torsion degrees).
    """
    rng = np.random.default_rng([seed, q])
    for t in torsion:
        s = t
        while s % q == 0:
            s //= q
        if s != 1 or t < q:
            raise ValueError(f"torsion order {t} is not a positive power of {q}")
    n_t, n_f = len(torsion), free
    degs = list(degrees) if degrees is not None else [int(rng.integers(0, 3)) for _ in range(n_t + n_f)]
    # M basis: (degree, role) ; torsion block k has f_k at degs[k], e_k at degs[k] + 1
    specs = []
    for k in range(n_t):
        specs.append((degs[k], f"f{k}"))
        specs.append((degs[k] + 1, f"e{k}"))
    for k in range(n_f):
        specs.append((degs[n_t + k], f"z{k}"))
    n = len(specs)
    D = np.zeros((n, n), dtype=object)
    for k in range(n_t):
        D[2 * k, 2 * k + 1] = torsion[k]
    # change of basis per degree
    by_q = {}
    for idx, (dq, _) in enumerate(specs):
        by_q.setdefault(dq, []).append(idx)
    U = np.zeros((n, n), dtype=object)
    Uinv = np.zeros((n, n), dtype=object)
    for dq, idx in sorted(by_q.items()):
        u = _unimodular(rng, len(idx))
        U[np.ix_(idx, idx)] = u
        Uinv[np.ix_(idx, idx)] = _inverse_unimodular(u)
    Dm = U.dot(D).dot(Uinv)
    ring = Ring.integers()
    qs = sorted(by_q)
    A = Side(p_top=0)
    C = Side(p_top=1)
    comps = {}
    for dq in sorted(set(qs) | {0}):
        labels = (["1"] if dq == 0 else []) + [f"m{t}" for t in by_q.get(dq, [])]
        comps[dq] = labels
        A.labels[(0, dq)] = labels
        A.orders[(0, dq)] = [0] * len(labels)
        C.labels[(0, dq)] = labels
        C.orders[(0, dq)] = [0] * len(labels)
        C.labels[(1, dq)] = labels
        C.orders[(1, dq)] = [q] * len(labels)

    def index(dq):
        return (["unit"] if dq == 0 else []) + by_q.get(dq, [])

    def block(dq):
        rows, cols = index(dq - 1), index(dq)
        M = ring.zeros((len(rows), len(cols)))
        for a, r in enumerate(rows):
            for b, c in enumerate(cols):
                if r != "unit" and c != "unit":
                    M[a, b] = int(Dm[r, c])
        return M

    i_blocks, j_blocks = {}, {}
    for dq in comps:
        m = len(comps[dq])
        if dq - 1 in comps:
            M = block(dq)
            if not ring.is_zero(M):
                A.d[(0, dq)] = M
                C.d[(0, dq)] = M
                Mq = ring.array(np.vectorize(lambda v: int(v) % q, otypes=[object])(M)) if M.size else M
                if not ring.is_zero(Mq):
                    C.d[(1, dq)] = Mq
        i_blocks[(0, dq)] = ring.scale(ring.eye(m), q)
        j_blocks[(0, dq)] = ring.eye(m)
        j_blocks[(1, dq)] = ring.eye(m)
    # products: 1 . m = m . 1 = m, M . M = 0
    op2 = "mu2"

    def unit_table(b1, b2, side):
        (p1, q1), (p2, q2) = b1, b2
        out_q = q1 + q2
        if out_q not in comps:
            return None
        m_out = len(comps[out_q])
        T = ring.zeros((m_out, len(comps[q1]), len(comps[q2])))
        if q1 == 0:
            for b in range(len(comps[q2])):
                T[b, 0, b] = 1
        if q2 == 0:
            for a in range(len(comps[q1])):
                T[a, a, 0] = 1
        return T if not ring.is_zero(T) else None

    for b1 in A.labels:
        for b2 in A.labels:
            T = unit_table(b1, b2, "A")
            if T is not None:
                A.gamma[(op2, (b1, b2))] = T
    for b1 in C.labels:
        for b2 in C.labels:
            T = unit_table(b1, b2, "C")
            if T is not None:
                if b1[0] + b2[0] >= 1:
                    T = np.vectorize(lambda v: int(v) % q, otypes=[object])(T)
                C.gamma[(op2, (b1, b2))] = T
    q_range = (min(comps), max(comps))
    return TowerDocument(ring, (0, 0), q_range, "repeat_last_map", {"builtin": "comm", "arity_cap": arity_cap},
                         A, C, i_blocks, j_blocks, name=name or f"bockstein-q{q}-{seed}")


# ---------------------------------------------------------------------------
# a Lie algebra fixture (not a tower)


def lie_fixture(ring: str = "F5", degrees=(0, 1), d=None) -> OperadAlgebra:
    """End(V) with the graded commutator bracket, for a small complex V (p = 0 throughout)."""
    R = Ring.parse(ring)
    r = len(degrees)
    dV = R.zeros((r, r)) if d is None else R.array(d).reshape(r, r)
    o = lie(R, 3)
    units = [(a, b) for a in range(r) for b in range(r)]  # E_ab : x_b -> x_a
    by_deg = {}
    for a, b in units:
        by_deg.setdefault(degrees[a] - degrees[b], []).append((a, b))
    labels = {(0, s): [f"E{a}{b}" for a, b in us] for s, us in by_deg.items()}
    mod = BigradedModule(R, labels, name="End(V)")

    def pos(s, ab):
        return by_deg[s].index(ab)

    def unit_matrix(a, b):
        M = R.zeros((r, r))
        M[a, b] = R.coerce(1)
        return M

    def coords(s, M):
        v = R.zeros(len(by_deg.get(s, [])))
        for n, (a, b) in enumerate(by_deg.get(s, [])):
            v[n] = M[a, b]
        return v

    blocks = {}
    for s, us in by_deg.items():
        if s - 1 not in by_deg:
            continue
        cols = []
        for a, b in us:
            F = unit_matrix(a, b)
            sign = R.coerce(-1 if s % 2 else 1)
            dF = R.sub(R.matmul(dV, F), R.scale(R.matmul(F, dV), sign))
            cols.append(coords(s - 1, dF))
        blocks[(0, s)] = np.stack(cols, axis=1)
    dmap = GradedMap(mod, mod, (0, -1), blocks)
    carrier = DGBigradedModule(mod, dmap)
    tables = {}
    for s1, u1 in by_deg.items():
        for s2, u2 in by_deg.items():
            s = s1 + s2
            if s not in by_deg:
                continue
            T = R.zeros((len(by_deg[s]), len(u1), len(u2)))
            sign = R.coerce(-1 if (s1 * s2) % 2 else 1)
            for n1, (a, b) in enumerate(u1):
                for n2, (c, e) in enumerate(u2):
                    F, G = unit_matrix(a, b), unit_matrix(c, e)
                    br = R.sub(R.matmul(F, G), R.scale(R.matmul(G, F), sign))
                    T[:, n1, n2] = coords(s, br)
            tables[(0, ((0, s1), (0, s2)))] = T
    return OperadAlgebra(o, carrier, tables, name="End(V)")


def gen_example(name: str, **params) -> TowerDocument:
    if name == "filtered_dga":
        return filtered_dga(**params)
    if name == "bockstein":
        return bockstein(**params)
    if name == "bicomplex":
        return bicomplex(**params)
    if name == "random":
        return random_tower(**params)
    if name == "collapsed":
        return collapsed(**params)
    if name == "trivial":
        return trivial(**params)
    if name == "mutation":
        return mutation(**params)
    raise KeyError(f"unknown generator {name!r}; choose from {', '.join(GENERATORS)}")


__all__ = ["Element", "FilteredAlgebra", "GENERATORS", "bicomplex", "bockstein", "collapsed", "filtered_dga",
           "gen_example", "lie_fixture", "mutation", "random_filtered_complex", "random_tower", "square_zero",
           "trivial"]
