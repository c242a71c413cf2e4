import itertools

import numpy as np
import pytest

from opseq.graded import BigradedModule, DGBigradedModule, GradedMap
from opseq.io.generators import filtered_dga, lie_fixture
from opseq.linalg import Ring
from opseq.operads import (ArityOutOfRange, Operad, OperadAlgebra, Prop, PropAlgebra, UnsupportedArity, assoc,
                           builtin, check_algebra, check_operad, check_prop, check_prop_algebra, comm, endomorphism,
                           endomorphism_prop, homology_action, homology_operad, lie, tautological_algebra)

F2, F3, F5, Q, Z = (Ring.prime_field(2), Ring.prime_field(3), Ring.prime_field(5), Ring.rationals(),
                    Ring.integers())


def carrier(ring, labels, d=None):
    mod = BigradedModule(ring, labels)
    dmap = GradedMap(mod, mod, (0, -1), {k: ring.array(v) for k, v in (d or {}).items()})
    return DGBigradedModule(mod, dmap)


# -- built-in operads ------------------------------------------------------------------


@pytest.mark.parametrize("ring", [F2, F5, Q, Z])
@pytest.mark.parametrize("make", [comm, assoc])
def test_builtins_pass_the_operad_laws(ring, make):
    assert check_operad(make(ring, 3))


def test_comm_components():
    o = comm(F5, 3)
    assert o.dim(2) == 1 and o.dim(3) == 1
    mu = o.element(2, "mu2")
    assert np.array_equal(o.compose(2, 1, mu, 2, mu), o.compose(2, 2, mu, 2, mu))
    assert np.array_equal(o.act(2, mu, (1, 0)), mu)


def test_assoc_components():
    o = assoc(Q, 3)
    assert o.dim(3) == 6
    ident = o.element(2, "12")
    assert np.array_equal(o.compose(2, 1, ident, 2, ident), o.element(3, "123"))
    assert np.array_equal(o.compose(2, 2, ident, 2, ident), o.element(3, "123"))


@pytest.mark.parametrize("ring", [F3, F5, Q, Z])
def test_lie_operad(ring):
    o = lie(ring, 3)
    assert check_operad(o)
    assert o.dim(2) == 1 and o.dim(3) == 2
    assert o.transpositions[2][0].tolist() == [[ring.coerce(-1)]]


@pytest.mark.parametrize("ring", [F3, F5, Q])
def test_jacobi_relation(ring):
    """The cyclic sum of [[x1, x2], x3] vanishes, both in Lie(3) and after embedding in Assoc(3)."""
    o = lie(ring, 3)
    A, gens = o.embedding
    v = o.element(3, "b1b")
    cyclic = [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
    total = ring.zeros(o.dim(3))
    for s in cyclic:
        total = ring.add(total, o.act(3, v, s))
    assert ring.is_zero(total)
    # the same identity computed by hand on words: [[x1,x2],x3] = 123 - 213 - 312 + 321
    word = {"123": 1, "213": -1, "312": -1, "321": 1}
    hand = ring.zeros(6)
    for s in cyclic:
        for w, c in word.items():
            moved = "".join(str(s[int(ch) - 1] + 1) for ch in w)
            hand[A.index(3, moved)] = ring.add(hand[A.index(3, moved)], ring.coerce(c))
    assert ring.is_zero(hand)
    assert np.array_equal(ring.matmul(gens[3], v.reshape(-1, 1)).reshape(-1),
                          ring.reduce(ring.array([word.get(w, 0) for w in A.basis[3]])))


def test_lie_limits():
    with pytest.raises(UnsupportedArity):
        lie(F5, 4)
    with pytest.raises(ValueError):
        lie(F2, 3)


@pytest.mark.parametrize("name", ["comm", "assoc", "lie", "endo(2)"])
def test_builtins_by_name(name):
    assert check_operad(builtin(name, F5, 3))


def test_graded_endomorphism_operad_with_differential():
    o = endomorphism([0, 1], F5, d=[[0, 1], [0, 0]], arity_cap=2)
    assert o.has_differential
    assert check_operad(o)


# -- mutate-and-detect on operads ---------------------------------------------------------


def test_corrupted_assoc_composition_breaks_associativity():
    o = assoc(F5, 3)
    T = o.compositions[(2, 2, 1)].copy()
    # send 12 o_1 21 to a wrong word
    a, b = o.index(2, "12"), o.index(2, "21")
    T[:, a, b] = 0
    T[o.index(3, "123"), a, b] = 1
    o.compositions[(2, 2, 1)] = T
    rep = check_operad(o)
    assert not rep and rep.violation.axiom in ("associativity", "equivariance")
    assert rep.violation.where


def test_differential_breaking_leibniz_is_detected():
    o = endomorphism([0, 1], F5, d=[[0, 1], [0, 0]], arity_cap=2)
    o.delta[2] = F5.scale(o.delta[2], 2)
    rep = check_operad(o)
    assert not rep and rep.violation.axiom == "leibniz"


# -- homology operad ------------------------------------------------------------------------


def two_term_acyclic_operad(ring):
    """P(1) = k.1, P(2) = span{a (degree 1), b (degree 0)} with delta a = b, trivial Sigma_2 action."""
    basis = {1: ["1"], 2: ["a", "b"]}
    degrees = {1: [0], 2: [1, 0]}
    trans = {2: [[[1, 0], [0, 1]]]}
    eye2 = np.eye(2, dtype=np.int64)
    comps = {(1, 1, 1): [[[1]]], (1, 2, 1): eye2.reshape(2, 1, 2), (2, 1, 1): eye2.reshape(2, 2, 1),
             (2, 1, 2): eye2.reshape(2, 2, 1)}
    delta = {2: [[0, 0], [1, 0]]}
    return Operad(ring, basis, degrees, trans, comps, unit=[1], delta=delta, arity_cap=2, name="acyclic2")


def test_acyclic_component_has_zero_homology():
    o = two_term_acyclic_operad(F5)
    assert check_operad(o)
    h = homology_operad(o)
    assert h.dim(1) == 1 and h.dim(2) == 0
    assert check_operad(h)


@pytest.mark.parametrize("make", [lambda: comm(F5, 3), lambda: two_term_acyclic_operad(F5),
                                  lambda: endomorphism([0, 1, 1], F5, d=[[0, 1, 0], [0, 0, 0], [0, 0, 0]],
                                                       arity_cap=2)])
def test_homology_operad_is_idempotent(make):
    h = homology_operad(make())
    hh = homology_operad(h)
    assert not h.has_differential
    assert [h.dim(n) for n in range(1, h.arity_cap + 1)] == [hh.dim(n) for n in range(1, hh.arity_cap + 1)]
    assert check_operad(h)


def test_endomorphisms_of_an_acyclic_module_have_no_unit_in_homology():
    h = homology_operad(endomorphism([0, 1], F5, d=[[0, 1], [0, 0]], arity_cap=2))
    assert h.dim(1) == 0
    rep = check_operad(h)
    assert not rep and rep.violation.axiom == "unit"


def test_homology_of_endomorphisms_is_endomorphisms_of_homology():
    # V = <x0 | y1, z1> with d y = x: H(V) is one class in degree 1
    h = homology_operad(endomorphism([0, 1, 1], F5, d=[[0, 1, 0], [0, 0, 0], [0, 0, 0]], arity_cap=3))
    assert [h.dim(n) for n in (1, 2, 3)] == [1, 1, 1]
    assert check_operad(h)


def test_homology_of_comm_is_comm():
    h = homology_operad(comm(F2, 3))
    assert h.basis == comm(F2, 3).basis


# -- algebras -------------------------------------------------------------------------------


def exterior_algebra(ring, flip=False):
    """k[e]/(e^2) with e in bidegree (0, 1) as a Comm-algebra."""
    c = carrier(ring, {(0, 0): ["1"], (0, 1): ["e"]})
    one = ring.coerce(1)
    tables = {
        (0, ((0, 0), (0, 0))): ring.array([[[one]]]),
        (0, ((0, 0), (0, 1))): ring.array([[[one]]]),
        (0, ((0, 1), (0, 0))): ring.array([[[ring.coerce(-1) if flip else one]]]),
    }
    return OperadAlgebra(comm(ring, 3), c, tables, name="exterior")


def test_zero_algebra_is_valid():
    c = carrier(F2, {})
    assert check_algebra(OperadAlgebra(comm(F2, 3), c, {}))


def test_exterior_algebra_over_f2():
    assert check_algebra(exterior_algebra(F2))


def test_exterior_algebra_with_a_flipped_sign_over_f5():
    rep = check_algebra(exterior_algebra(F5, flip=True))
    assert not rep and rep.violation.axiom == "equivariance"


def test_derivation_violation_is_named():
    # d a = b with b * b = b: d(a b) = 0 but d(a) b - a d(b) = b
    c = carrier(F5, {(0, 0): ["1", "b"], (0, 1): ["a"]}, {(0, 1): [[0], [1]]})
    one = 1
    t00 = F5.zeros((2, 2, 2))
    t00[0, 0, 0] = one
    t00[1, 0, 1] = t00[1, 1, 0] = one
    t00[1, 1, 1] = one
    t01 = F5.zeros((1, 2, 1))
    t01[0, 0, 0] = one
    t10 = F5.zeros((1, 1, 2))
    t10[0, 0, 0] = one
    alg = OperadAlgebra(comm(F5, 3), c, {(0, ((0, 0), (0, 0))): t00, (0, ((0, 0), (0, 1))): t01,
                                          (0, ((0, 1), (0, 0))): t10})
    rep = check_algebra(alg)
    assert not rep and rep.violation.axiom == "derivation"


def test_act_unit_zero_and_square_zero():
    alg = exterior_algebra(F2)
    e = ((0, 1), F2.array([1]))
    out, v = alg.act(alg.operad.unit, [e])
    assert out == (0, 1) and v.tolist() == [1]
    out, v = alg.gamma("mu2", e, e)
    assert out == (0, 2) and F2.is_zero(v)
    out, v = alg.gamma("mu2", ((0, 0), F2.array([0])), e)
    assert F2.is_zero(v)
    with pytest.raises(ArityOutOfRange):
        alg.act(F2.array([1]), [e] * 4)


def test_act_is_multilinear():
    t = filtered_dga(3, "F5", "comm", width=1, size=3).to_tower()
    A = t.A
    keys = [k for k in A.module.support if A.module.rank(*k)]
    rng = np.random.default_rng(0)
    b1, b2 = keys[0], keys[-1]
    x, y = (F5.random_array(rng, (A.module.rank(*b1),), 0, 4) for _ in range(2))
    z = F5.random_array(rng, (A.module.rank(*b2),), 0, 4)
    mu = A.operad.element(2, "mu2")
    _, lhs = A.act(mu, [(b1, F5.add(x, y)), (b2, z)])
    _, a = A.act(mu, [(b1, x), (b2, z)])
    _, b = A.act(mu, [(b1, y), (b2, z)])
    assert np.array_equal(lhs, F5.add(a, b))


@pytest.mark.parametrize("seed", range(4))
def test_assoc_arity_three_is_iterated_multiplication(seed):
    t = filtered_dga(seed, "F5", "assoc", width=1, size=3).to_tower()
    A = t.A
    o = A.operad
    keys = A.module.support
    for b1, b2, b3 in itertools.product(keys, repeat=3):
        for e1, e2, e3 in itertools.product(*(range(A.module.rank(*b)) for b in (b1, b2, b3))):
            xs = [(b, F5.eye(A.module.rank(*b))[:, e]) for b, e in zip((b1, b2, b3), (e1, e2, e3))]
            _, lhs = A.act(o.element(3, "123"), xs)
            mid = A.act(o.element(2, "12"), xs[:2])
            _, rhs = A.act(o.element(2, "12"), [mid, xs[2]])
            assert np.array_equal(lhs, rhs)


def test_transposition_squares_to_identity_on_tables():
    alg = lie_fixture()
    o = alg.operad
    tau = o.transpositions[2][0]
    assert np.array_equal(alg.ring.matmul(tau, tau), alg.ring.eye(o.dim(2)))


# -- homology action ------------------------------------------------------------------------


def truncated_polynomial_algebra():
    """F_2[x]/(x^3) (x) Lambda[y], |x| = 2, |y| = 5, d y = x^2; all in column p = 0."""
    monos = [(a, b) for b in (0, 1) for a in range(3)]  # x^a y^b
    deg = {m: 2 * m[0] + 5 * m[1] for m in monos}
    by_q = {}
    for m in monos:
        by_q.setdefault(deg[m], []).append(m)
    labels = {(0, q): [f"x{a}y{b}" for a, b in ms] for q, ms in by_q.items()}
    d = {(0, 5): [[1]]}  # y -> x^2 (both alone in their degrees)
    c = carrier(F2, labels, d)

    def mult(m1, m2):
        a, b = m1[0] + m2[0], m1[1] + m2[1]
        return (a, b) if a < 3 and b < 2 else None

    tables = {}
    for q1, ms1 in by_q.items():
        for q2, ms2 in by_q.items():
            q = q1 + q2
            if q not in by_q:
                continue
            T = F2.zeros((len(by_q[q]), len(ms1), len(ms2)))
            for i1, m1 in enumerate(ms1):
                for i2, m2 in enumerate(ms2):
                    m = mult(m1, m2)
                    if m is not None:
                        T[by_q[q].index(m), i1, i2] = 1
            tables[(0, ((0, q1), (0, q2)))] = T
    return OperadAlgebra(comm(F2, 3), c, tables, name="F2[x]/x3 (x) L[y]"), by_q, mult


def test_homology_action_matches_coset_multiplication():
    alg, by_q, mult = truncated_polynomial_algebra()
    assert check_algebra(alg)
    H = homology_action(alg)
    assert check_algebra(H)
    hom = H.homology
    ranks = {q: hom.rank(0, q) for q in by_q}
    # cycles: everything but y; boundaries: x^2.  So H = {1, x, xy, x^2 y}.
    assert ranks == {0: 1, 2: 1, 4: 0, 5: 0, 7: 1, 9: 1}

    # brute force: every representative of each class, multiplied monomial-wise, lands in one class
    boundaries = {4: [(2, 0)]}

    def reps(q, coords):
        base = hom.lift(0, q, F2.array(coords))
        out = []
        for extra in itertools.product((0, 1), repeat=len(boundaries.get(q, []))):
            v = base.copy()
            for c, m in zip(extra, boundaries.get(q, [])):
                v[by_q[q].index(m)] ^= c
            out.append(v)
        return out

    def multiply(q1, v1, q2, v2):
        q = q1 + q2
        out = F2.zeros(len(by_q.get(q, [])))
        for i1, m1 in enumerate(by_q[q1]):
            for i2, m2 in enumerate(by_q[q2]):
                m = mult(m1, m2)
                if v1[i1] and v2[i2] and m is not None:
                    out[by_q[q].index(m)] ^= 1
        return q, out

    for q1, q2 in itertools.product([q for q in ranks if ranks[q]], repeat=2):
        q = q1 + q2
        expected = set()
        for v1 in reps(q1, [1]):
            for v2 in reps(q2, [1]):
                _, w = multiply(q1, v1, q2, v2)
                expected.add(tuple(hom.project(0, q, w).tolist()) if q in by_q and hom.rank(0, q) else ())
        assert len(expected) == 1
        _, got = H.gamma("mu2", ((0, q1), F2.array([1])), ((0, q2), F2.array([1])))
        assert tuple(got.tolist()) == expected.pop()


@pytest.mark.parametrize("seed", [2, 3, 8, 9])
def test_homology_action_perturbed_by_boundaries(seed):
    """Adding boundaries to every representative leaves the induced tables unchanged."""
    t = filtered_dga(seed, "F5", "comm", width=1, size=4).to_tower()
    A = t.A
    H = homology_action(A)
    hom = H.homology
    d = A.carrier.d
    rng = np.random.default_rng(seed)

    shifted = {}
    for p, q in A.module.support:
        G = hom.gens(p, q)
        Bd = d.block(p, q + 1)
        if Bd.shape[1] and G.shape[1]:
            G = F5.add(G, F5.matmul(Bd, F5.random_array(rng, (Bd.shape[1], G.shape[1]), 0, 4)))
        shifted[(p, q)] = G
    assert any(not np.array_equal(hom.gens(*k), shifted[k]) for k in shifted)

    H2 = homology_action(A, gens=lambda p, q: shifted[(p, q)] if (p, q) in shifted else hom.gens(p, q))
    keys = H.module.support
    for n in (1, 2):
        for bidegs in itertools.product(keys, repeat=n):
            for k in range(H.operad.dim(n)):
                T1, T2 = H.tensor(k, bidegs), H2.tensor(k, bidegs)
                assert (T1 is None and T2 is None) or np.array_equal(T1, T2)


def test_zero_differential_homology_action_reproduces_the_tables():
    alg = exterior_algebra(F2)
    H = homology_action(alg)
    for bidegs in itertools.product(alg.module.support, repeat=2):
        T, TH = alg.tensor(0, bidegs), H.tensor(0, bidegs)
        assert (T is None and TH is None) or np.array_equal(T, TH)


def test_acyclic_carrier_gives_zero_algebra():
    c = carrier(F5, {(0, 0): ["b"], (0, 1): ["a"]}, {(0, 1): [[1]]})
    alg = OperadAlgebra(comm(F5, 3), c, {})
    H = homology_action(alg)
    assert H.module.support == []
    assert check_algebra(H)


def test_lie_fixture_and_its_homology():
    alg = lie_fixture()
    assert check_algebra(alg)
    assert check_algebra(homology_action(alg))


def test_lie_fixture_with_differential():
    alg = lie_fixture("F5", (0, 1), d=[[0, 1], [0, 0]])
    assert check_algebra(alg)
    assert check_algebra(homology_action(alg))


# -- PROPs ------------------------------------------------------------------------------------


def test_endomorphism_prop_rank_one():
    P = endomorphism_prop(1, F5)
    assert all(P.dim(*s) == 1 for s in P.shapes)
    assert check_prop(P)


def test_endomorphism_prop_rank_two():
    P = endomorphism_prop(2, Q)
    assert P.dim(2, 1) == 8
    rep = check_prop(P)
    assert rep and rep.checked > 0
    ident = P.unit
    assert [P.basis[(1, 1)][k] for k in np.nonzero(ident)[0]] == ["E0;0", "E1;1"]


def test_corrupted_interchange_is_detected():
    P = endomorphism_prop(2, F5)
    T = P.horizontal[(1, 1, 1, 1)].copy()
    a, b = P.basis[(1, 1)].index("E0;1"), P.basis[(1, 1)].index("E1;0")
    T[:, a, b] = 0
    T[P.basis[(2, 2)].index("E00;11"), a, b] = 1
    P.horizontal[(1, 1, 1, 1)] = T
    rep = check_prop(P)
    assert not rep and rep.violation.axiom == "interchange"


def test_corrupted_vertical_composition_is_detected():
    P = endomorphism_prop(2, F5)
    T = P.vertical[(1, 2, 1)].copy()
    T[0, 0, 0] = (T[0, 0, 0] + 1) % 5
    P.vertical[(1, 2, 1)] = T
    rep = check_prop(P)
    assert not rep and rep.violation.axiom == "associativity"


def test_trivial_prop():
    shapes = [(m, n) for m in range(1, 4) for n in range(1, 5 - m)]
    basis = {(1, 1): ["1"]}
    left = {s: [np.zeros((0, 0), dtype=np.int64)] * (s[1] - 1) for s in shapes}
    right = {s: [np.zeros((0, 0), dtype=np.int64)] * (s[0] - 1) for s in shapes}
    left[(1, 1)] = right[(1, 1)] = []
    P = Prop(F5, basis, {(1, 1): [0]}, left, right, {(1, 1, 1): [[[1]]]}, {}, [1], 4, name="trivial")
    assert check_prop(P)


def test_prop_algebra_and_its_mutations():
    P = endomorphism_prop(2, F5)
    V = carrier(F5, {(0, 0): ["v0", "v1"]})
    assert check_prop_algebra(tautological_algebra(P, V))
    for key in [(1, 1), (1, 2), (2, 1), (2, 2)]:
        A = tautological_algebra(P, V)
        T = A.tables[key]
        idx = tuple(np.argwhere(T)[0])
        T[idx] = (T[idx] + 1) % 5
        rep = check_prop_algebra(A)
        assert not rep and rep.violation.axiom in ("unit", "vertical", "horizontal", "equivariance")


def test_prop_algebra_needs_bidegree_zero():
    P = endomorphism_prop(1, F5)
    with pytest.raises(ValueError):
        PropAlgebra(P, carrier(F5, {(0, 1): ["v"]}), {})
