import numpy as np
import pytest

from opseq.couple import (AlgebraTower, check_conditions, check_exactness, check_tower, connecting, derive,
                          first_couple, tower_steps)
from opseq.io.generators import bicomplex, bockstein, collapsed, filtered_dga, mutation, trivial

from oracles import rank_mod_p, two_column_inputs, two_column_pages


VALID = [
    ("filtered_comm_F2", lambda: filtered_dga(2, "F2", "comm")),
    ("filtered_assoc_F5", lambda: filtered_dga(3, "F5", "assoc", width=2, size=3)),
    ("bicomplex", lambda: bicomplex(3)),
    ("collapsed", lambda: collapsed(0)),
    ("trivial", lambda: trivial("F5")),
    ("bockstein_2", lambda: bockstein(2, (4,), 1)),
    ("bockstein_3", lambda: bockstein(3, (3, 9), 0)),
]


@pytest.mark.parametrize("name,make", VALID, ids=[v[0] for v in VALID])
def test_valid_towers_pass(name, make):
    rep = check_tower(make().to_tower())
    assert rep and rep.checked > 0


@pytest.mark.parametrize("seed", range(4))
def test_condition_one_mutation_is_named(seed):
    t = mutation(seed, "i").to_tower()
    steps = dict(tower_steps(t))
    assert steps["algebra A"]() and steps["algebra C"]()
    rep = check_tower(t)
    assert not rep and rep.violation.axiom == "condition_i"


@pytest.mark.parametrize("seed", range(4))
def test_condition_two_mutation_is_named(seed):
    t = mutation(seed, "ii").to_tower()
    rep = check_tower(t)
    assert not rep and rep.violation.axiom == "condition_ii"


def test_condition_two_mutation_needs_odd_characteristic():
    with pytest.raises(ValueError):
        mutation(0, "ii", ring="F2")


def test_conditions_restricted_to_arity_two():
    assert check_conditions(filtered_dga(2).to_tower(), arities=[2])


def test_surjectivity_failure_is_named():
    t = filtered_dga(2, "F2", "comm").to_tower()
    p, q = next(k for k in t.C.module.support if t.C.module.rank(*k))
    t.j._blocks[(p, q)] = t.ring.zeros(t.j.block(p, q).shape)
    rep = check_exactness(t)
    assert not rep and rep.violation.axiom == "exactness" and rep.violation.where == ((p, q),)


def test_identity_at_the_top_is_enforced():
    # twice the identity at the top is still a chain map, but not the required clamp
    t = filtered_dga(2, "F5", "comm").to_tower()
    for p, q in t.A.module.support:
        if p == t.p_max:
            t.i._blocks[(p, q)] = t.ring.scale(t.i.block(p, q), 2)
    rep = check_tower(t, algebras=False)
    assert not rep and rep.violation.axiom == "extension_policy"


def test_tower_constructor_rejects_bad_shapes():
    t = filtered_dga(2).to_tower()
    with pytest.raises(ValueError):
        AlgebraTower(t.A, t.i, t.C, t.j, (0, 2), policy="sideways")
    with pytest.raises(ValueError):
        AlgebraTower(t.A, t.i, t.C, t.j, (2, 0))
    with pytest.raises(ValueError):
        AlgebraTower(t.A, t.j, t.C, t.i, (0, 2))
    with pytest.raises(ValueError):
        AlgebraTower(t.A, t.i, t.C, t.j, (0, 2), policy="repeat_last_map")


# -- level one ---------------------------------------------------------------------


@pytest.mark.parametrize("seed", range(6))
def test_first_page_is_homology_of_the_quotients(seed):
    t = filtered_dga(seed, "F5", "comm", width=2, size=4).to_tower()
    E1 = first_couple(t)
    Cm = t.C.module
    q0, q1 = t.q_range()
    for p in range(t.p_min, t.p_max + 1):
        for q in range(q0, q1 + 1):
            def rk(p, q):
                M = np.asarray(t.C.carrier.d.block(p, q)).tolist()
                return rank_mod_p(M, 5) if M and M[0] else 0
            assert E1.E(p, q).ngens == Cm.rank(p, q) - rk(p, q) - rk(p, q + 1)


@pytest.mark.parametrize("seed", [0, 2, 4, 5, 9, 16])
def test_connecting_map_ignores_boundaries(seed):
    t = filtered_dga(seed, "F5", "comm", width=2, size=4).to_tower()
    f = t.first()
    ring = t.ring
    rng = np.random.default_rng(seed)
    checked = 0
    for p, q in t.keys_C():
        E = f.E(p, q)
        if E.ngens == 0:
            continue
        base = f.connect(p, q, E.gens)
        Bd = t.C.carrier.d.block(p, q + 1)
        if Bd.shape[1] and f.D(p - 1, q - 1).ngens:
            shifted = ring.add(E.gens, ring.matmul(Bd, ring.random_array(rng, (Bd.shape[1], E.ngens), 0, 4)))
            assert np.array_equal(f.D(p - 1, q - 1).reduce(f.connect(p, q, shifted)), f.D(p - 1, q - 1).reduce(base))
            checked += 1
        for k in range(E.ngens):
            coords = ring.eye(E.ngens)[:, k]
            assert np.array_equal(connecting(t, p, q, coords), f.D(p - 1, q - 1).reduce(base[:, k]))
    assert checked


@pytest.mark.parametrize("make", [lambda: filtered_dga(2), lambda: filtered_dga(4, "F5", "assoc", size=3),
                                  lambda: bockstein(2, (4,), 1), lambda: bockstein(3, (9, 3), 1)])
def test_derived_couples_are_exact(make):
    t = make().to_tower()
    c = first_couple(t)
    for _ in range(3):
        rep = c.check_exact()
        assert rep, rep
        c = derive(c)


# -- two-column towers against an independent computation ------------------------------


@pytest.mark.parametrize("ring", ["F2", "F5"])
@pytest.mark.parametrize("seed", range(8))
def test_bicomplex_first_and_second_pages(ring, seed):
    t = bicomplex(seed, ring).to_tower()
    E1o, E2o, _ = two_column_pages(*two_column_inputs(t), t.ring.p)
    c1 = first_couple(t)
    c2 = derive(c1)
    for (p, q), dim in E1o.items():
        assert c1.E(p, q).ngens == dim, ("E1", p, q)
        assert c2.E(p, q).ngens == E2o[(p, q)], ("E2", p, q)
    # the differential d_2 leaves a two-column page alone
    c3 = derive(c2)
    for (p, q) in E2o:
        assert c3.E(p, q).ngens == E2o[(p, q)]
