import itertools

import numpy as np
import pytest

from opseq.convergence import (Unsupported, associated_graded, bounded_below, check_gamma_multiplicative, colimit,
                               gamma_map)
from opseq.io.generators import bicomplex, bockstein, collapsed, filtered_dga, trivial
from opseq.linalg import hstack, same_span
from opseq.operads import OperadAlgebra, check_algebra
from opseq.spectral import SpectralSequence, e_infinity

from oracles import rank_mod_p, two_column_inputs, two_column_pages

TOWERS = [
    ("filtered_comm_F2", lambda: filtered_dga(2, "F2", "comm")),
    ("filtered_comm_F5", lambda: filtered_dga(9, "F5", "comm")),
    ("filtered_assoc_F5", lambda: filtered_dga(3, "F5", "assoc", size=3)),
    ("bicomplex_F5_assoc", lambda: bicomplex(5, "F5", "assoc", size=3)),
    ("collapsed", lambda: collapsed(1)),
    ("trivial", lambda: trivial()),
]
IDS = [t[0] for t in TOWERS]


@pytest.mark.parametrize("name,make", TOWERS, ids=IDS)
def test_abutment_is_the_homology_of_the_top_stage(name, make):
    t = make().to_tower()
    cd = colimit(t)
    M = t.A.module
    p = t.ring.p
    for q in cd.q_values():
        def rk(q):
            m = np.asarray(t.A.carrier.d.block(t.p_max, q)).tolist()
            return rank_mod_p(m, p) if m and m[0] else 0
        assert cd.H(q).ngens == M.rank(t.p_max, q) - rk(q) - rk(q + 1)


@pytest.mark.parametrize("name,make", TOWERS, ids=IDS)
def test_filtration_is_exhaustive_and_increasing(name, make):
    t = make().to_tower()
    cd = colimit(t)
    ring = t.ring
    for q in cd.q_values():
        n = cd.H(q).ngens
        assert ring.is_zero(cd.F(t.p_min - 1, q)) or cd.F(t.p_min - 1, q).shape[1] == 0
        assert same_span(cd.F(t.p_max, q), ring.eye(n), ring) or n == 0
        for p in range(t.p_min, t.p_max + 1):
            lower, upper = cd.F(p - 1, q), cd.F(p, q)
            assert same_span(hstack(ring, n, upper if upper.shape[1] else None, lower if lower.shape[1] else None),
                             upper, ring)
        assert sum(cd.graded(p, q).ngens for p in range(t.p_min, t.p_max + 1)) == n


@pytest.mark.parametrize("ring", ["F2", "F5"])
@pytest.mark.parametrize("seed", range(8))
def test_two_column_associated_graded(ring, seed):
    t = bicomplex(seed, ring).to_tower()
    _, E2o, gr_o = two_column_pages(*two_column_inputs(t), t.ring.p)
    cd = colimit(t)
    for (p, q), dim in gr_o.items():
        assert cd.graded(p, q).ngens == dim
        # two columns degenerate at E^2, so the graded pieces are the E^2 terms
        assert dim == E2o[(p, q)]


@pytest.mark.parametrize("name,make", TOWERS, ids=IDS)
def test_gamma_is_an_isomorphism_of_algebras(name, make):
    t = make().to_tower()
    cd = colimit(t)
    ss = SpectralSequence(t)
    gr = associated_graded(cd, verify=True)
    assert check_algebra(gr)
    gm = gamma_map(cd, ss)
    assert gm and gm.injective and gm.bijective
    rep = check_gamma_multiplicative(cd, ss, gr, gm)
    assert rep and rep.checked > 0


def test_corrupted_graded_product_is_detected():
    t = filtered_dga(2, "F2", "comm").to_tower()
    cd = colimit(t)
    ss = SpectralSequence(t)
    gr = associated_graded(cd)
    keys = gr.module.support
    target = None
    for b1, b2 in itertools.product(keys, repeat=2):
        out = gr.out_bidegree(0, (b1, b2))
        if gr.module.rank(*out) and e_infinity(ss).page.E(*out).ngens:
            target = (b1, b2)
            break
    assert target is not None
    ring = t.ring

    def compute(k, bidegs):
        T = gr.tensor(k, bidegs)
        if k == 0 and tuple(bidegs) == target:
            shape = (gr.module.rank(*gr.out_bidegree(k, bidegs)),) + tuple(gr.module.rank(*b) for b in bidegs)
            T = ring.zeros(shape) if T is None else T.copy()
            T[(0,) * T.ndim] = ring.add(T[(0,) * T.ndim], 1)
        return T

    bad = OperadAlgebra(gr.operad, gr.carrier, compute=compute, name="bad")
    rep = check_gamma_multiplicative(cd, ss, bad)
    assert not rep and rep.violation.axiom == "gamma_multiplicative"


@pytest.mark.parametrize("make", [lambda: bockstein(2, (4,), 1), lambda: bockstein(3, (9,), 0)])
def test_repeat_towers_have_no_colimit(make):
    with pytest.raises(Unsupported):
        colimit(make().to_tower())


def test_bounded_below_report():
    t = filtered_dga(2).to_tower()
    bb = bounded_below(t)
    q0, q1 = t.q_range()
    assert bb.certified and bb.p_of_q == {q: t.p_min for q in range(q0, q1 + 1)}
    assert str(bb).startswith("bounded below: p(")
