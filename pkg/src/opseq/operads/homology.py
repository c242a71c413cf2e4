"""Homology operads and the induced action on homology of an algebra."""
from __future__ import annotations

import numpy as np

from ..graded import BigradedModule, DGBigradedModule, GradedMap, HomologyData, homology
from ..linalg import Solver, Subquotient, hstack
from .algebra import OperadAlgebra
from .operad import Operad


class TorsionInOperad(ValueError):
    """H(P(n)) has torsion; operads here need free components."""


def _component_homology(o: Operad, n: int):
    """Per-degree subquotients of P(n) for the differential delta."""
    ring = o.ring
    degs = o.degrees[n]
    D = o.delta[n]
    by_deg = {}
    for k, s in enumerate(degs):
        by_deg.setdefault(s, []).append(k)
    out = []
    for s in sorted(by_deg):
        idx = by_deg[s]
        below = by_deg.get(s - 1, [])
        above = by_deg.get(s + 1, [])
        size = len(idx)
        if below:
            M = D[np.ix_(below, idx)]
            Z = Solver(M, ring).kernel() if M.shape[0] else ring.eye(size)
        else:
            Z = ring.eye(size)
        B = D[np.ix_(idx, above)] if above else ring.zeros((size, 0))
        out.append((s, idx, Subquotient(ring, size, Z, B)))
    return out


def homology_operad(o: Operad) -> Operad:
    """H(P, delta) with induced action and compositions and zero differential.

    Basis elements whose chosen representative is a single basis vector of
    P(n) keep its label.  ``lifts[n]`` holds the representatives as columns
    in P(n) coordinates and ``parent`` points back to ``o``.
    """
    ring = o.ring
    if not o.has_differential:
        h = Operad(ring, o.basis, o.degrees, o.transpositions, o.compositions, o.unit,
                   arity_cap=o.arity_cap, name=f"H({o.name})")
        h.lifts = {n: ring.eye(o.dim(n)) for n in range(1, o.arity_cap + 1)}
        h.parent = o
        return h
    basis, degrees, lifts, projections = {}, {}, {}, {}
    for n in range(1, o.arity_cap + 1):
        labels, degs, cols, parts = [], [], [], []
        for s, idx, sq in _component_homology(o, n):
            if not sq.is_free:
                raise TorsionInOperad(f"H(P({n})) has torsion {sq.torsion} in degree {s}")
            for g in range(sq.ngens):
                v = ring.zeros(o.dim(n))
                v[idx] = sq.gens[:, g]
                nz = np.nonzero(v != 0)[0]
                if len(nz) == 1 and v[nz[0]] == 1:
                    labels.append(o.basis[n][nz[0]])
                else:
                    labels.append(f"[{n}:{len(labels)}]")
                degs.append(s)
                cols.append(v)
            parts.append((s, idx, sq))
        basis[n], degrees[n] = labels, degs
        lifts[n] = np.stack(cols, axis=1) if cols else ring.zeros((o.dim(n), 0))
        projections[n] = parts

    def project(n, v):
        out = []
        for s, idx, sq in projections[n]:
            out.extend(sq.project(v[idx]) if sq.ngens else [])
        return ring.array(out) if out else ring.zeros(0)

    trans = {n: [np.stack([project(n, ring.matmul(o.transpositions[n][h - 1], lifts[n][:, c]))
                           for c in range(len(basis[n]))], axis=1) if basis[n] else ring.zeros((0, 0))
                 for h in range(1, n)] for n in range(2, o.arity_cap + 1)}
    comps = {}
    for (m, k, i) in o.compositions:
        T = ring.zeros((len(basis[m + k - 1]), len(basis[m]), len(basis[k])))
        for a in range(len(basis[m])):
            for b in range(len(basis[k])):
                T[:, a, b] = project(m + k - 1, o.compose(m, i, lifts[m][:, a], k, lifts[k][:, b]))
        comps[(m, k, i)] = T
    unit = project(1, o.unit)
    h = Operad(ring, basis, degrees, trans, comps, unit, arity_cap=o.arity_cap, name=f"H({o.name})")
    h.lifts = lifts
    h.parent = o
    return h


def _contract_inputs(ring, T, mats):
    """T[out, e_1..e_n] with input axis h multiplied by mats[h] (columns = new basis)."""
    for h, G in enumerate(mats):
        T = np.moveaxis(ring.tensordot(T, G, axes=([h + 1], [0])), -1, h + 1)
    return T


def project_tensor(ring, sq: Subquotient, T):
    """Apply ``sq.project`` along the output axis of a structure tensor."""
    shape = T.shape
    flat = T.reshape(shape[0], int(np.prod(shape[1:], dtype=np.int64)))
    P = sq.project(flat)
    return P.reshape((sq.ngens,) + shape[1:])


def homology_carrier(h: HomologyData, name: str = "") -> DGBigradedModule:
    """H(A) as a bigraded module on homology generators, with zero differential."""
    M = h.complex.module
    labels, orders = {}, {}
    for key in M.support:
        sq = h.module(*key)
        if sq.ngens:
            labels[key] = [f"h{g}" for g in range(sq.ngens)]
            orders[key] = sq.orders
    mod = BigradedModule(h.ring, labels, orders if not h.ring.is_field else None, p_top=M.p_top,
                         name=name or f"H({M.name})")
    return DGBigradedModule(mod, GradedMap(mod, mod, (0, -1)), check=False)


def homology_action(a: OperadAlgebra, gens=None) -> OperadAlgebra:
    """The algebra H(A) over H(P): [pi]([x_1], ..., [x_k]) = [pi(x_1, ..., x_k)].

    ``gens(p, q)`` may override the cycle representatives used for the
    inputs (they must represent the same classes); by default the chosen
    homology generators are used.
    """
    ring = a.ring
    ho = homology_operad(a.operad)
    H = homology(a.carrier)
    carrier = homology_carrier(H)
    reps = gens or H.gens

    def compute(k, bidegs):
        n = len(bidegs)
        lift = ho.lifts[n][:, k]
        out = a.out_bidegree_vec(n, lift, bidegs)
        T = None
        for c in np.nonzero(lift != 0)[0]:
            t = a.tensor(int(c), bidegs)
            if t is None:
                continue
            t = ring.scale(t, lift[c])
            T = t if T is None else ring.add(T, t)
        if T is None:
            return None
        T = _contract_inputs(ring, T, [reps(*b) for b in bidegs])
        return project_tensor(ring, H.module(*out), T)

    alg = OperadAlgebra(ho, carrier, compute=compute, name=f"H({a.name})")
    alg.homology = H
    alg.base = a
    return alg


__all__ = ["TorsionInOperad", "homology_operad", "homology_action", "homology_carrier", "project_tensor"]
