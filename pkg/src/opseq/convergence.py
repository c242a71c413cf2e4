"""The abutment of a constant-above tower and its comparison with E-infinity.

H_q is the homology of the top stage A_{p_max}, filtered by the images
F_p H_q of H(A_p).  Everything is expressed in the homology coordinates of
H(A_{p_max}); the associated graded pieces are Subquotients of that module.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .couple import AlgebraTower, coordinate_module
from .graded import BigradedModule, DGBigradedModule, GradedMap
from .linalg import NoSolution, ProjectUndefined, Subquotient, coord_kernel, coord_preimage, coord_solve, hstack
from .operads import OperadAlgebra, homology_action, project_tensor
from .operads.homology import _contract_inputs
from .report import Report, Violation
from .spectral import SpectralSequence, e_infinity


class Unsupported(ValueError):
    """The colimit is not computed for this extension policy."""


class WellDefinednessViolation(ValueError):
    pass


class ConvergenceData:
    """H_q, its filtration F_p H_q and the associated graded with its action."""

    def __init__(self, tower: AlgebraTower):
        if tower.repeat:
            raise Unsupported("the colimit along i = x q is not finitely presented; only E-infinity is computed")
        self.tower = tower
        self.ring = tower.ring
        self.first = tower.first()
        self.top = tower.p_max
        self._graded_alg = None

    # -- H_q and the filtration ------------------------------------------------
    def q_values(self) -> list:
        q0, q1 = self.tower.q_range()
        return list(range(q0, q1 + 1))

    def H(self, q) -> Subquotient:
        """H_q in coordinates (the normal form of H(A_{p_max})_q)."""
        return coordinate_module(self.first.D(self.top, q))

    def structure_map(self, p, q):
        """H(A)_{p,q} -> H_q in homology coordinates."""
        return self.first.ipow(p, q, self.top - p)

    def F(self, p, q):
        """Columns spanning F_p H_q (relations of H_q included)."""
        Hq = self.H(q)
        if p < self.tower.p_min:
            return Hq.Bb
        p = min(p, self.top)
        M = self.structure_map(p, q)
        return hstack(self.ring, Hq.ngens, M if M.shape[1] else None, Hq.Bb)

    def graded(self, p, q) -> Subquotient:
        """F_p H_q / F_{p-1} H_q."""
        return Subquotient(self.ring, self.H(q).ngens, self.F(p, q), self.F(p - 1, q))

    def keys(self) -> list:
        t = self.tower
        return [(p, q) for p in range(t.p_min, t.p_max + 1) for q in self.q_values()]

    def lifts(self, p, q):
        """H(A)_{p,q} coordinates of representatives of the generators of gr_{p,q}."""
        g = self.graded(p, q)
        if g.ngens == 0:
            return self.ring.zeros((self.first.D(p, q).ngens, 0))
        return coord_solve(self.structure_map(p, q), self.H(q), g.gens)

    def perturbations(self, p, q):
        """H(A)_{p,q} coordinates of the classes mapping into F_{p-1} H_q."""
        src = coordinate_module(self.first.D(p, q))
        return coord_preimage(self.structure_map(p, q), src, self.H(q), self.F(p - 1, q))

    # -- the action -------------------------------------------------------------
    def carrier(self) -> DGBigradedModule:
        labels, orders = {}, {}
        for key in self.keys():
            g = self.graded(*key)
            if g.ngens:
                labels[key] = [f"g{k}" for k in range(g.ngens)]
                orders[key] = g.orders
        mod = BigradedModule(self.ring, labels, None if self.ring.is_field else orders, name="grH")
        return DGBigradedModule(mod, GradedMap(mod, mod, (0, -1)), check=False)

    def algebra(self) -> OperadAlgebra:
        if self._graded_alg is None:
            self._graded_alg = associated_graded(self, verify=False)
        return self._graded_alg


def colimit(t: AlgebraTower) -> ConvergenceData:
    return ConvergenceData(t)


def associated_graded(cd: ConvergenceData, verify: bool = True) -> OperadAlgebra:
    """gr H as an algebra over H(P): products of representatives, read in H_q mod F_{p-1}."""
    ring = cd.ring
    DA = homology_action(cd.tower.A)

    def compute(k, bidegs):
        out = DA.out_bidegree(k, bidegs)
        if out[0] > cd.top:
            return None
        T = DA.tensor(k, bidegs)
        if T is None:
            return None
        T = _contract_inputs(ring, T, [cd.lifts(*b) for b in bidegs])
        T = ring.tensordot(cd.structure_map(*out), T, axes=([1], [0]))
        return project_tensor(ring, cd.graded(*out), T)

    alg = OperadAlgebra(DA.operad, cd.carrier(), compute=compute, name="grH")
    alg.base = DA
    if verify:
        _verify_graded(cd, alg)
    cd._graded_alg = alg
    return alg


def _verify_graded(cd, alg):
    ring, DA = cd.ring, alg.base
    o = alg.operad
    keys = alg.module.support
    for n in range(1, o.arity_cap + 1):
        for bidegs in product(keys, repeat=n):
            for k in range(o.dim(n)):
                out = DA.out_bidegree(k, bidegs)
                if out[0] > cd.top or alg.module.rank(*out) == 0:
                    continue
                T = DA.tensor(k, bidegs)
                if T is None:
                    continue
                for h, b in enumerate(bidegs):
                    X = cd.perturbations(*b)
                    if X.shape[1] == 0:
                        continue
                    mats = [cd.lifts(*c) for c in bidegs]
                    mats[h] = X
                    Y = ring.tensordot(cd.structure_map(*out), _contract_inputs(ring, T, mats), axes=([1], [0]))
                    try:
                        P = project_tensor(ring, cd.graded(*out), Y)
                    except ProjectUndefined:
                        raise WellDefinednessViolation(f"product leaves F_{out[0]} at {bidegs}") from None
                    if not ring.is_zero(P):
                        raise WellDefinednessViolation(f"product depends on representatives at {bidegs}, slot {h + 1}")


@dataclass
class GammaMap:
    blocks: dict
    injective: bool
    bijective: bool
    einf: object

    def __bool__(self):
        return self.injective


def gamma_map(cd: ConvergenceData, ss: SpectralSequence) -> GammaMap:
    """F_p H_q / F_{p-1} H_q -> E^inf_{p,q}, [a] -> [j(a)]."""
    ring = cd.ring
    einf = e_infinity(ss)
    blocks = {}
    inj = bij = True
    for key in cd.keys():
        g = cd.graded(*key)
        Einf = einf.page.E(*key)
        if g.ngens == 0:
            blocks[key] = ring.zeros((Einf.ngens, 0))
            bij = bij and Einf.ngens == 0
            continue
        reps = ring.matmul(cd.first.j1(*key), cd.lifts(*key))
        G = Einf.project(reps) if Einf.ngens else ring.zeros((0, g.ngens))
        blocks[key] = G
        K = coord_kernel(G, g, Einf)
        if not ring.is_zero(g.reduce(K)):
            inj = False
        if Einf.ngens:
            try:
                coord_solve(G, Einf, ring.eye(Einf.ngens))
            except NoSolution:
                bij = False
    return GammaMap(blocks, inj, inj and bij and einf.exact, einf)


def check_gamma_multiplicative(cd: ConvergenceData, ss: SpectralSequence, graded: OperadAlgebra | None = None,
                               gamma: GammaMap | None = None) -> Report:
    """gamma(Gamma_gr(pi; y)) = Gamma_Einf(pi; gamma(y)) on every basis tuple."""
    ring = cd.ring
    gr = graded or cd.algebra()
    gm = gamma or gamma_map(cd, ss)
    einf = gm.einf
    E = einf.action
    page = einf.page
    o = gr.operad
    keys = gr.module.support
    n_checks = 0
    for n in range(1, o.arity_cap + 1):
        for bidegs in product(keys, repeat=n):
            for k in range(o.dim(n)):
                out = gr.out_bidegree(k, bidegs)
                Eout = page.E(*out)
                if Eout.ngens == 0:
                    continue
                Tg = gr.tensor(k, bidegs)
                if Tg is None:
                    lhs = ring.zeros((Eout.ngens,) + tuple(gr.module.rank(*b) for b in bidegs))
                else:
                    lhs = ring.tensordot(gm.blocks[out], Tg, axes=([1], [0]))
                Te = E.tensor(k, bidegs)
                if Te is None:
                    rhs = ring.zeros(lhs.shape)
                else:
                    rhs = _contract_inputs(ring, Te, [gm.blocks[b] for b in bidegs])
                n_checks += 1
                diff = ring.sub(lhs, rhs)
                if not ring.is_zero(Eout.reduce(diff.reshape(diff.shape[0], -1))):
                    return Report(Violation("gamma_multiplicative", (o.basis[n][k], bidegs)), n_checks)
    return Report(None, n_checks)


@dataclass(frozen=True)
class BoundedBelow:
    certified: bool
    p_of_q: dict

    def __str__(self):
        return "bounded below: " + ", ".join(f"p({q}) = {p}" for q, p in sorted(self.p_of_q.items()))


def bounded_below(t: AlgebraTower) -> BoundedBelow:
    """A_{p,q} = 0 for p < p_min by construction of the window."""
    q0, q1 = t.q_range()
    return BoundedBelow(True, {q: t.p_min for q in range(q0, q1 + 1)})


__all__ = ["BoundedBelow", "ConvergenceData", "GammaMap", "Unsupported", "WellDefinednessViolation",
           "associated_graded", "bounded_below", "check_gamma_multiplicative", "colimit", "gamma_map"]
