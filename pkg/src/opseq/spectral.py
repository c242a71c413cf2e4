"""Pages of the spectral sequence of a tower, by two independent routes.

``page_via_derivation`` iterates the derived couple.  ``page_via_cycles``
writes E^r = Z^r / B^r directly with Z^r = k^{-1}(im i^{r-1}) and
B^r = j(ker i^{r-1}), and computes d_r[z] = [j(w)] for i^{r-1}(w) = k(z).
Both present E^r_{p,q} as a Subquotient of the E^1 = H(C) coordinate
module, so the two routes can be compared exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .couple import AlgebraTower, Couple, PreimageFailed, coordinate_module, derive, first_couple, page_module
from .graded import DGBigradedModule, GradedMap
from .linalg import (NoSolution, ProjectUndefined, Subquotient, coord_kernel, coord_preimage, coord_solve, hstack,
                     relation_matrix, same_span)
from .operads import OperadAlgebra, check_algebra, homology_action, project_tensor
from .operads.homology import _contract_inputs
from .report import Report, Violation

ROUTES = ("derivation", "cycles")


class ClosureViolation(ValueError):
    """The E^1 action does not preserve Z^r, or does not kill B^r."""

    def __init__(self, kind, where):
        super().__init__(f"{kind} at {where}")
        self.kind = kind
        self.where = where


class Page:
    """E^r with its differential; subclasses supply ``E`` and ``d``."""

    route = ""

    def __init__(self, tower: AlgebraTower, r: int):
        self.tower = tower
        self.r = r
        self.ring = tower.ring
        self._carrier = None

    def p_top(self):
        t = self.tower
        return t.p_max + 2 * self.r if t.repeat else None

    def key(self, p, q):
        top = self.p_top()
        return (min(p, top) if top is not None else p, q)

    def keys(self) -> list:
        t = self.tower
        q0, q1 = t.q_range()
        top = self.p_top() if t.repeat else t.p_max
        return [(p, q) for p in range(t.p_min, top + 1) for q in range(q0, q1 + 1)]

    def support(self) -> list:
        return [k for k in self.keys() if self.E(*k).ngens]

    def E(self, p, q) -> Subquotient:
        raise NotImplementedError

    def d(self, p, q) -> np.ndarray:
        raise NotImplementedError

    def invariants(self, p, q) -> tuple:
        return self.E(p, q).invariants()

    def carrier(self):
        if self._carrier is None:
            self._carrier = page_module(self.ring, self.E, self.keys(), self.p_top(), f"E{self.r}")
        return self._carrier

    def d_map(self) -> GradedMap:
        M = self.carrier()
        return GradedMap(M, M, (-self.r, -1), compute=lambda p, q: self.d(p, q), name=f"d_{self.r}")

    def dg(self) -> DGBigradedModule:
        return DGBigradedModule(self.carrier(), self.d_map(), check=False)

    def d_is_zero(self) -> bool:
        return all(self.ring.is_zero(self.d(*k)) for k in self.support())

    def __repr__(self):
        return f"Page(r={self.r}, route={self.route})"


class DerivedPage(Page):
    route = "derivation"

    def __init__(self, couple: Couple):
        super().__init__(couple.tower, couple.r)
        self.couple = couple

    def E(self, p, q):
        return self.couple.E(p, q)

    def d(self, p, q):
        return self.couple.d(p, q)


class CyclesPage(Page):
    """Z^r = k^{-1}(im i^{r-1}), B^r = j(ker i^{r-1}) computed in E^1 coordinates.

    ``exponent_offset`` shifts the power of i (a mutation hook for testing
    the cross-check; 0 is the correct construction).
    """

    route = "cycles"

    def __init__(self, tower: AlgebraTower, r: int, exponent_offset: int = 0):
        super().__init__(tower, r)
        self.first = tower.first()
        self.e = r - 1 + exponent_offset
        self._cache = {}

    def _get(self, name, p, q, fn):
        k = (name,) + self.key(p, q)
        v = self._cache.get(k)
        if v is None:
            v = self._cache[k] = fn(*self.key(p, q))
        return v

    def Dc(self, p, q):
        return coordinate_module(self.first.D(p, q))

    def ipow(self, p, q, n):
        return self.first.ipow(p, q, n)

    def E(self, p, q):
        return self._get("E", p, q, self._E)

    def _E(self, p, q):
        ring, f, r, e = self.ring, self.first, self.r, self.e
        E1 = coordinate_module(f.E(p, q))
        g = E1.ngens
        if g == 0:
            return E1
        S = self.ipow(p - r, q - 1, e)
        Zc = coord_preimage(f.k1(p, q), E1, self.Dc(p - 1, q - 1), S)
        Kc = coord_kernel(self.ipow(p, q, e), self.Dc(p, q), self.Dc(p + e, q))
        Bc = ring.matmul(f.j1(p, q), Kc) if Kc.shape[1] else None
        Z = hstack(ring, g, Zc if Zc.shape[1] else None, E1.Bb)
        B = hstack(ring, g, Bc, E1.Bb)
        return Subquotient(ring, g, Z, B)

    def d(self, p, q):
        return self._get("d", p, q, self._d)

    def _d(self, p, q):
        ring, f, r, e = self.ring, self.first, self.r, self.e
        src, tgt = self.E(p, q), self.E(p - r, q - 1)
        if src.ngens == 0 or tgt.ngens == 0:
            return ring.zeros((tgt.ngens, src.ngens))
        y = ring.matmul(f.k1(p, q), src.gens)
        try:
            w = coord_solve(self.ipow(p - r, q - 1, e), self.Dc(p - 1, q - 1), y)
        except NoSolution:
            raise PreimageFailed(f"k(z) is not in the image of i^{e} at {(p - 1, q - 1)}") from None
        return tgt.project(ring.matmul(f.j1(p - r, q - 1), w))


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Stabilization:
    stable: bool
    level: int | None
    bound: int | None
    reason: str

    def __str__(self):
        if self.stable:
            return f"stable at r={self.level}"
        return f"undetermined ({self.reason})"


class SpectralSequence:
    """Lazily computed pages of the spectral sequence of ``tower``."""

    def __init__(self, tower: AlgebraTower, r_max: int = 16):
        self.tower = tower
        self.r_max = r_max
        self.ring = tower.ring
        self._couples = []
        self._cycles = {}
        self._actions = {}
        self._e1 = None
        self._stab = None

    def couple(self, r: int) -> Couple:
        if r < 1:
            raise ValueError("pages start at r = 1")
        if not self._couples:
            self._couples.append(first_couple(self.tower))
        while len(self._couples) < r:
            self._couples.append(derive(self._couples[-1]))
        return self._couples[r - 1]

    def page(self, r: int, route: str = "derivation") -> Page:
        if route == "derivation":
            return DerivedPage(self.couple(r))
        if route == "cycles":
            if r not in self._cycles:
                self._cycles[r] = CyclesPage(self.tower, r)
            return self._cycles[r]
        raise ValueError(f"unknown route {route!r}")

    def e1_algebra(self) -> OperadAlgebra:
        if self._e1 is None:
            self._e1 = homology_action(self.tower.C)
        return self._e1


def page_via_derivation(ss: SpectralSequence, r: int) -> Page:
    return ss.page(r, "derivation")


def page_via_cycles(ss: SpectralSequence, r: int, exponent_offset: int = 0) -> Page:
    if exponent_offset:
        return CyclesPage(ss.tower, r, exponent_offset)
    return ss.page(r, "cycles")


def cross_check(ss: SpectralSequence, r: int, cycles: Page | None = None) -> Report:
    """Both routes give the same subquotients of E^1 and the same d_r."""
    ring = ss.ring
    a = page_via_derivation(ss, r)
    b = cycles or page_via_cycles(ss, r)
    n = 0
    try:
        keys = a.keys()
        T = {}
        for key in keys:
            Ea, Eb = a.E(*key), b.E(*key)
            n += 1
            if Ea.invariants() != Eb.invariants():
                return Report(Violation("cross_check", (r, key), f"invariants {Ea.invariants()} != {Eb.invariants()}"), n)
            if not (same_span(Ea.Zb, Eb.Zb, ring) and same_span(Ea.Bb, Eb.Bb, ring)):
                return Report(Violation("cross_check", (r, key), "Z^r or B^r differ"), n)
            if Ea.ngens == 0:
                T[key] = ring.zeros((0, 0))
                continue
            fwd = Eb.project(Ea.gens)
            back = Ea.project(Eb.gens)
            n += 1
            if not (ring.is_zero(Ea.reduce(ring.sub(ring.matmul(back, fwd), ring.eye(Ea.ngens))))
                    and ring.is_zero(Eb.reduce(ring.sub(ring.matmul(fwd, back), ring.eye(Eb.ngens))))):
                return Report(Violation("cross_check", (r, key), "identity on representatives is not an isomorphism"), n)
            T[key] = fwd
        for key in keys:
            p, q = key
            tgt = (p - r, q - 1)
            if a.E(*key).ngens == 0 or a.E(*tgt).ngens == 0:
                continue
            Ttgt = T.get(tgt)
            if Ttgt is None:
                Ttgt = b.E(*tgt).project(a.E(*tgt).gens)
            lhs = ring.matmul(b.d(p, q), T[key])
            rhs = ring.matmul(Ttgt, a.d(p, q))
            n += 1
            if not ring.is_zero(b.E(*tgt).reduce(ring.sub(lhs, rhs))):
                return Report(Violation("cross_check", (r, key), "d_r does not commute with the comparison"), n)
    except (ProjectUndefined, PreimageFailed, NoSolution) as exc:
        return Report(Violation("cross_check", (r,), f"routes disagree: {exc}"), n)
    return Report(None, n)


# ---------------------------------------------------------------------------
# operad actions on pages


def page_action(ss: SpectralSequence, r: int, route: str = "derivation", verify: bool = True) -> OperadAlgebra:
    """The action on E^r induced from the action on E^1 = H(C).

    Representatives are multiplied at the E^1 level and reduced modulo B^r.
    With ``verify`` every basis tuple is checked for closure in Z^r and for
    independence of the representatives (raises ClosureViolation).
    """
    key = (r, route)
    if key in ss._actions:
        alg = ss._actions[key]
        if verify and not alg.verified:
            _verify_page_action(alg)
        return alg
    page = ss.page(r, route)
    ring = ss.ring
    E1 = ss.e1_algebra()

    def compute(k, bidegs):
        T = E1.tensor(k, bidegs)
        if T is None:
            return None
        T = _contract_inputs(ring, T, [page.E(*b).gens for b in bidegs])
        out = E1.out_bidegree(k, bidegs)
        try:
            return project_tensor(ring, page.E(*out), T)
        except ProjectUndefined:
            raise ClosureViolation("closure", (E1.operad.basis[len(bidegs)][k], bidegs)) from None

    alg = OperadAlgebra(E1.operad, page.dg(), compute=compute, name=f"E{r}")
    alg.page = page
    alg.e1 = E1
    alg.verified = False
    ss._actions[key] = alg
    if verify:
        _verify_page_action(alg)
    return alg


def _page_tuples(alg, n):
    page = alg.page
    keys = page.support()
    M = alg.module
    degs = set(alg.operad.degrees[n]) or {0}
    for bidegs in product(keys, repeat=n):
        P = sum(b[0] for b in bidegs)
        Q = sum(b[1] for b in bidegs)
        if any(M.rank(P, s + Q) for s in degs):
            yield bidegs


def _verify_page_action(alg):
    page, E1, ring = alg.page, alg.e1, alg.ring
    o = alg.operad
    for n in range(1, o.arity_cap + 1):
        for bidegs in _page_tuples(alg, n):
            for k in range(o.dim(n)):
                alg.tensor(k, bidegs)  # closure
                T = E1.tensor(k, bidegs)
                if T is None:
                    continue
                out = E1.out_bidegree(k, bidegs)
                Eout = page.E(*out)
                for h, b in enumerate(bidegs):
                    mats = [page.E(*c).gens for c in bidegs]
                    Bb = page.E(*b).Bb
                    if Bb.shape[1] == 0:
                        continue
                    mats[h] = Bb
                    X = _contract_inputs(ring, T, mats)
                    try:
                        P = project_tensor(ring, Eout, X)
                    except ProjectUndefined:
                        raise ClosureViolation("closure", (o.basis[n][k], bidegs, f"slot {h + 1}")) from None
                    if not ring.is_zero(P):
                        raise ClosureViolation("well_defined", (o.basis[n][k], bidegs, f"slot {h + 1}"))
    alg.verified = True


def check_leibniz(ss: SpectralSequence, r: int, route: str = "derivation") -> Report:
    """d_r(Γ(π; x)) = Σ_h ± Γ(π; ..., d_r x_h, ...) on every basis tuple of E^r."""
    try:
        alg = page_action(ss, r, route, verify=True)
        return check_algebra(alg, alg.page.support(), axioms=("derivation",))
    except ClosureViolation as exc:
        return Report(Violation(exc.kind, exc.where, f"page {r}"), 0)


# ---------------------------------------------------------------------------
# stabilization and E-infinity


def kernel_chain_length(ss: SpectralSequence, cap: int) -> int | None:
    """Least N with ker i^N = ker i^{N+1} on D^1 at the top of the window (all q)."""
    t, ring = ss.tower, ss.ring
    f = t.first()
    q0, q1 = t.q_range()
    top = t.p_max
    N = 0
    for q in range(q0 - 1, q1 + 1):
        D = coordinate_module(f.D(top, q))
        if D.ngens == 0:
            continue
        phi = f.i1(top, q)
        rel = relation_matrix(ring, D.orders)
        power = ring.eye(D.ngens)
        prev = hstack(ring, D.ngens, coord_kernel(power, D, D), rel)
        for n in range(cap + 1):
            power = D.reduce(ring.matmul(phi, power))
            cur = hstack(ring, D.ngens, coord_kernel(power, D, D), rel)
            if same_span(prev, cur, ring):
                N = max(N, n)
                break
            prev = cur
        else:
            return None
    return N


def detect_stabilization(ss: SpectralSequence) -> Stabilization:
    """Certify E^r = E^infinity from the window width and the kernel chain of i.

    With N the length of the kernel chain of i on D^1 at the top of the
    window, every Z^r and B^r is constant for r >= R = width + N + 1, so
    E^R = E^infinity; the reported level is the first r after which every
    d_r up to R vanishes.
    """
    if ss._stab is not None:
        return ss._stab
    t = ss.tower
    N = kernel_chain_length(ss, ss.r_max)
    if N is None:
        res = Stabilization(False, None, None, "kernel chain of i does not stabilize within r_max")
    else:
        R = t.width + N + 1
        if R > ss.r_max:
            res = Stabilization(False, None, R, f"certificate needs r = {R} > r_max = {ss.r_max}")
        else:
            last = 0
            for r in range(1, R + 1):
                if not page_via_derivation(ss, r).d_is_zero():
                    last = r
            if last == R:
                res = Stabilization(False, None, R, f"d_{R} is nonzero beyond the certified bound")
            else:
                res = Stabilization(True, last + 1, R, f"d_r = 0 for {last + 1} <= r <= {R}")
    ss._stab = res
    return res


@dataclass
class EInfinity:
    page: Page
    action: OperadAlgebra
    exact: bool
    level: int
    stabilization: Stabilization


def e_infinity(ss: SpectralSequence) -> EInfinity:
    """The stable page with its action (a flagged candidate at r_max when not certified)."""
    stab = detect_stabilization(ss)
    level = stab.level if stab.stable else ss.r_max
    page = page_via_derivation(ss, level)
    if stab.stable:
        top = page_via_derivation(ss, stab.bound)
        for key in page.keys():
            if not page.E(*key).same_as(top.E(*key)):
                raise AssertionError(f"E^{level} and E^{stab.bound} differ at {key}")
    alg = page_action(ss, level, verify=True)
    return EInfinity(page, alg, stab.stable, level, stab)


__all__ = ["ClosureViolation", "CyclesPage", "DerivedPage", "EInfinity", "Page", "ROUTES", "SpectralSequence",
           "Stabilization", "check_leibniz", "cross_check", "detect_stabilization", "e_infinity",
           "kernel_chain_length", "page_action", "page_via_cycles", "page_via_derivation"]
