"""Comm, Assoc, Lie and endomorphism operads."""
from __future__ import annotations

from itertools import permutations, product

import numpy as np

from ..linalg import NoSolution, Ring, Solver
from .operad import Operad, UnsupportedArity


def _all_slots(cap):
    for m in range(1, cap + 1):
        for n in range(1, cap + 2 - m):
            for i in range(1, m + 1):
                yield m, n, i


def comm(ring: Ring | None = None, arity_cap: int = 3) -> Operad:
    """Commutative operad: one degree-0 operation in each arity, trivial action."""
    ring = ring or Ring.prime_field(2)
    basis = {n: ["1" if n == 1 else f"mu{n}"] for n in range(1, arity_cap + 1)}
    degrees = {n: [0] for n in basis}
    trans = {n: [[[1]]] * (n - 1) for n in range(2, arity_cap + 1)}
    comps = {(m, n, i): [[[1]]] for m, n, i in _all_slots(arity_cap)}
    return Operad(ring, basis, degrees, trans, comps, unit=[1], arity_cap=arity_cap, name="comm")


def _word_label(w) -> str:
    return "".join(str(c + 1) for c in w) if len(w) < 10 else ",".join(str(c + 1) for c in w)


def assoc(ring: Ring | None = None, arity_cap: int = 3) -> Operad:
    """Associative operad; P(n) has the words (orderings of 1..n) as basis.

    The word ``w`` acts as x_{w_1} x_{w_2} ... x_{w_n}.
    """
    ring = ring or Ring.prime_field(2)
    words = {n: list(permutations(range(n))) for n in range(1, arity_cap + 1)}
    index = {n: {w: k for k, w in enumerate(words[n])} for n in words}
    basis = {n: [_word_label(w) for w in words[n]] for n in words}
    degrees = {n: [0] * len(words[n]) for n in words}
    trans = {}
    for n in range(2, arity_cap + 1):
        mats = []
        for h in range(1, n):
            M = np.zeros((len(words[n]),) * 2, dtype=object)
            for k, w in enumerate(words[n]):
                # swapping the letters h and h+1
                swapped = tuple(h if c == h - 1 else h - 1 if c == h else c for c in w)
                M[index[n][swapped], k] = 1
            mats.append(M)
        trans[n] = mats
    comps = {}
    for m, n, i in _all_slots(arity_cap):
        T = np.zeros((len(words[m + n - 1]), len(words[m]), len(words[n])), dtype=object)
        for a, w in enumerate(words[m]):
            for b, u in enumerate(words[n]):
                out = []
                for c in w:
                    if c == i - 1:
                        out.extend(x + i - 1 for x in u)
                    elif c > i - 1:
                        out.append(c + n - 1)
                    else:
                        out.append(c)
                T[index[m + n - 1][tuple(out)], a, b] = 1
        comps[(m, n, i)] = T
    return Operad(ring, basis, degrees, trans, comps, unit=[1], arity_cap=arity_cap, name="assoc")


def lie(ring: Ring | None = None, arity_cap: int = 3) -> Operad:
    """Lie operad inside Assoc: bracket b = 12 - 21, Lie(3) = span{b o_1 b, b o_2 b}."""
    ring = ring or Ring.prime_field(3)
    if arity_cap > 3:
        raise UnsupportedArity("the Lie operad is provided up to arity 3")
    if ring.characteristic == 2:
        raise ValueError("the Lie encoding needs a ring where 2 != 0")
    A = assoc(ring, arity_cap)
    one = ring.coerce(1)
    gens = {1: A.unit.reshape(-1, 1)}
    labels = {1: ["1"]}
    if arity_cap >= 2:
        b = A.element(2, "12") - A.element(2, "21")
        gens[2] = ring.reduce(b).reshape(-1, 1)
        labels[2] = ["b"]
    if arity_cap >= 3:
        c1 = A.compose(2, 1, gens[2][:, 0], 2, gens[2][:, 0])
        c2 = A.compose(2, 2, gens[2][:, 0], 2, gens[2][:, 0])
        gens[3] = np.stack([c1, c2], axis=1)
        labels[3] = ["b1b", "b2b"]
    solvers = {n: Solver(g, ring) for n, g in gens.items()}

    def coords(n, v):
        try:
            return solvers[n].solve(v)
        except NoSolution:
            raise ValueError(f"element of Assoc({n}) is not in the Lie suboperad") from None

    trans = {n: [coords(n, ring.matmul(A.transpositions[n][h - 1], gens[n])) for h in range(1, n)]
             for n in gens if n >= 2}
    comps = {}
    for m, n, i in _all_slots(arity_cap):
        T = ring.zeros((gens[m + n - 1].shape[1], gens[m].shape[1], gens[n].shape[1]))
        for a in range(gens[m].shape[1]):
            for c in range(gens[n].shape[1]):
                T[:, a, c] = coords(m + n - 1, A.compose(m, i, gens[m][:, a], n, gens[n][:, c]))
        comps[(m, n, i)] = T
    degrees = {n: [0] * len(labels[n]) for n in labels}
    o = Operad(ring, labels, degrees, trans, comps, unit=[one], arity_cap=arity_cap, name="lie")
    o.embedding = (A, gens)
    return o


def endomorphism(degrees, ring: Ring | None = None, d=None, arity_cap: int = 3) -> Operad:
    """End(V) for a graded free module V with basis degrees ``degrees``.

    Basis of P(n): matrix units E[o; a_1..a_n] (sends x_{a_1} (x) ... (x)
    x_{a_n} to x_o), of degree |o| - sum |a_k|.  An optional differential
    ``d`` on V (a square matrix of degree -1) gives the internal differential
    delta f = d f - (-1)^{|f|} f d.
    """
    ring = ring or Ring.rationals()
    r = len(degrees)
    degs = list(degrees)
    elems = {n: [(o, a) for o in range(r) for a in product(range(r), repeat=n)] for n in range(1, arity_cap + 1)}
    index = {n: {e: k for k, e in enumerate(elems[n])} for n in elems}
    basis = {n: ["E%d;%s" % (o, ",".join(map(str, a))) for o, a in elems[n]] for n in elems}
    deg = {n: [degs[o] - sum(degs[c] for c in a) for o, a in elems[n]] for n in elems}

    trans = {}
    for n in range(2, arity_cap + 1):
        mats = []
        for h in range(1, n):
            M = ring.zeros((len(elems[n]),) * 2)
            for k, (o, a) in enumerate(elems[n]):
                s = -1 if (degs[a[h - 1]] * degs[a[h]]) % 2 else 1
                b = list(a)
                b[h - 1], b[h] = b[h], b[h - 1]
                M[index[n][(o, tuple(b))], k] = ring.coerce(s)
            mats.append(M)
        trans[n] = mats

    comps = {}
    for m, n, i in _all_slots(arity_cap):
        T = ring.zeros((len(elems[m + n - 1]), len(elems[m]), len(elems[n])))
        for x, (o, a) in enumerate(elems[m]):
            for y, (o2, b) in enumerate(elems[n]):
                if a[i - 1] != o2:
                    continue
                gdeg = degs[o2] - sum(degs[c] for c in b)
                s = -1 if (gdeg * sum(degs[c] for c in a[: i - 1])) % 2 else 1
                out = (o, a[: i - 1] + b + a[i:])
                T[index[m + n - 1][out], x, y] = ring.coerce(s)
        comps[(m, n, i)] = T
    unit = ring.zeros(len(elems[1]))
    for o in range(r):
        unit[index[1][(o, (o,))]] = ring.coerce(1)

    delta = None
    if d is not None:
        dV = ring.array(d).reshape(r, r)
        delta = {}
        for n in elems:
            D = ring.zeros((len(elems[n]),) * 2)
            for k, (o, a) in enumerate(elems[n]):
                fdeg = deg[n][k]
                # d o E: x_a -> d(x_o)
                for o2 in range(r):
                    c = dV[o2, o]
                    if c != 0:
                        D[index[n][(o2, a)], k] = ring.add(D[index[n][(o2, a)], k], c)
                # E o d_{V^n}: sum over slots, Koszul sign from earlier inputs
                for h in range(n):
                    for src in range(r):
                        c = dV[a[h], src]
                        if c == 0:
                            continue
                        b = a[:h] + (src,) + a[h + 1:]
                        s = -1 if sum(degs[t] for t in a[:h]) % 2 else 1
                        s *= 1 if fdeg % 2 else -1  # the -(-1)^{|f|} factor
                        D[index[n][(o, b)], k] = ring.add(D[index[n][(o, b)], k], ring.coerce(s) * c)
            delta[n] = ring.reduce(D)
    return Operad(ring, basis, deg, trans, comps, unit=unit, delta=delta, arity_cap=arity_cap,
                  name=f"endo({r})")


BUILTINS = {"comm": comm, "assoc": assoc, "lie": lie}


def builtin(name: str, ring: Ring, arity_cap: int = 3) -> Operad:
    """Look up "comm", "assoc", "lie" or "endo(r)" (ungraded rank-r module)."""
    name = name.strip()
    if name.startswith("endo(") and name.endswith(")"):
        r = int(name[5:-1])
        return endomorphism([0] * r, ring, arity_cap=arity_cap)
    try:
        return BUILTINS[name](ring, arity_cap)
    except KeyError:
        raise KeyError(f"unknown operad {name!r}") from None
