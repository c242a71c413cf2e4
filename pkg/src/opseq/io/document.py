"""Tower documents: a canonical JSON text format with exact string-encoded entries.

A document holds the stored components of A and C, the blocks of d, i and
j, the Γ tables of both algebras and an operad descriptor.  Bidegrees are
written ``[p, q]``; matrix and tensor entries are strings in the ring's
exact form ("3", "-1/2").  ``serialize`` is canonical (sorted keys, sorted
block lists, two-space indent), so ``serialize(parse(text))`` is a fixed
point and documents can be compared as text.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..couple import POLICIES, AlgebraTower, build_tower
from ..linalg import Ring
from ..operads import Operad, builtin

FORMAT = "opseq.tower/1"


class DocumentError(ValueError):
    """Malformed document; ``path`` names the field, ``line``/``column`` the JSON position."""

    def __init__(self, message, path: str = "", line: int | None = None, column: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}, column {column}")
        if path:
            where.append(path)
        super().__init__(f"{'; '.join(where)}: {message}" if where else message)
        self.path = path
        self.line = line
        self.column = column


@dataclass
class Side:
    """One algebra of the tower: components, differential and Γ tables."""

    labels: dict = field(default_factory=dict)      # (p, q) -> [label]
    orders: dict = field(default_factory=dict)      # (p, q) -> [int]  (only over Z)
    d: dict = field(default_factory=dict)           # (p, q) -> matrix into (p, q - 1)
    gamma: dict = field(default_factory=dict)       # (op label, ((p, q), ...)) -> tensor
    p_top: int | None = None                        # components above p_top repeat the one at p_top

    def rank(self, key):
        if self.p_top is not None and key[0] > self.p_top:
            key = (self.p_top, key[1])
        return len(self.labels.get(key, ()))


@dataclass(eq=False)
class TowerDocument:
    ring: Ring
    window: tuple
    q_range: tuple
    policy: str
    operad: dict
    A: Side
    C: Side
    i: dict
    j: dict
    name: str = ""
    prop: dict | None = None

    def __eq__(self, other):
        return isinstance(other, TowerDocument) and serialize(self) == serialize(other)

    def build_operad(self) -> Operad:
        return operad_from_descriptor(self.operad, self.ring)

    def to_tower(self) -> AlgebraTower:
        ring = self.ring
        o = self.build_operad()

        def tables(side, path):
            out = {}
            for (label, inputs), T in side.gamma.items():
                n = len(inputs)
                try:
                    k = o.index(n, label)
                except KeyError as exc:
                    raise DocumentError(str(exc), f"{path}.gamma") from None
                out[(k, inputs)] = T
            return out

        policy_orders = (lambda s: s.orders) if not ring.is_field else (lambda s: None)
        return build_tower(ring, o, self.A.labels, self.C.labels, self.window, self.policy,
                           d_a=self.A.d, d_c=self.C.d, i_blocks=self.i, j_blocks=self.j,
                           a_tables=tables(self.A, "A"), c_tables=tables(self.C, "C"),
                           a_orders=policy_orders(self.A), c_orders=policy_orders(self.C), name=self.name)


def operad_from_descriptor(desc: dict, ring: Ring) -> Operad:
    cap = int(desc.get("arity_cap", 3))
    if "builtin" in desc:
        return builtin(desc["builtin"], ring, cap)
    ex = desc["explicit"]
    basis = {int(n): list(v) for n, v in ex["basis"].items()}
    degrees = {int(n): [int(s) for s in v] for n, v in ex["degrees"].items()}
    trans = {int(n): [_decode(ring, m) for m in v] for n, v in ex.get("transpositions", {}).items()}
    comps = {tuple(c["slot"]): _decode(ring, c["tensor"]) for c in ex.get("compositions", [])}
    delta = {int(n): _decode(ring, m) for n, m in ex.get("delta", {}).items()}
    return Operad(ring, basis, degrees, trans, comps, _decode(ring, ex["unit"]), delta or None,
                  arity_cap=cap, name=desc.get("name", "explicit"))


# ---------------------------------------------------------------------------
# encoding


def _encode(ring, a):
    a = np.asarray(a, dtype=object)
    if a.ndim == 0:
        return ring.format(a[()])
    return [_encode(ring, x) for x in a]


def _decode(ring, data, shape=None):
    def walk(x):
        if isinstance(x, list):
            return [walk(y) for y in x]
        if not isinstance(x, str):
            raise ValueError(f"entries are strings, got {x!r}")
        return ring.parse_element(x)
    raw = walk(data)
    arr = np.asarray(raw, dtype=object)
    if shape is not None:
        if 0 in shape:
            return ring.zeros(shape)
        if arr.shape != tuple(shape):
            raise ValueError(f"shape {arr.shape} expected {tuple(shape)}")
    return ring.array(arr)


def _blocks(ring, blocks):
    return [{"at": list(k), "matrix": _encode(ring, m)} for k, m in sorted(blocks.items())]


def _side(ring, s: Side):
    comps = []
    for key in sorted(s.labels):
        c = {"at": list(key), "labels": list(s.labels[key])}
        if key in s.orders and not ring.is_field:
            c["orders"] = [int(x) for x in s.orders[key]]
        comps.append(c)
    gamma = [{"op": op, "inputs": [list(b) for b in inputs], "tensor": _encode(ring, T)}
             for (op, inputs), T in sorted(s.gamma.items(), key=lambda kv: (len(kv[0][1]), kv[0][1], kv[0][0]))]
    return {"components": comps, "d": _blocks(ring, s.d), "gamma": gamma}


def to_json(doc: TowerDocument) -> dict:
    ring = doc.ring
    out = {
        "format": FORMAT,
        "name": doc.name,
        "ring": ring.name,
        "window": list(doc.window),
        "q_range": list(doc.q_range),
        "policy": doc.policy,
        "operad": doc.operad,
        "A": _side(ring, doc.A),
        "C": _side(ring, doc.C),
        "i": _blocks(ring, doc.i),
        "j": _blocks(ring, doc.j),
    }
    if doc.prop is not None:
        out["prop"] = doc.prop
    return out


def serialize(doc: TowerDocument) -> str:
    return json.dumps(to_json(doc), sort_keys=True, indent=2, ensure_ascii=True) + "\n"


# ---------------------------------------------------------------------------
# decoding with positioned errors


def _need(obj, key, path, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise DocumentError(f"missing field {key!r}", path)
    v = obj[key]
    if kind is not None and not isinstance(v, kind):
        raise DocumentError(f"expected {kind.__name__ if isinstance(kind, type) else kind}", f"{path}.{key}")
    return v


def _bideg(x, path):
    if not (isinstance(x, list) and len(x) == 2 and all(isinstance(v, int) and not isinstance(v, bool) for v in x)):
        raise DocumentError("a bidegree is a pair of integers [p, q]", path)
    return (x[0], x[1])


def _read_blocks(ring, data, path, shape_of):
    out = {}
    if not isinstance(data, list):
        raise DocumentError("expected a list of blocks", path)
    for n, blk in enumerate(data):
        bp = f"{path}[{n}]"
        key = _bideg(_need(blk, "at", bp), f"{bp}.at")
        shape = shape_of(key)
        try:
            out[key] = _decode(ring, _need(blk, "matrix", bp), shape)
        except (ValueError, ArithmeticError) as exc:
            raise DocumentError(f"block at {list(key)}: {exc}", f"{bp}.matrix") from None
    return out


def _read_side(ring, data, path, p_top):
    s = Side(p_top=p_top)
    for n, c in enumerate(_need(data, "components", path, list)):
        cp = f"{path}.components[{n}]"
        key = _bideg(_need(c, "at", cp), f"{cp}.at")
        labels = _need(c, "labels", cp, list)
        if not all(isinstance(x, str) for x in labels):
            raise DocumentError("labels are strings", f"{cp}.labels")
        if len(set(labels)) != len(labels):
            raise DocumentError("duplicate basis label", f"{cp}.labels")
        s.labels[key] = labels
        if "orders" in c:
            orders = c["orders"]
            if not (isinstance(orders, list) and len(orders) == len(labels)
                    and all(isinstance(x, int) and x >= 0 for x in orders)):
                raise DocumentError("orders are one non-negative integer per label", f"{cp}.orders")
            s.orders[key] = orders
        elif not ring.is_field:
            s.orders[key] = [0] * len(labels)
    s.d = _read_blocks(ring, _need(data, "d", path), f"{path}.d",
                       lambda k: (s.rank((k[0], k[1] - 1)), s.rank(k)))
    for n, g in enumerate(_need(data, "gamma", path, list)):
        gp = f"{path}.gamma[{n}]"
        op = _need(g, "op", gp, str)
        inputs = tuple(_bideg(b, f"{gp}.inputs") for b in _need(g, "inputs", gp, list))
        try:
            T = _decode(ring, _need(g, "tensor", gp))
        except (ValueError, ArithmeticError) as exc:
            raise DocumentError(str(exc), f"{gp}.tensor") from None
        s.gamma[(op, inputs)] = T
    return s


def parse(text: str) -> TowerDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, "", exc.lineno, exc.colno) from None
    if not isinstance(data, dict):
        raise DocumentError("top level must be an object")
    if data.get("format") != FORMAT:
        raise DocumentError(f"format must be {FORMAT!r}", "format")
    try:
        ring = Ring.parse(_need(data, "ring", "", str))
    except ValueError as exc:
        raise DocumentError(str(exc), "ring") from None
    window = _bideg(_need(data, "window", ""), "window")
    q_range = _bideg(_need(data, "q_range", ""), "q_range")
    policy = _need(data, "policy", "", str)
    if policy not in POLICIES:
        raise DocumentError(f"unknown policy {policy!r}", "policy")
    operad = _need(data, "operad", "", dict)
    if "builtin" not in operad and "explicit" not in operad:
        raise DocumentError("operad needs 'builtin' or 'explicit'", "operad")
    repeat = policy == "repeat_last_map"
    A = _read_side(ring, _need(data, "A", "", dict), "A", window[1])
    C = _read_side(ring, _need(data, "C", "", dict), "C", window[1] + 1 if repeat else None)
    i = _read_blocks(ring, _need(data, "i", ""), "i", lambda k: (A.rank((k[0] + 1, k[1])), A.rank(k)))
    j = _read_blocks(ring, _need(data, "j", ""), "j", lambda k: (C.rank(k), A.rank(k)))
    doc = TowerDocument(ring, window, q_range, policy, operad, A, C, i, j, name=data.get("name", ""),
                        prop=data.get("prop"))
    _check_gamma_shapes(doc)
    return doc


def _check_gamma_shapes(doc):
    try:
        o = doc.build_operad()
    except (KeyError, ValueError) as exc:
        raise DocumentError(str(exc), "operad") from None
    for side, path in ((doc.A, "A"), (doc.C, "C")):
        for n, ((op, inputs), T) in enumerate(list(side.gamma.items())):
            k = len(inputs)
            if k > o.arity_cap or op not in o.basis[k]:
                raise DocumentError(f"{op!r} is not an operation of arity {k}", f"{path}.gamma[{n}]")
            s = o.degrees[k][o.basis[k].index(op)]
            out = (sum(b[0] for b in inputs), s + sum(b[1] for b in inputs))
            shape = (side.rank(out),) + tuple(side.rank(b) for b in inputs)
            if 0 in shape and T.size == 0:
                side.gamma[(op, inputs)] = doc.ring.zeros(shape)
            elif tuple(T.shape) != shape:
                raise DocumentError(f"tensor shape {tuple(T.shape)} expected {shape}", f"{path}.gamma[{n}].tensor")


def load(path) -> TowerDocument:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def dump(doc: TowerDocument, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(doc))


__all__ = ["DocumentError", "FORMAT", "Side", "TowerDocument", "dump", "load", "operad_from_descriptor", "parse",
           "serialize", "to_json"]
