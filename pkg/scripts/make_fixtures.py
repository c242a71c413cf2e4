"""Regenerate the shipped tower fixtures from their seeded generators."""
from __future__ import annotations

import argparse
from pathlib import Path

from opseq.io.document import dump, serialize
from opseq.io.generators import bicomplex, bockstein, collapsed, filtered_dga, trivial

FIXTURES = {
    "filtered_comm.tower": lambda: filtered_dga(seed=2, ring="F2", operad="comm", name="filtered_comm"),
    "bicomplex.tower": lambda: bicomplex(seed=3, ring="F2", operad="comm", name="bicomplex"),
    "collapsed.tower": lambda: collapsed(seed=0, name="collapsed"),
    "trivial.tower": lambda: trivial("F2"),
    "bockstein_q2_z4.tower": lambda: bockstein(q=2, torsion=(4,), free=1, name="bockstein_q2_z4"),
}


def corrupted():
    """filtered_comm with one entry of a C product table flipped."""
    doc = FIXTURES["filtered_comm.tower"]()
    doc.name = "filtered_comm_corrupted"
    ring = doc.ring
    for key in sorted(doc.C.gamma, key=lambda k: (len(k[1]), k[1])):
        T = doc.C.gamma[key]
        if len(key[1]) == 2 and T.size and key[1][0] != key[1][1]:
            T = T.copy()
            idx = (0,) * T.ndim
            T[idx] = ring.add(T[idx], 1)
            doc.C.gamma[key] = T
            return doc
    raise RuntimeError("no mixed product table to corrupt")


def build_all() -> dict:
    out = {name: make() for name, make in FIXTURES.items()}
    out["filtered_comm_corrupted.tower"] = corrupted()
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dir", default=str(Path(__file__).resolve().parent.parent / "fixtures"))
    ap.add_argument("--check", action="store_true", help="compare instead of writing")
    args = ap.parse_args(argv)
    stale = []
    for name, doc in build_all().items():
        path = Path(args.dir) / name
        if args.check:
            if not path.exists() or path.read_text(encoding="utf-8") != serialize(doc):
                stale.append(name)
        else:
            dump(doc, path)
    if stale:
        raise SystemExit(f"stale fixtures: {', '.join(stale)}")


if __name__ == "__main__":
    main()
