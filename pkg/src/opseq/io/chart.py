"""Page charts: a grid of E^r_{p,q} invariants with arrows for nonzero d_r.

Cells show the free rank followed by bracketed torsion orders, largest
first ("2[4,2]" is Z^2 + Z/4 + Z/2).  With ``grading="reindexed"`` the
cell for (p, q) is drawn at (p, q - p), so arrows move by (-r, r - 1)
instead of (-r, -1).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..spectral import Page, SpectralSequence, detect_stabilization, page_via_derivation

GRADINGS = ("paper", "reindexed")


def cell_text(invariants) -> str:
    free, torsion = invariants
    if not torsion:
        return str(free)
    return f"{free}[{','.join(str(t) for t in sorted(torsion, reverse=True))}]"


@dataclass
class PageChart:
    r: int
    cells: dict = field(default_factory=dict)     # display (x, y) -> text
    arrows: list = field(default_factory=list)    # [(src (x, y), dst (x, y))]


@dataclass
class ChartDocument:
    grading: str
    pages: list
    title: str = ""

    def bounds(self):
        pts = [xy for pg in self.pages for xy in pg.cells]
        if not pts:
            return (0, 0, 0, 0)
        xs = [x for x, _ in pts]
        ys = [y for _, y in pts]
        return (min(xs), max(xs), min(ys), max(ys))


def _place(p, q, grading):
    return (p, q) if grading == "paper" else (p, q - p)


def display_keys(page: Page) -> list:
    """Bidegrees to show; a repeat tower is cut two columns past the window since higher columns copy those."""
    t = page.tower
    return [k for k in page.keys() if not t.repeat or k[0] <= t.p_max + 2]


def page_chart(page: Page, grading: str = "paper") -> PageChart:
    if grading not in GRADINGS:
        raise ValueError(f"grading is one of {GRADINGS}")
    pc = PageChart(page.r)
    r = page.r
    support = [k for k in display_keys(page) if page.E(*k).ngens]
    for p, q in support:
        pc.cells[_place(p, q, grading)] = cell_text(page.invariants(p, q))
    for p, q in support:
        tgt = (p - r, q - 1)
        if tgt not in support:
            continue
        if not page.ring.is_zero(page.E(*tgt).reduce(page.d(p, q))):
            pc.arrows.append((_place(p, q, grading), _place(*tgt, grading)))
    pc.arrows.sort()
    return pc


def chart_document(ss: SpectralSequence, grading: str = "paper", r_max: int | None = None) -> ChartDocument:
    """Pages 1 .. the certified stable level (or r_max when not certified)."""
    stab = detect_stabilization(ss)
    last = stab.level if stab.stable else (r_max or ss.r_max)
    if r_max is not None:
        last = min(last, r_max)
    pages = [page_chart(page_via_derivation(ss, r), grading) for r in range(1, last + 1)]
    return ChartDocument(grading, pages, ss.tower.name)


def render_ascii(chart: ChartDocument) -> str:
    x0, x1, y0, y1 = chart.bounds()
    width = max([len(t) for pg in chart.pages for t in pg.cells.values()] + [1])
    label_w = max(len(str(y)) for y in (y0, y1)) + 1
    lines = []
    for pg in chart.pages:
        lines.append(f"E^{pg.r} ({chart.grading} grading){': ' + chart.title if chart.title else ''}")
        for y in range(y1, y0 - 1, -1):
            row = [pg.cells.get((x, y), ".").rjust(width) for x in range(x0, x1 + 1)]
            lines.append(f"{str(y).rjust(label_w)} | " + " ".join(row))
        lines.append(" " * label_w + " +-" + "-" * ((width + 1) * (x1 - x0 + 1)))
        lines.append(" " * (label_w + 3) + " ".join(str(x).rjust(width) for x in range(x0, x1 + 1)))
        for src, dst in pg.arrows:
            lines.append(f"  d_{pg.r}: {src} -> {dst}")
        lines.append("")
    return "\n".join(lines)


CELL = 48
MARGIN = 40
PAGE_GAP = 24


def render_svg(chart: ChartDocument) -> str:
    """A fixed-layout SVG: one panel per page, stacked vertically."""
    x0, x1, y0, y1 = chart.bounds()
    cols, rows = x1 - x0 + 1, y1 - y0 + 1
    panel_w = 2 * MARGIN + cols * CELL
    panel_h = 2 * MARGIN + rows * CELL
    total_h = len(chart.pages) * (panel_h + PAGE_GAP)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{panel_w}" height="{total_h}" '
        f'viewBox="0 0 {panel_w} {total_h}">',
        '<defs><marker id="head" markerWidth="8" markerHeight="8" refX="6" refY="3" orient="auto">'
        '<path d="M0,0 L6,3 L0,6 z"/></marker></defs>',
    ]

    def centre(x, y, top):
        cx = MARGIN + (x - x0) * CELL + CELL // 2
        cy = top + MARGIN + (y1 - y) * CELL + CELL // 2
        return cx, cy

    for n, pg in enumerate(chart.pages):
        top = n * (panel_h + PAGE_GAP)
        out.append(f'<g class="page" data-r="{pg.r}">')
        out.append(f'<text x="{MARGIN}" y="{top + MARGIN - 16}" font-size="14">E^{pg.r} ({chart.grading})</text>')
        for x in range(x0, x1 + 1):
            cx, _ = centre(x, y0, top)
            out.append(f'<text x="{cx}" y="{top + panel_h - 12}" font-size="10" text-anchor="middle">{x}</text>')
        for y in range(y0, y1 + 1):
            _, cy = centre(x0, y, top)
            out.append(f'<text x="{MARGIN - 12}" y="{cy + 4}" font-size="10" text-anchor="end">{y}</text>')
        for (x, y), text in sorted(pg.cells.items()):
            cx, cy = centre(x, y, top)
            out.append(f'<rect x="{cx - CELL // 2 + 2}" y="{cy - CELL // 2 + 2}" width="{CELL - 4}" '
                       f'height="{CELL - 4}" fill="none" stroke="#888"/>')
            out.append(f'<text x="{cx}" y="{cy + 4}" font-size="12" text-anchor="middle">{text}</text>')
        for src, dst in pg.arrows:
            sx, sy = centre(*src, top)
            tx, ty = centre(*dst, top)
            out.append(f'<line x1="{sx}" y1="{sy}" x2="{tx}" y2="{ty}" stroke="#c00" marker-end="url(#head)"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


__all__ = ["ChartDocument", "GRADINGS", "PageChart", "cell_text", "chart_document", "display_keys", "page_chart", "render_ascii",
           "render_svg"]
