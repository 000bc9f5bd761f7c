"""SVG 1.1 figures of tropical curves, relevant cells and discriminants."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from xml.sax.saxutils import escape

from .curves import TropCurve
from .discriminant import PLSet
from .geometry import Piece
from .overlay import Region

PANEL = 360
MARGIN = 24


class EmptyViewport(ValueError):
    pass


@dataclass(frozen=True)
class Viewport:
    xmin: Fraction
    ymin: Fraction
    xmax: Fraction
    ymax: Fraction

    def __post_init__(self):
        for name in ("xmin", "ymin", "xmax", "ymax"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.xmin >= self.xmax or self.ymin >= self.ymax:
            raise EmptyViewport(f"degenerate viewport {self}")

    @classmethod
    def around(cls, points, pad=1) -> Viewport:
        """Smallest box containing the points, grown by pad on each side."""
        pts = list(points) or [(0, 0)]
        xs = [Fraction(p[0]) for p in pts]
        ys = [Fraction(p[1]) for p in pts]
        return cls(min(xs) - pad, min(ys) - pad, max(xs) + pad, max(ys) + pad)


@dataclass(frozen=True)
class Scene:
    curves: tuple = ()  # first drawn solid, second dashed
    discriminant: PLSet | None = None
    shaded: tuple = ()  # Regions
    labels: tuple = ()  # (point, text)
    title: str = ""


def clip_piece(piece: Piece, box: Viewport):
    """Endpoints of the part of a piece inside the box, or None."""
    lo = None if piece.lo is None else Fraction(piece.lo)
    hi = None if piece.hi is None else Fraction(piece.hi)
    (bx, by), (dx, dy) = piece.base, piece.direction
    for start, speed, low, high in ((bx, dx, box.xmin, box.xmax), (by, dy, box.ymin, box.ymax)):
        if speed == 0:
            if not low <= start <= high:
                return None
            continue
        t1, t2 = Fraction(low - start, speed), Fraction(high - start, speed)
        t1, t2 = min(t1, t2), max(t1, t2)
        lo = t1 if lo is None else max(lo, t1)
        hi = t2 if hi is None else min(hi, t2)
    if lo > hi:
        return None
    return piece.at(lo), piece.at(hi)


def _region_polygon(region: Region, box: Viewport) -> list:
    """Vertices of a region cut down to the box, in float coordinates."""
    reach = float(box.xmax - box.xmin + box.ymax - box.ymin)
    reach += max(abs(float(c)) for p in region.points for c in p) + max(
        abs(float(c)) for c in (box.xmin, box.xmax, box.ymin, box.ymax)
    )
    pts = [(float(x), float(y)) for x, y in region.points]
    pts += [(x + reach * d[0], y + reach * d[1]) for x, y in pts for d in region.directions]
    hull = _float_hull(pts)
    for axis, bound, keep_above in (
        (0, float(box.xmin), True),
        (0, float(box.xmax), False),
        (1, float(box.ymin), True),
        (1, float(box.ymax), False),
    ):
        hull = _clip_half_plane(hull, axis, bound, keep_above)
        if not hull:
            break
    return hull


def _float_hull(pts: list) -> list:
    pts = sorted(set(pts))
    if len(pts) < 3:
        return pts

    def half(seq):
        out = []
        for p in seq:
            while (
                len(out) >= 2
                and (
                    (out[-1][0] - out[-2][0]) * (p[1] - out[-2][1])
                    - (out[-1][1] - out[-2][1]) * (p[0] - out[-2][0])
                )
                <= 0
            ):
                out.pop()
            out.append(p)
        return out[:-1]

    return half(pts) + half(pts[::-1])


def _clip_half_plane(poly: list, axis: int, bound: float, keep_above: bool) -> list:
    def inside(p):
        return p[axis] >= bound if keep_above else p[axis] <= bound

    out = []
    for i, cur in enumerate(poly):
        prev = poly[i - 1]
        if inside(cur) != inside(prev):
            s = (bound - prev[axis]) / (cur[axis] - prev[axis])
            out.append((prev[0] + s * (cur[0] - prev[0]), prev[1] + s * (cur[1] - prev[1])))
        if inside(cur):
            out.append(cur)
    return out


class _Panel:
    def __init__(self, box: Viewport, left: float):
        self.box = box
        span = max(float(box.xmax - box.xmin), float(box.ymax - box.ymin))
        self.scale = (PANEL - 2 * MARGIN) / span
        self.left = left

    def xy(self, p) -> tuple[float, float]:
        x = self.left + MARGIN + (float(p[0]) - float(self.box.xmin)) * self.scale
        y = PANEL - MARGIN - (float(p[1]) - float(self.box.ymin)) * self.scale
        return round(x, 3), round(y, 3)

    def line(self, p, q, cls: str) -> str:
        (x1, y1), (x2, y2) = self.xy(p), self.xy(q)
        return f'<line class="{cls}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>'


def _axes(panel: _Panel) -> list[str]:
    box = panel.box
    out = []
    if box.ymin <= 0 <= box.ymax:
        (x1, y), (x2, _) = panel.xy((box.xmin, 0)), panel.xy((box.xmax, 0))
        out.append(f'<path class="axis" d="M {x1} {y} H {x2}"/>')
    if box.xmin <= 0 <= box.xmax:
        (x, y1), (_, y2) = panel.xy((0, box.ymin)), panel.xy((0, box.ymax))
        out.append(f'<path class="axis" d="M {x} {y1} V {y2}"/>')
    (x0, y0), (x1, y1) = panel.xy((box.xmin, box.ymin)), panel.xy((box.xmax, box.ymax))
    out.append(f'<rect class="frame" x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}"/>')
    return out


def _curve_lines(panel: _Panel, T: TropCurve, cls: str) -> list[str]:
    out = []
    for e in T.edges:
        clipped = clip_piece(e.piece, panel.box)
        if clipped:
            out.append(panel.line(*clipped, cls))
    return out


def _panel_body(scene: Scene, panel: _Panel) -> list[str]:
    out = [f'<g class="axes">{"".join(_axes(panel))}</g>']
    shading = []
    for region in scene.shaded:
        poly = _region_polygon(region, panel.box)
        if len(poly) >= 3:
            pts = " ".join(f"{x},{y}" for x, y in (panel.xy(p) for p in poly))
            shading.append(f'<polygon class="relevant" points="{pts}"/>')
    out.append(f'<g class="relevant-cells">{"".join(shading)}</g>')
    for T, cls in zip(scene.curves, ("curve1", "curve2")):
        out.append(f'<g class="{cls}">{"".join(_curve_lines(panel, T, cls))}</g>')
    if scene.discriminant is not None:
        S = scene.discriminant
        marks = []
        for piece in S.pieces():
            if piece.kind == "segment" and piece.hi == 0:
                if clip_piece(piece, panel.box):
                    x, y = panel.xy(piece.base)
                    marks.append(f'<circle class="discriminant" cx="{x}" cy="{y}" r="3"/>')
                continue
            clipped = clip_piece(piece, panel.box)
            if clipped:
                marks.append(panel.line(*clipped, "discriminant"))
        out.append(f'<g class="discriminant">{"".join(marks)}</g>')
    texts = []
    for p, text in scene.labels:
        x, y = panel.xy(p)
        texts.append(f'<text x="{x + 4}" y="{y - 4}">{escape(text)}</text>')
    if scene.title:
        texts.append(
            f'<text class="title" x="{panel.left + PANEL / 2}" y="{MARGIN / 2 + 4}">'
            f"{escape(scene.title)}</text>"
        )
    out.append(f'<g class="labels">{"".join(texts)}</g>')
    return out


STYLE = (
    ".axis{stroke:#bbb;stroke-width:0.5;fill:none}"
    ".frame{stroke:#888;fill:none;stroke-width:0.5}"
    ".relevant{fill:#9ecae1;fill-opacity:0.35;stroke:none}"
    ".curve1{stroke:#222;stroke-width:1.2}"
    ".curve2{stroke:#222;stroke-width:1.2;stroke-dasharray:5,3}"
    ".discriminant{stroke:#d62728;fill:#d62728;stroke-width:2.4}"
    "text{font-family:sans-serif;font-size:10px}"
    ".title{text-anchor:middle;font-size:12px}"
)


def emit_figure(panels) -> str:
    """Panels side by side; each entry is a (Scene, Viewport) pair."""
    panels = list(panels)
    width = PANEL * max(len(panels), 1)
    body = []
    for k, (scene, box) in enumerate(panels):
        body.extend(_panel_body(scene, _Panel(box, k * PANEL)))
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{PANEL}" viewBox="0 0 {width} {PANEL}">\n'
        f"<style>{STYLE}</style>\n" + "\n".join(body) + "\n</svg>\n"
    )


def emit_svg(scene: Scene, viewport: Viewport) -> str:
    return emit_figure([(scene, viewport)])
