"""Deterministic SVG and PGM figures.

Coordinates are exact Fractions until the last moment and are printed with a
fixed number of decimals, so identical inputs give identical bytes.
"""
from __future__ import annotations

from bisect import bisect_right
from fractions import Fraction
from typing import Sequence

from .assembly import ParamFamily, slice_at
from .grid import CellSet, IntervalUnion
from .moran import RoundPattern, drawn_pattern, half_stage_cells, make_round_pattern
from .sticky import c0_stage, four_corner_cells

DEFAULT_CELL_CAP = 4096


class CellCapExceeded(ValueError):
    pass


def fmt(x, places: int = 3) -> str:
    """Round half away from zero to ``places`` decimals; no float detour."""
    x = Fraction(x)
    scale = 10**places
    q = abs(x) * scale
    n = int(q)
    if q - n >= Fraction(1, 2):
        n += 1
    if x < 0 and n:
        n = -n
    whole, frac = divmod(abs(n), scale)
    sign = "-" if n < 0 else ""
    if not places:
        return f"{sign}{whole}"
    digits = f"{frac:0{places}d}".rstrip("0")
    return f"{sign}{whole}.{digits}" if digits else f"{sign}{whole}"


class _Svg:
    def __init__(self, width: int, height: int, places: int):
        self.places = places
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        ]

    def f(self, x) -> str:
        return fmt(x, self.places)

    def rect(self, x, y, w, h, fill="none", stroke="none", width: str = "1"):
        self.parts.append(
            f'<rect x="{self.f(x)}" y="{self.f(y)}" width="{self.f(w)}" height="{self.f(h)}" '
            f'fill="{fill}" stroke="{stroke}" stroke-width="{width}"/>'
        )

    def line(self, x0, y0, x1, y1, stroke="black", width: str = "1"):
        self.parts.append(
            f'<line x1="{self.f(x0)}" y1="{self.f(y0)}" x2="{self.f(x1)}" y2="{self.f(y1)}" '
            f'stroke="{stroke}" stroke-width="{width}"/>'
        )

    def polyline(self, points, stroke="black", width: str = "1"):
        pts = " ".join(f"{self.f(x)},{self.f(y)}" for x, y in points)
        self.parts.append(f'<polyline points="{pts}" fill="none" stroke="{stroke}" stroke-width="{width}"/>')

    def text(self, x, y, body: str, size: int = 12):
        self.parts.append(f'<text x="{self.f(x)}" y="{self.f(y)}" font-family="monospace" font-size="{size}">{body}</text>')

    def group(self, label: str):
        self.parts.append(f'<g id="{label}">')

    def end_group(self):
        self.parts.append("</g>")

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


# -- stage panels -------------------------------------------------------------


def render_stages(
    pattern: RoundPattern | None = None,
    stages: int = 2,
    panel: int = 256,
    places: int = 3,
    cell_cap: int = DEFAULT_CELL_CAP,
) -> str:
    """One square panel per stage; chosen cells filled, previous stage outlined."""
    pattern = pattern or make_round_pattern(1)
    sets = half_stage_cells(pattern, stages)
    if any(len(c) > cell_cap for c in sets):
        raise CellCapExceeded(f"more than {cell_cap} cells in a panel")
    margin = 16
    svg = _Svg(stages * (panel + margin) + margin, panel + 2 * margin, places)
    previous: CellSet | None = None
    for k, cells in enumerate(sets):
        x0 = margin + k * (panel + margin)
        y0 = margin
        side = Fraction(panel, 4**cells.exponent)
        svg.group(f"stage-{k + 1}")
        if 4**cells.exponent <= 64:
            for i in range(1, 4**cells.exponent):
                svg.line(x0 + i * side, y0, x0 + i * side, y0 + panel, stroke="#dddddd", width="0.5")
                svg.line(x0, y0 + i * side, x0 + panel, y0 + i * side, stroke="#dddddd", width="0.5")
        for c, r in cells:
            # row 0 at the bottom
            svg.rect(x0 + c * side, y0 + panel - (r + 1) * side, side, side, fill="#555555")
        if previous is not None:
            pside = Fraction(panel, 4**previous.exponent)
            for c, r in previous:
                svg.rect(x0 + c * pside, y0 + panel - (r + 1) * pside, pside, pside, stroke="#c00000", width="1")
        svg.rect(x0, y0, panel, panel, stroke="black", width="1")
        svg.end_group()
        previous = cells
    return svg.render()


def render_stage_figure(source: str = "default", stages: int = 2, **kw) -> str:
    if source == "drawn":
        pattern = drawn_pattern()
    elif source == "default":
        pattern = make_round_pattern(1)
    else:
        raise ValueError(f"unknown source {source!r}")
    return render_stages(pattern, stages, **kw)


# -- line fans ------------------------------------------------------------------


def render_line_fan(
    family: ParamFamily,
    style: str = "nonsticky",
    size: int = 400,
    places: int = 3,
    cell_cap: int = 256,
    slice_t=None,
) -> str:
    """One line per parameter-cell corner, ``t`` from 0 to 1.

    The drawing window is ``x`` in ``[0, 2]``, ``t`` in ``[0, 1]`` with
    ``t = 0`` at the bottom.  ``slice_t`` overlays the slice at that height.
    """
    cells = family.base
    if len(cells) > cell_cap:
        raise CellCapExceeded(f"{len(cells)} cells exceed the cap of {cell_cap}")
    stroke = {"nonsticky": "#1f4e9a", "sticky": "#9a1f1f"}.get(style)
    if stroke is None:
        raise ValueError(f"unknown style {style!r}")
    margin = 16
    width, height = 2 * size + 2 * margin, size + 2 * margin
    svg = _Svg(width, height, places)

    def to_px(x, t):
        return margin + x * size, margin + (1 - t) * size

    svg.group(f"fan-{style}")
    seen = set()
    for i in range(len(cells)):
        for p in family.corner_params(i):
            key = (p.v, p.a)
            if key in seen:
                continue
            seen.add(key)
            (v,), (a,) = p.v, p.a
            svg.polyline([to_px(a, 0), to_px(a + v, 1)], stroke=stroke, width="0.6")
    svg.end_group()
    if slice_t is not None:
        t = Fraction(slice_t)
        svg.group("slice")
        svg.line(*to_px(0, t), *to_px(2, t), stroke="#999999", width="0.5")
        for lo, hi in slice_at(family, t):
            svg.line(*to_px(lo, t), *to_px(hi, t), stroke="black", width="3")
        svg.end_group()
    svg.rect(margin, margin, 2 * size, size, stroke="black")
    return svg.render()


def nonsticky_fan(source: str = "default", **kw) -> str:
    """Lines over the first-round composite (the planar non-sticky family)."""
    pattern = drawn_pattern() if source == "drawn" else make_round_pattern(1)
    return render_line_fan(ParamFamily(pattern.composite_cells()), "nonsticky", **kw)


def sticky_fan(k: int = 2, **kw) -> str:
    """Lines over the stage-``k`` four-corner set."""
    return render_line_fan(ParamFamily(four_corner_cells(k)), "sticky", **kw)


# -- plates ----------------------------------------------------------------------


def render_plates(k: int = 2, lam=Fraction(2, 3), size: int = 400, places: int = 3) -> str:
    """Planar cut of the plate family: plates, lines from one top corner, one slice."""
    from .sticky import sticky_slice

    lam = Fraction(lam)
    margin = 16
    svg = _Svg(size + 2 * margin, size + 2 * margin, places)
    top = c0_stage(k).intervals
    bottom = top.scaled(Fraction(1, 2))

    def to_px(x, h):
        return margin + x * size, margin + (1 - h) * size

    svg.group("plates")
    for lo, hi in top:
        svg.line(*to_px(lo, 1), *to_px(hi, 1), stroke="black", width="4")
    for lo, hi in bottom:
        svg.line(*to_px(lo, 0), *to_px(hi, 0), stroke="black", width="4")
    svg.end_group()
    corner = top.intervals[0][0]
    svg.group("lines")
    for lo, hi in bottom:
        for a in (lo, hi):
            svg.line(*to_px(a, 0), *to_px(corner, 1), stroke="#1f4e9a", width="0.6")
    svg.end_group()
    svg.group("slice")
    svg.line(*to_px(0, lam), *to_px(1, lam), stroke="#999999", width="0.5")
    for lo, hi in sticky_slice(lam, k).factor:
        svg.line(*to_px(lo, lam), *to_px(hi, lam), stroke="#9a1f1f", width="3")
    svg.end_group()
    return svg.render()


# -- rasters ------------------------------------------------------------------------


def _inside(union: IntervalUnion, starts: Sequence[Fraction], x: Fraction) -> bool:
    i = bisect_right(starts, x) - 1
    return i >= 0 and x <= union.intervals[i][1]


def slice_raster(family: ParamFamily, width: int = 256, height: int = 128, x_max=2) -> bytes:
    """PGM (P5, maxval 255): row ``i`` is the slice at the ``i``-th midpoint height.

    Black pixels have their centre inside the slice; the top row is ``t`` near 1.
    """
    if width < 1 or height < 1:
        raise ValueError("raster size must be positive")
    x_max = Fraction(x_max)
    xs = [x_max * Fraction(2 * j + 1, 2 * width) for j in range(width)]
    rows = []
    for i in range(height):
        t = Fraction(2 * (height - 1 - i) + 1, 2 * height)
        union = slice_at(family, t)
        starts = [a for a, _ in union]
        rows.append(bytes(0 if _inside(union, starts, x) else 255 for x in xs))
    return f"P5\n{width} {height}\n255\n".encode("ascii") + b"".join(rows)


FIGURES = ("stages", "fan-nonsticky", "fan-sticky", "plates", "slices")
