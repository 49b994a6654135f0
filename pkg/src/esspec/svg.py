"""Hand-emitted SVG 1.1 scatter/polyline plot of a spectrum curve.

No plotting dependency: axes, two branch polylines, flag markers and
exceptional points are written as primitive markup with fixed float
formatting, so output is byte-deterministic for fixed inputs.
"""

from __future__ import annotations

import io

from .schur import ExceptionalSet
from .spectrum import SpectrumCurve, Window

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#7f7f7f")

WIDTH = 800.0
HEIGHT = 600.0
MARGIN = 40.0


def _mapper(window: Window):
    sx = (WIDTH - 2 * MARGIN) / (window.re_max - window.re_min)
    sy = (HEIGHT - 2 * MARGIN) / (window.im_max - window.im_min)

    def to_px(lam: complex) -> tuple[float, float]:
        px = MARGIN + (lam.real - window.re_min) * sx
        py = HEIGHT - MARGIN - (lam.imag - window.im_min) * sy
        return px, py

    return to_px


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def render_curve_svg(curve: SpectrumCurve, exc: ExceptionalSet | None = None,
                     window: Window | None = None,
                     header_comment: str | None = None) -> str:
    window = window or curve.window
    if window is None:
        raise ValueError("an explicit window is required to render SVG")
    to_px = _mapper(window)
    out = io.StringIO()
    out.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    out.write(f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
              f'width="{WIDTH:.0f}" height="{HEIGHT:.0f}" '
              f'viewBox="0 0 {WIDTH:.0f} {HEIGHT:.0f}">\n')
    if header_comment:
        out.write(f"<!-- {header_comment} -->\n")
    out.write(f'<rect x="0" y="0" width="{WIDTH:.0f}" height="{HEIGHT:.0f}" '
              'fill="white"/>\n')

    # Axes through the origin when visible, frame otherwise.
    if window.re_min <= 0.0 <= window.re_max:
        x0, _ = to_px(0j)
        out.write(f'<line x1="{_fmt(x0)}" y1="{_fmt(MARGIN)}" x2="{_fmt(x0)}" '
                  f'y2="{_fmt(HEIGHT - MARGIN)}" stroke="{PALETTE[5]}" '
                  'stroke-width="1"/>\n')
    if window.im_min <= 0.0 <= window.im_max:
        _, y0 = to_px(0j)
        out.write(f'<line x1="{_fmt(MARGIN)}" y1="{_fmt(y0)}" '
                  f'x2="{_fmt(WIDTH - MARGIN)}" y2="{_fmt(y0)}" '
                  f'stroke="{PALETTE[5]}" stroke-width="1"/>\n')
    out.write(f'<rect x="{_fmt(MARGIN)}" y="{_fmt(MARGIN)}" '
              f'width="{_fmt(WIDTH - 2 * MARGIN)}" '
              f'height="{_fmt(HEIGHT - 2 * MARGIN)}" fill="none" '
              f'stroke="{PALETTE[5]}" stroke-width="1"/>\n')
    out.write(f'<text x="{_fmt(MARGIN)}" y="{_fmt(HEIGHT - 12.0)}" '
              f'font-size="12" fill="{PALETTE[5]}">'
              f'Re in [{window.re_min:g}, {window.re_max:g}], '
              f'Im in [{window.im_min:g}, {window.im_max:g}]</text>\n')

    for branch in (0, 1):
        color = PALETTE[branch]
        run: list[str] = []
        for s in curve.samples:
            lam = s.roots[branch]
            if window.contains(lam):
                px, py = to_px(lam)
                run.append(f"{_fmt(px)},{_fmt(py)}")
            else:
                _flush_polyline(out, run, color)
                run = []
        _flush_polyline(out, run, color)

    for s in curve.samples:
        for branch in (0, 1):
            f = s.flags[branch]
            lam = s.roots[branch]
            if not window.contains(lam):
                continue
            color = None
            if f.in_lambda_set:
                color = PALETTE[4]
            elif f.near_sigma_d:
                color = PALETTE[2]
            elif f.near_sigma_a:
                color = PALETTE[3]
            if color is not None:
                px, py = to_px(lam)
                out.write(f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="2.5" '
                          f'fill="{color}"/>\n')

    if exc is not None:
        for pt in exc.lambda_set:
            if window.contains(pt.lam):
                px, py = to_px(pt.lam)
                out.write(f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="5" '
                          f'fill="none" stroke="{PALETTE[4]}" '
                          'stroke-width="2"/>\n')
    out.write("</svg>\n")
    return out.getvalue()


def _flush_polyline(out: io.StringIO, run: list[str], color: str) -> None:
    if len(run) >= 2:
        out.write(f'<polyline points="{" ".join(run)}" fill="none" '
                  f'stroke="{color}" stroke-width="1.5"/>\n')
    elif len(run) == 1:
        x, y = run[0].split(",")
        out.write(f'<circle cx="{x}" cy="{y}" r="1.5" fill="{color}"/>\n')
