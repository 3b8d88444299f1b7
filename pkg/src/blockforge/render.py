"""SVG drawings of geometric complexes.

Atoms are filled circles coloured by detuning, blockade edges are lines,
the blockade disk (radius/2 around each atom, so that touching disks mean a
blockade) is dashed, and ports carry their labels.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .core import Complex
from .errors import ValidationError

PALETTE = ["#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860", "#da8bc3", "#8c8c8c"]


def _colour(detunings) -> dict:
    levels = sorted(set(detunings))
    return {d: PALETTE[k % len(PALETTE)] for k, d in enumerate(levels)}


def complex_to_svg(cplx: Complex, *, scale: float = 80.0, margin: float = 1.0, disks: bool = True,
                   legend: bool = True) -> str:
    if cplx.positions is None:
        raise ValidationError("only complexes with positions can be drawn")
    xy = np.asarray(cplx.positions, dtype=float)
    r = cplx.blockade_radius
    lo = xy.min(axis=0) - margin * r
    hi = xy.max(axis=0) + margin * r
    width, height = (hi - lo) * scale
    extra = 24 * len(set(cplx.detunings)) + 10 if legend else 0

    def px(p):
        # flip y so that the picture is upright
        return (p[0] - lo[0]) * scale, (hi[1] - p[1]) * scale

    colour = _colour(cplx.detunings)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1f}" height="{height + extra:.1f}" '
        f'viewBox="0 0 {width:.1f} {height + extra:.1f}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    if disks:
        for p in xy:
            x, y = px(p)
            out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r * scale / 2:.2f}" fill="none" '
                       'stroke="#999" stroke-dasharray="4 3" stroke-width="1"/>')
    for i, j in cplx.graph.sorted_edges():
        (x1, y1), (x2, y2) = px(xy[i]), px(xy[j])
        out.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" stroke="#333" stroke-width="2"/>')
    ports = {p.index: p.label for p in cplx.ports}
    for k, p in enumerate(xy):
        x, y = px(p)
        ring = ' stroke="black" stroke-width="3"' if k in ports else ""
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{0.12 * scale:.2f}" '
                   f'fill="{colour[cplx.detunings[k]]}"{ring}><title>atom {k}, detuning '
                   f'{cplx.detunings[k]}</title></circle>')
        if k in ports:
            out.append(f'<text x="{x + 0.15 * scale:.2f}" y="{y - 0.15 * scale:.2f}" font-family="sans-serif" '
                       f'font-size="{0.22 * scale:.1f}">{escape(ports[k])}</text>')
    if legend:
        for n, (d, c) in enumerate(sorted(colour.items())):
            y = height + 18 + 24 * n
            out.append(f'<circle cx="14" cy="{y - 5:.1f}" r="8" fill="{c}"/>')
            out.append(f'<text x="28" y="{y:.1f}" font-family="sans-serif" font-size="14">detuning {d}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, cplx: Complex, **kwargs) -> None:
    with open(path, "w") as fh:
        fh.write(complex_to_svg(cplx, **kwargs))
