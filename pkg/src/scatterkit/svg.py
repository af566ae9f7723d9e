"""Deterministic SVG rendering of rank-2 scattering diagrams.

Display only: rays and lines drawn to a fixed viewport, each labeled with its
wall function truncated to three terms.  All coordinates are computed in
exact rationals and emitted as integers, so output is byte-stable.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import UnsupportedRank
from .lattice import vneg

VIEW = 240  # half-width of the viewBox
RAY_LEN = Fraction(200)
LABEL_AT = Fraction(150)


def _isqrt_ceil(n):
    r = int(n**0.5)
    while r * r < n:
        r += 1
    return r


def _scaled(v, length):
    # v integer direction; returns integer endpoint at ~|length| from the origin
    norm = _isqrt_ceil(v[0] * v[0] + v[1] * v[1])
    return (round(length * v[0] / norm), round(-length * v[1] / norm))


def _function_label(wall):
    bits = ["1"]
    for j, c in enumerate(wall.function.coeffs, start=1):
        if c == 0:
            continue
        exp = tuple(j * x for x in wall.direction)
        coeff = "" if c == 1 else f"{c}"
        bits.append(f"{coeff}z^{exp}")
        if len(bits) == 3:
            if any(wall.function.coeffs[j:]):
                bits.append("…")
            break
    return "+".join(bits)


def render_diagram(diagram) -> str:
    if diagram.seed.rank != 2:
        raise UnsupportedRank("SVG rendering is rank-2 only")
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{-VIEW} {-VIEW} {2*VIEW} {2*VIEW}">',
        f'<rect x="{-VIEW}" y="{-VIEW}" width="{2*VIEW}" height="{2*VIEW}" fill="white"/>',
        '<circle cx="0" cy="0" r="3" fill="black"/>',
    ]
    walls = sorted(diagram.walls, key=lambda w: (not w.initial, w.direction))
    for w in walls:
        color = "#1f6fb2" if w.initial else "#b23a1f"
        if w.support.kind == "hyperplane":
            a = _scaled(w.direction, RAY_LEN)
            b = _scaled(vneg(w.direction), RAY_LEN)
            out.append(
                f'<line x1="{a[0]}" y1="{a[1]}" x2="{b[0]}" y2="{b[1]}" '
                f'stroke="{color}" stroke-width="2"/>'
            )
            lx, ly = _scaled(w.direction, LABEL_AT)
        else:
            g = w.support.generators[0]
            a = _scaled(g, RAY_LEN)
            out.append(
                f'<line x1="0" y1="0" x2="{a[0]}" y2="{a[1]}" '
                f'stroke="{color}" stroke-width="2"/>'
            )
            lx, ly = _scaled(g, LABEL_AT)
        out.append(
            f'<text x="{lx}" y="{ly}" font-size="11" font-family="monospace" '
            f'fill="{color}">{_function_label(w)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
