"""Deterministic SVG pictures of profile curves in the (h1, h2)-plane.

Coordinates are written with two decimals, so identical inputs give
byte-identical documents.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

from .curve import ProfileCurve
from .errors import ParameterError

# bold solid first, then dashed and dotted strokes
DEFAULT_STYLES = (
    {"stroke": "#000000", "width": 2.5, "dash": None},
    {"stroke": "#000000", "width": 1.2, "dash": "6 4"},
    {"stroke": "#555555", "width": 1.0, "dash": "2 3"},
    {"stroke": "#1f4e9c", "width": 1.5, "dash": None},
    {"stroke": "#9c1f1f", "width": 1.5, "dash": "8 3 2 3"},
)
SAMPLES = 400


@dataclass(frozen=True)
class Marker:
    curve: int
    r: float
    label: str


@dataclass
class RenderSpec:
    width: int = 480
    height: int = 480
    viewport: tuple | None = None  # (xmin, xmax, ymin, ymax)
    styles: list = field(default_factory=list)
    markers: list = field(default_factory=list)
    title: str | None = None

    def validate(self, n_curves: int) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ParameterError("canvas size must be positive", width=self.width, height=self.height)
        if self.viewport is not None:
            x0, x1, y0, y1 = self.viewport
            if not (x1 > x0 and y1 > y0):
                raise ParameterError("viewport must be a nonempty box", viewport=list(self.viewport))
        for m in self.markers:
            if not 0 <= m.curve < n_curves:
                raise ParameterError("marker refers to a missing curve", curve=m.curve)


def _style(spec: RenderSpec, i: int) -> dict:
    base = dict(DEFAULT_STYLES[i % len(DEFAULT_STYLES)])
    if i < len(spec.styles) and spec.styles[i]:
        base.update(spec.styles[i])
    return base


def _viewport(pts: list, spec: RenderSpec):
    if spec.viewport is not None:
        x0, x1, y0, y1 = (float(v) for v in spec.viewport)
    elif pts:
        allp = np.concatenate(pts + [np.zeros((1, 2))])
        x0, y0 = allp.min(axis=0)
        x1, y1 = allp.max(axis=0)
        mx, my = 0.08 * max(x1 - x0, 1e-9), 0.08 * max(y1 - y0, 1e-9)
        x0, x1, y0, y1 = x0 - mx, x1 + mx, y0 - my, y1 + my
    else:
        x0, x1, y0, y1 = -1.0, 1.0, -1.0, 1.0
    # equal aspect: grow the short side
    aspect = spec.width / spec.height
    w, h = x1 - x0, y1 - y0
    if w / h < aspect:
        c, w = 0.5 * (x0 + x1), h * aspect
        x0, x1 = c - w / 2, c + w / 2
    else:
        c, h = 0.5 * (y0 + y1), w / aspect
        y0, y1 = c - h / 2, c + h / 2
    return x0, x1, y0, y1


def _num(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def render(curves, spec: RenderSpec | None = None) -> str:
    spec = spec or RenderSpec()
    curves = list(curves)
    spec.validate(len(curves))
    pts = []
    for c in curves:
        if not isinstance(c, ProfileCurve):
            raise ParameterError("render expects profile curves")
        a, b = c.interval
        pts.append(c._eval(np.linspace(a, b, SAMPLES), 0))
    x0, x1, y0, y1 = _viewport(pts, spec)
    W, H = spec.width, spec.height

    def px(p):
        return (p[..., 0] - x0) / (x1 - x0) * W, (y1 - p[..., 1]) / (y1 - y0) * H

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
    ]
    if spec.title:
        out.append(f"<title>{escape(spec.title)}</title>")
    out.append(f'<rect x="0" y="0" width="{W}" height="{H}" fill="#ffffff"/>')
    ox, oy = px(np.array([0.0, 0.0]))
    ox = min(max(float(ox), 0.0), W)
    oy = min(max(float(oy), 0.0), H)
    out.append('<g id="axes" stroke="#888888" stroke-width="0.8">')
    out.append(f'<line x1="0.00" y1="{_num(oy)}" x2="{_num(W)}" y2="{_num(oy)}"/>')
    out.append(f'<line x1="{_num(ox)}" y1="0.00" x2="{_num(ox)}" y2="{_num(H)}"/>')
    out.append("</g>")
    for i, p in enumerate(pts):
        st = _style(spec, i)
        X, Y = px(p)
        d = "M " + " L ".join(f"{_num(x)} {_num(y)}" for x, y in zip(X, Y))
        dash = f' stroke-dasharray="{st["dash"]}"' if st.get("dash") else ""
        out.append(
            f'<path id="curve{i}" d="{d}" fill="none" stroke="{st["stroke"]}" '
            f'stroke-width="{st["width"]}"{dash} stroke-linejoin="round"/>'
        )
    for m in spec.markers:
        p = curves[m.curve].eval(float(m.r), 0)
        X, Y = px(np.asarray(p))
        out.append(f'<circle cx="{_num(float(X))}" cy="{_num(float(Y))}" r="3" fill="#000000"/>')
        out.append(
            f'<text x="{_num(float(X) + 5)}" y="{_num(float(Y) - 5)}" font-family="serif" font-size="13">{escape(m.label)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


__all__ = ["RenderSpec", "Marker", "render", "DEFAULT_STYLES"]
