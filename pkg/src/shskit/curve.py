"""Planar profile curves h: [a, b] -> R^2 and their differential geometry.

A curve encodes the invariant 1-form h1(r) dtheta + h2(r) dphi on I x T^2.
Rotation convention: i(x, y) = (-y, x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import numerics as nx
from .errors import DomainError, ImmersionError, MalformedInputError, NumericalError, ParameterError

DEFAULT_ETA = 1e-8
MAX_LIFT_SAMPLES = 2**20
_FD_STEP = 1e-5


def rot(v: np.ndarray) -> np.ndarray:
    """Multiplication by i on arrays of shape (..., 2)."""
    v = np.asarray(v, dtype=float)
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def pairing(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """<u, i v> = u2 v1 - u1 v2 along the last axis."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 1] * v[..., 0] - u[..., 0] * v[..., 1]


def dot(u, v) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1]


# --------------------------------------------------------------------------
# scalar helpers


def hermite_eval(x: np.ndarray, y: np.ndarray, dy: np.ndarray, r: np.ndarray, order: int):
    """Piecewise cubic Hermite interpolation, values of shape (n, k)."""
    idx = np.clip(np.searchsorted(x, r, side="right") - 1, 0, len(x) - 2)
    x0 = x[idx]
    h = x[idx + 1] - x0
    u = ((r - x0) / h)[:, None]
    hh = h[:, None]
    y0, y1, m0, m1 = y[idx], y[idx + 1], dy[idx], dy[idx + 1]
    if order == 0:
        h00 = (1 + 2 * u) * (1 - u) ** 2
        h10 = u * (1 - u) ** 2
        h01 = u * u * (3 - 2 * u)
        h11 = u * u * (u - 1)
        return h00 * y0 + h10 * hh * m0 + h01 * y1 + h11 * hh * m1
    if order == 1:
        d00 = 6 * u * (u - 1) / hh
        d10 = (3 * u - 1) * (u - 1)
        d11 = u * (3 * u - 2)
        return d00 * (y0 - y1) + d10 * m0 + d11 * m1
    if order == 2:
        e00 = (12 * u - 6) / hh**2
        e10 = (6 * u - 4) / hh
        e11 = (6 * u - 2) / hh
        return e00 * (y0 - y1) + e10 * m0 + e11 * m1
    if order == 3:
        return 12 * (y0 - y1) / hh**3 + 6 * (m0 + m1) / hh**2
    raise ParameterError("order must be 0, 1, 2 or 3")


@dataclass(frozen=True)
class ScalarSpline:
    """Scalar cubic Hermite spline plus C^2 polynomial bumps (1-u^2)^3."""

    x: tuple
    y: tuple
    dy: tuple
    bumps: tuple = ()  # (center, half_width, coefficient)

    def __call__(self, r, order: int = 0) -> np.ndarray:
        r = np.atleast_1d(np.asarray(r, dtype=float))
        xs = np.asarray(self.x, dtype=float)
        out = hermite_eval(xs, np.asarray(self.y, float)[:, None], np.asarray(self.dy, float)[:, None], r, order)[:, 0]
        for c, w, k in self.bumps:
            out = out + k * bump(r, c, w, order)
        return out

    def breaks(self) -> list:
        pts = list(self.x)
        for c, w, _ in self.bumps:
            pts.extend([c - w, c, c + w])
        return pts

    def with_bumps(self, bumps) -> "ScalarSpline":
        return ScalarSpline(self.x, self.y, self.dy, tuple(tuple(map(float, b)) for b in bumps))

    def to_json(self) -> dict:
        return {"x": list(self.x), "y": list(self.y), "dy": list(self.dy), "bumps": [list(b) for b in self.bumps]}

    @classmethod
    def from_json(cls, d: dict) -> "ScalarSpline":
        return cls(
            tuple(map(float, d["x"])),
            tuple(map(float, d["y"])),
            tuple(map(float, d["dy"])),
            tuple(tuple(map(float, b)) for b in d.get("bumps", [])),
        )


def bump(r, c: float, w: float, order: int = 0) -> np.ndarray:
    u = (np.asarray(r, dtype=float) - c) / w
    inside = np.abs(u) < 1
    s = np.where(inside, 1 - u * u, 0.0)
    if order == 0:
        return s**3
    if order == 1:
        return np.where(inside, -6 * u * s**2 / w, 0.0)
    if order == 2:
        return np.where(inside, (-6 * s**2 + 24 * u * u * s) / w**2, 0.0)
    raise ParameterError("bump order must be 0, 1 or 2")


# --------------------------------------------------------------------------
# curves


class ProfileCurve:
    """Base class. Subclasses implement ``_eval(r, order)`` on arrays."""

    kind = "named"
    name = ""

    def __init__(self, interval: Sequence[float], eta: float = DEFAULT_ETA):
        a, b = float(interval[0]), float(interval[1])
        if not b > a:
            raise DomainError("interval must satisfy a < b", interval=[a, b])
        self.interval = (a, b)
        self.eta = float(eta)

    # -- evaluation -------------------------------------------------------
    def _eval(self, r: np.ndarray, order: int) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    def _fd2(self, r: np.ndarray) -> np.ndarray:
        """Second derivative by central differences of the first (clamped at ends)."""
        a, b = self.interval
        h = _FD_STEP * (b - a)
        lo = np.clip(r - h, a, b)
        hi = np.clip(r + h, a, b)
        return (self._eval(hi, 1) - self._eval(lo, 1)) / (hi - lo)[:, None]

    def eval(self, r, order: int = 0) -> np.ndarray:
        """h(r), h'(r) or h''(r). Scalar r gives shape (2,), arrays (n, 2)."""
        if order not in (0, 1, 2):
            raise ParameterError("order must be 0, 1 or 2")
        scalar = np.ndim(r) == 0
        rr = np.atleast_1d(np.asarray(r, dtype=float))
        a, b = self.interval
        slack = 1e-12 * max(1.0, abs(a), abs(b))
        if np.any(rr < a - slack) or np.any(rr > b + slack) or np.any(~np.isfinite(rr)):
            raise DomainError("r outside the curve interval", interval=[a, b])
        rr = np.clip(rr, a, b)
        out = self._eval(rr, order)
        return out[0] if scalar else out

    __call__ = eval

    def breaks(self) -> np.ndarray:
        """Points where derivatives may jump (Hermite nodes, glue points)."""
        return np.asarray(self.interval, dtype=float)

    def grid(self, n: int = 513) -> np.ndarray:
        """Evaluation grid: uniform points plus breakpoints and their midpoints."""
        a, b = self.interval
        br = np.unique(self.breaks())
        br = br[(br >= a) & (br <= b)]
        mids = 0.5 * (br[:-1] + br[1:]) if len(br) > 1 else np.array([])
        return np.unique(np.concatenate([np.linspace(a, b, n), br, mids]))

    def interior_grid(self, n: int = 513, margin: float = 0.0) -> np.ndarray:
        g = self.grid(n)
        a, b = self.interval
        return g[(g > a + margin) & (g < b - margin)]

    # -- serialization ----------------------------------------------------
    def params(self) -> dict:  # pragma: no cover
        raise NotImplementedError

    def to_json(self) -> dict:
        return {
            "interval": [self.interval[0], self.interval[1]],
            "kind": "named",
            "name": self.name,
            "params": self.params(),
            "eta": self.eta,
        }

    def with_eta(self, eta: float) -> "ProfileCurve":
        return curve_from_json({**self.to_json(), "eta": eta})

    def __repr__(self) -> str:
        return f"{type(self).__name__}(interval={self.interval})"


class HermiteCurve(ProfileCurve):
    kind = "hermite"
    name = "hermite"

    def __init__(self, r, h, dh, eta: float = DEFAULT_ETA, check: bool = True):
        r = np.asarray(r, dtype=float)
        h = np.asarray(h, dtype=float).reshape(-1, 2)
        dh = np.asarray(dh, dtype=float).reshape(-1, 2)
        if len(r) < 2 or len(r) != len(h) or len(r) != len(dh):
            raise MalformedInputError("hermite curve needs >= 2 nodes with matching h and dh")
        if np.any(np.diff(r) <= 0):
            raise DomainError("node grid must be strictly increasing")
        if not (np.all(np.isfinite(h)) and np.all(np.isfinite(dh))):
            raise MalformedInputError("non-finite node data")
        super().__init__((r[0], r[-1]), eta)
        self.r, self.h, self.dh = r, h, dh
        if check and self.eta > 0:
            self.check_floor()

    def check_floor(self) -> None:
        mids = 0.5 * (self.r[:-1] + self.r[1:])
        pts = np.concatenate([self.r[1:-1], mids])
        speed = np.hypot(*self._eval(pts, 1).T)
        bad = np.nonzero(speed < self.eta)[0]
        if bad.size:
            raise ImmersionError("immersion floor violated", r=float(pts[bad[0]]), eta=self.eta)

    def _eval(self, r, order):
        return hermite_eval(self.r, self.h, self.dh, r, order)

    def breaks(self):
        return self.r

    def to_json(self) -> dict:
        nodes = [
            {"r": float(x), "h": [float(p[0]), float(p[1])], "dh": [float(q[0]), float(q[1])]}
            for x, p, q in zip(self.r, self.h, self.dh)
        ]
        return {"interval": [float(self.r[0]), float(self.r[-1])], "kind": "hermite", "nodes": nodes, "eta": self.eta}


class PolyCurve(ProfileCurve):
    """Polynomial curve; coefficients in ascending powers of r."""

    name = "poly"

    def __init__(self, interval, coeffs, eta: float = DEFAULT_ETA):
        super().__init__(interval, eta)
        cx, cy = coeffs
        self.coeffs = (tuple(map(float, cx)), tuple(map(float, cy)))
        self._p = [np.polynomial.Polynomial(c) for c in self.coeffs]

    def _eval(self, r, order):
        return np.stack([p.deriv(order)(r) if order else p(r) for p in self._p], axis=1)

    def params(self):
        return {"coeffs": [list(self.coeffs[0]), list(self.coeffs[1])]}


class StandardCurve(PolyCurve):
    """s * (r^2, 1 - r^2)."""

    name = "standard"

    def __init__(self, interval=(0.0, 1.0), scale: float = 1.0, eta: float = DEFAULT_ETA):
        self.scale = float(scale)
        s = self.scale
        super().__init__(interval, ([0.0, 0.0, s], [s, 0.0, -s]), eta)

    def params(self):
        return {"scale": self.scale}


class CircleCurve(ProfileCurve):
    """center + radius * (cos(2 pi turns r + phase), sin(2 pi turns r + phase))."""

    name = "circle"

    def __init__(self, interval=(0.0, 1.0), radius=1.0, turns=1.0, phase=0.0, center=(0.0, 0.0), eta=DEFAULT_ETA):
        super().__init__(interval, eta)
        self.radius, self.turns, self.phase = float(radius), float(turns), float(phase)
        self.center = (float(center[0]), float(center[1]))

    def _eval(self, r, order):
        w = 2 * math.pi * self.turns
        ang = w * r + self.phase
        c, s = np.cos(ang), np.sin(ang)
        R = self.radius
        if order == 0:
            return np.stack([self.center[0] + R * c, self.center[1] + R * s], axis=1)
        if order == 1:
            return np.stack([-R * w * s, R * w * c], axis=1)
        return np.stack([-R * w * w * c, -R * w * w * s], axis=1)

    def params(self):
        return {"radius": self.radius, "turns": self.turns, "phase": self.phase, "center": list(self.center)}


class AffineCurve(ProfileCurve):
    """r -> base(scale * r + shift) with scale > 0, on the preimage interval."""

    name = "affine"

    def __init__(self, base: ProfileCurve, scale: float, shift: float, eta: float | None = None):
        if not scale > 0:
            raise ParameterError("affine reparametrization must be increasing")
        a, b = base.interval
        super().__init__(((a - shift) / scale, (b - shift) / scale), base.eta if eta is None else eta)
        self.base, self.scale, self.shift = base, float(scale), float(shift)

    def _eval(self, r, order):
        x = np.clip(self.scale * r + self.shift, *self.base.interval)
        return self.base._eval(x, order) * self.scale**order

    def breaks(self):
        return (np.asarray(self.base.breaks()) - self.shift) / self.scale

    def params(self):
        return {"base": self.base.to_json(), "scale": self.scale, "shift": self.shift}


class CombinationCurve(ProfileCurve):
    name = "combination"

    def __init__(self, terms: Sequence[tuple[float, ProfileCurve]], eta: float = 0.0):
        terms = [(float(c), k) for c, k in terms]
        if not terms:
            raise ParameterError("empty combination")
        _check_same_interval([k for _, k in terms])
        super().__init__(terms[0][1].interval, eta)
        self.terms = terms

    def _eval(self, r, order):
        out = np.zeros((len(r), 2))
        for c, k in self.terms:
            if c != 0.0:
                out += c * k._eval(r, order)
        return out

    def breaks(self):
        return np.unique(np.concatenate([np.asarray(k.breaks()) for _, k in self.terms]))

    def params(self):
        return {"terms": [[c, k.to_json()] for c, k in self.terms]}


class GluedCurve(ProfileCurve):
    """Piecewise curve: consecutive pieces (interval, curve) covering [a, b]."""

    name = "glued"

    def __init__(self, pieces: Sequence[tuple[Sequence[float], ProfileCurve]], eta: float = 0.0):
        pieces = [((float(iv[0]), float(iv[1])), k) for iv, k in pieces]
        for (iv, k), (iv2, _) in zip(pieces[:-1], pieces[1:]):
            if abs(iv[1] - iv2[0]) > 1e-14:
                raise DomainError("glued pieces must be contiguous")
        for iv, k in pieces:
            if iv[0] < k.interval[0] - 1e-12 or iv[1] > k.interval[1] + 1e-12:
                raise DomainError("piece curve does not cover its interval")
        super().__init__((pieces[0][0][0], pieces[-1][0][1]), eta)
        self.pieces = pieces
        self._cuts = np.array([iv[1] for iv, _ in pieces[:-1]])

    def _eval(self, r, order):
        which = np.searchsorted(self._cuts, r, side="right")
        out = np.empty((len(r), 2))
        for j, (iv, k) in enumerate(self.pieces):
            m = which == j
            if np.any(m):
                out[m] = k._eval(np.clip(r[m], *k.interval), order)
        return out

    def breaks(self):
        pts = [np.asarray([iv[0], iv[1]]) for iv, _ in self.pieces]
        for iv, k in self.pieces:
            br = np.asarray(k.breaks())
            pts.append(br[(br > iv[0]) & (br < iv[1])])
        return np.unique(np.concatenate(pts))

    def params(self):
        return {"pieces": [{"interval": list(iv), "curve": k.to_json()} for iv, k in self.pieces]}


def unit_tangent(c: ProfileCurve, r: np.ndarray, with_derivative: bool = False):
    """k = h'/|h'| on arrays; at exact zeros of h' the direction of h'' is used
    (the one-sided limit), and k' is set to 0 there."""
    d1 = c._eval(r, 1)
    speed = np.hypot(d1[:, 0], d1[:, 1])
    scale = max(float(np.max(speed)) if speed.size else 0.0, 1e-300)
    degenerate = speed <= 1e-14 * scale
    k = np.empty_like(d1)
    good = ~degenerate
    k[good] = d1[good] / speed[good, None]
    if np.any(degenerate):
        d2 = c._eval(r[degenerate], 2)
        n2 = np.hypot(d2[:, 0], d2[:, 1])
        if np.any(n2 == 0):
            raise ImmersionError("h' and h'' vanish simultaneously", r=float(r[degenerate][n2 == 0][0]))
        k[degenerate] = d2 / n2[:, None]
    if not with_derivative:
        return k, speed
    d2 = c._eval(r, 2)
    kp = np.zeros_like(d1)
    proj = d2 - dot(d2, k)[:, None] * k
    kp[good] = proj[good] / speed[good, None]
    return k, speed, kp


class SpecialStabilizer(ProfileCurve):
    """g = c * i * h'/|h'|; g' = c * i * k' is exact, g'' uses central differences."""

    name = "special"

    def __init__(self, base: ProfileCurve, c: float = 1.0, eta: float = 0.0):
        super().__init__(base.interval, eta)
        self.base, self.c = base, float(c)

    def _eval(self, r, order):
        if order == 0:
            k, _ = unit_tangent(self.base, r)
            return self.c * rot(k)
        if order == 1:
            _, _, kp = unit_tangent(self.base, r, with_derivative=True)
            return self.c * rot(kp)
        return self._fd2(r)

    def breaks(self):
        return self.base.breaks()

    def params(self):
        return {"base": self.base.to_json(), "c": self.c}


class PrimitiveCurve(ProfileCurve):
    """g(r) = g0 + int_{r0}^{r} rho(s) h'(s) ds, so g' = rho h' exactly."""

    name = "primitive"

    def __init__(self, base: ProfileCurve, rho: ScalarSpline, r0: float, g0, interval=None, eta: float = 0.0):
        super().__init__(base.interval if interval is None else interval, eta)
        self.base, self.rho, self.r0 = base, rho, float(r0)
        self.g0 = np.asarray(g0, dtype=float).reshape(2)
        a, b = self.interval
        br = [x for x in list(base.breaks()) + rho.breaks() if a < x < b]
        self._cum = nx.CumulativeIntegral(
            lambda s: self.rho(s)[:, None] * self.base._eval(s, 1), a, b, self.r0, breaks=br
        )

    def _eval(self, r, order):
        if order == 0:
            return self.g0[None, :] + self._cum(r)
        if order == 1:
            return self.rho(r)[:, None] * self.base._eval(r, 1)
        return self.rho(r, 1)[:, None] * self.base._eval(r, 1) + self.rho(r)[:, None] * self.base._eval(r, 2)

    def breaks(self):
        a, b = self.interval
        pts = [x for x in list(self.base.breaks()) + self.rho.breaks() if a <= x <= b]
        return np.unique(np.asarray(pts + [a, b]))

    def params(self):
        return {
            "base": self.base.to_json(),
            "rho": self.rho.to_json(),
            "r0": self.r0,
            "g0": [float(self.g0[0]), float(self.g0[1])],
            "interval": list(self.interval),
        }


class FrameCurve(ProfileCurve):
    """g = x k + y i k in the moving frame of h, with y' = -theta' x, so that
    g' = (x' - y theta') k is parallel to h'. theta' is the angular speed of k."""

    name = "frame"

    def __init__(self, base: ProfileCurve, x: ScalarSpline, r0: float, y0: float, interval=None, eta: float = 0.0):
        super().__init__(base.interval if interval is None else interval, eta)
        self.base, self.x, self.r0, self.y0 = base, x, float(r0), float(y0)
        a, b = self.interval
        br = [v for v in list(base.breaks()) + x.breaks() if a < v < b]
        self._cum = nx.CumulativeIntegral(lambda s: (self._theta_d(s) * self.x(s))[:, None], a, b, self.r0, breaks=br)

    def _theta_d(self, r):
        k, speed, kp = unit_tangent(self.base, r, with_derivative=True)
        return dot(kp, rot(k))

    def y(self, r):
        return self.y0 - self._cum(r)[:, 0]

    def _eval(self, r, order):
        k, speed, kp = unit_tangent(self.base, r, with_derivative=True)
        y = self.y(r)
        if order == 0:
            return self.x(r)[:, None] * k + y[:, None] * rot(k)
        if order == 1:
            th = dot(kp, rot(k))
            return (self.x(r, 1) - y * th)[:, None] * k
        return self._fd2(r)

    def breaks(self):
        a, b = self.interval
        pts = [v for v in list(self.base.breaks()) + self.x.breaks() if a <= v <= b]
        return np.unique(np.asarray(pts + [a, b]))

    def params(self):
        return {"base": self.base.to_json(), "x": self.x.to_json(), "r0": self.r0, "y0": self.y0, "interval": list(self.interval)}


class BlendCurve(ProfileCurve):
    """(1 - w) left + w mid on the left ramp [l0, l1], mid on [l1, r1] and
    (1 - w) right + w mid on the right ramp [r1, r0]; w is a C^2 step."""

    name = "blend"

    def __init__(self, left: ProfileCurve, mid: ProfileCurve, right: ProfileCurve, ramps, eta: float = 0.0):
        super().__init__(mid.interval, eta)
        l0, l1, r1, r0 = (float(x) for x in ramps)
        if not (self.interval[0] <= l0 < l1 <= r1 < r0 <= self.interval[1]):
            raise DomainError("blend ramps must be ordered inside the interval", ramps=[l0, l1, r1, r0])
        self.left, self.mid, self.right = left, mid, right
        self.ramps = (l0, l1, r1, r0)

    def _weight(self, r, order):
        l0, l1, r1, r0 = self.ramps
        ul = (r - l0) / (l1 - l0)
        ur = (r0 - r) / (r0 - r1)
        if order == 0:
            return np.where(r <= l1, nx.smoothstep(ul), np.where(r >= r1, nx.smoothstep(ur), 1.0))
        return np.where(
            r <= l1, nx.smoothstep_d(ul) / (l1 - l0), np.where(r >= r1, -nx.smoothstep_d(ur) / (r0 - r1), 0.0)
        )

    def _side(self, r, order):
        out = np.empty((len(r), 2))
        m = r < 0.5 * (self.ramps[1] + self.ramps[2])
        for mask, k in ((m, self.left), (~m, self.right)):
            if np.any(mask):
                out[mask] = k._eval(np.clip(r[mask], *k.interval), order)
        return out

    def _eval(self, r, order):
        if order == 2:
            return self._fd2(r)
        w = self._weight(r, 0)[:, None]
        side, mid = self._side(r, 0), self.mid._eval(r, 0)
        if order == 0:
            return (1 - w) * side + w * mid
        dw = self._weight(r, 1)[:, None]
        return (1 - w) * self._side(r, 1) + w * self.mid._eval(r, 1) + dw * (mid - side)

    def breaks(self):
        pts = [np.asarray(self.ramps), np.asarray(self.mid.breaks())]
        for k, lo, hi in ((self.left, self.interval[0], self.ramps[1]), (self.right, self.ramps[2], self.interval[1])):
            br = np.asarray(k.breaks())
            pts.append(br[(br > lo) & (br < hi)])
        return np.unique(np.concatenate(pts))

    def params(self):
        return {
            "left": self.left.to_json(),
            "mid": self.mid.to_json(),
            "right": self.right.to_json(),
            "ramps": list(self.ramps),
        }


_NAMED = {}


def _register():
    _NAMED.update(
        {
            "poly": lambda iv, p, eta: PolyCurve(iv, p["coeffs"], eta),
            "standard": lambda iv, p, eta: StandardCurve(iv, p.get("scale", 1.0), eta),
            "circle": lambda iv, p, eta: CircleCurve(
                iv, p.get("radius", 1.0), p.get("turns", 1.0), p.get("phase", 0.0), p.get("center", (0.0, 0.0)), eta
            ),
            "affine": lambda iv, p, eta: AffineCurve(curve_from_json(p["base"]), p["scale"], p["shift"], eta),
            "combination": lambda iv, p, eta: CombinationCurve([(c, curve_from_json(k)) for c, k in p["terms"]], eta),
            "glued": lambda iv, p, eta: GluedCurve(
                [(q["interval"], curve_from_json(q["curve"])) for q in p["pieces"]], eta
            ),
            "special": lambda iv, p, eta: SpecialStabilizer(curve_from_json(p["base"]), p.get("c", 1.0), eta),
            "primitive": lambda iv, p, eta: PrimitiveCurve(
                curve_from_json(p["base"]), ScalarSpline.from_json(p["rho"]), p["r0"], p["g0"], p.get("interval", iv), eta
            ),
            "blend": lambda iv, p, eta: BlendCurve(
                curve_from_json(p["left"]), curve_from_json(p["mid"]), curve_from_json(p["right"]), p["ramps"], eta
            ),
            "frame": lambda iv, p, eta: FrameCurve(
                curve_from_json(p["base"]), ScalarSpline.from_json(p["x"]), p["r0"], p["y0"], p.get("interval", iv), eta
            ),
        }
    )


def curve_from_json(d: dict) -> ProfileCurve:
    """Build a curve from its JSON object (see README for the schema)."""
    if not _NAMED:
        _register()
    try:
        kind = d["kind"]
        eta = float(d.get("eta", DEFAULT_ETA))
        if kind == "hermite":
            nodes = d["nodes"]
            r = [float(n["r"]) for n in nodes]
            h = [[float(v) for v in n["h"]] for n in nodes]
            dh = [[float(v) for v in n["dh"]] for n in nodes]
            c = HermiteCurve(r, h, dh, eta)
            iv = d.get("interval")
            if iv is not None and (abs(iv[0] - r[0]) > 1e-12 or abs(iv[1] - r[-1]) > 1e-12):
                raise DomainError("node grid must cover the interval exactly")
            return c
        if kind == "named":
            name = d["name"]
            if name not in _NAMED:
                raise MalformedInputError(f"unknown curve family {name!r}")
            iv = d.get("interval", (0.0, 1.0))
            return _NAMED[name](iv, d.get("params", {}), eta)
    except (KeyError, TypeError, IndexError) as exc:
        raise MalformedInputError(f"malformed curve object: {exc}") from exc
    raise MalformedInputError(f"unknown curve kind {d.get('kind')!r}")


# --------------------------------------------------------------------------
# constructors


def standard(interval=(0.0, 1.0), scale: float = 1.0) -> ProfileCurve:
    return StandardCurve(interval, scale)


def poly(interval, cx: Iterable[float], cy: Iterable[float], eta: float = DEFAULT_ETA) -> ProfileCurve:
    return PolyCurve(interval, (list(cx), list(cy)), eta)


def constant(interval, v) -> ProfileCurve:
    return PolyCurve(interval, ([float(v[0])], [float(v[1])]), eta=0.0)


def hermite_from_function(fn, dfn, nodes, eta: float = DEFAULT_ETA) -> HermiteCurve:
    nodes = np.asarray(nodes, dtype=float)
    return HermiteCurve(nodes, fn(nodes), dfn(nodes), eta)


def hermite_from_derivative(dfn, nodes, start, eta: float = DEFAULT_ETA) -> HermiteCurve:
    """Hermite curve with node slopes dfn(nodes) and node values from
    Gauss-Legendre integration of dfn, starting at ``start``."""
    nodes = np.asarray(nodes, dtype=float)
    cum = nx.CumulativeIntegral(lambda s: np.asarray(dfn(s)), nodes[0], nodes[-1], nodes[0], breaks=nodes)
    vals = np.asarray(start, dtype=float)[None, :] + cum(nodes)
    return HermiteCurve(nodes, vals, dfn(nodes), eta)


def _check_same_interval(cs: Sequence[ProfileCurve]) -> None:
    a, b = cs[0].interval
    for k in cs[1:]:
        if abs(k.interval[0] - a) > 1e-12 or abs(k.interval[1] - b) > 1e-12:
            raise DomainError("curves do not share an interval", intervals=[list(x.interval) for x in cs])


def combine(cs: Sequence[tuple[float, ProfileCurve]]) -> ProfileCurve:
    """Pointwise linear combination. All-Hermite input yields an exact
    Hermite curve on the union of the node grids."""
    cs = [(float(c), k) for c, k in cs]
    if not cs:
        raise ParameterError("empty combination")
    _check_same_interval([k for _, k in cs])
    if all(isinstance(k, HermiteCurve) for _, k in cs):
        nodes = np.unique(np.concatenate([k.r for _, k in cs]))
        h = sum(c * k._eval(nodes, 0) for c, k in cs)
        dh = sum(c * k._eval(nodes, 1) for c, k in cs)
        return HermiteCurve(nodes, h, dh, eta=0.0)
    return CombinationCurve(cs, eta=0.0)


def reparametrize(c: ProfileCurve, scale: float, shift: float) -> ProfileCurve:
    """c o tau with tau(r) = scale * r + shift (scale > 0)."""
    if isinstance(c, HermiteCurve):
        if not scale > 0:
            raise ParameterError("affine reparametrization must be increasing")
        return HermiteCurve((c.r - shift) / scale, c.h, c.dh * scale, c.eta, check=False)
    return AffineCurve(c, scale, shift)


# --------------------------------------------------------------------------
# geometry


@dataclass(frozen=True)
class SlopeValue:
    direction: tuple
    rational_tag: tuple | None

    def to_json(self) -> dict:
        return {"direction": list(self.direction), "rational_tag": None if self.rational_tag is None else list(self.rational_tag)}


def slope(c: ProfileCurve, r: float, Q: int = nx.DEFAULT_Q, tol: float = nx.ANGLE_TOL) -> SlopeValue:
    d = c.eval(float(r), 1)
    n = math.hypot(d[0], d[1])
    if n < max(c.eta, 1e-300):
        raise ImmersionError("immersion violation", r=float(r), speed=n, eta=c.eta)
    u = (d[0] / n, d[1] / n)
    return SlopeValue((float(u[0]), float(u[1])), nx.rational_tag(u, Q, tol))


@dataclass(frozen=True)
class AngleLift:
    r: np.ndarray
    sigma: np.ndarray

    def __call__(self, r) -> np.ndarray:
        return np.interp(r, self.r, self.sigma)


def lift_vector_field(fn, a: float, b: float, seed: np.ndarray, max_samples: int = MAX_LIFT_SAMPLES) -> AngleLift:
    """Continuous angle of fn(r) in R^2 on [a, b]; samples are refined until
    successive increments are below pi/2."""
    r = np.unique(np.clip(np.asarray(seed, dtype=float), a, b))
    v = fn(r)
    while True:
        inc = np.arctan2(v[:-1, 0] * v[1:, 1] - v[:-1, 1] * v[1:, 0], v[:-1, 0] * v[1:, 0] + v[:-1, 1] * v[1:, 1])
        bad = np.abs(inc) >= math.pi / 2
        if not np.any(bad):
            break
        if len(r) + int(np.sum(bad)) > max_samples:
            raise NumericalError("angle lift undersampled after maximal refinement", samples=len(r))
        mids = 0.5 * (r[:-1][bad] + r[1:][bad])
        if np.any((mids <= r[:-1][bad]) | (mids >= r[1:][bad])):
            raise NumericalError("angle lift cannot be refined further (vanishing vector)")
        r = np.concatenate([r, mids])
        order = np.argsort(r)
        r = r[order]
        v = np.concatenate([v, fn(mids)])[order]
    sigma = math.atan2(v[0, 1], v[0, 0]) + np.concatenate([[0.0], np.cumsum(inc)])
    return AngleLift(r, sigma)


def angle_lift(c: ProfileCurve, n: int = 513) -> AngleLift:
    """Lift sigma of the unit tangent, exp(i sigma) = h'/|h'|."""
    a, b = c.interval
    check_immersion(c, n)
    return lift_vector_field(lambda s: unit_tangent(c, s)[0], a, b, c.grid(n))


def check_immersion(c: ProfileCurve, n: int = 513) -> None:
    g = c.interior_grid(n)
    if g.size == 0:
        return
    speed = np.hypot(*c._eval(g, 1).T)
    floor = max(c.eta, 0.0)
    bad = np.nonzero(speed < floor)[0] if floor > 0 else np.nonzero(speed == 0)[0]
    if bad.size:
        raise ImmersionError("immersion violation", r=float(g[bad[0]]), speed=float(speed[bad[0]]), eta=c.eta)


def winding(c: ProfileCurve, n: int = 513) -> float:
    """Total turning of h'/|h'| in full turns."""
    lift = angle_lift(c, n)
    return float((lift.sigma[-1] - lift.sigma[0]) / (2 * math.pi))


def origin_winding(c: ProfileCurve, n: int = 513) -> float:
    """Winding of h itself around 0, in full turns (h must avoid the origin)."""
    a, b = c.interval
    g = c.grid(n)
    v = c._eval(g, 0)
    if np.any(np.hypot(v[:, 0], v[:, 1]) == 0):
        raise DomainError("curve passes through the origin; winding around 0 undefined")
    lift = lift_vector_field(lambda s: c._eval(s, 0), a, b, g)
    return float((lift.sigma[-1] - lift.sigma[0]) / (2 * math.pi))


def contact_sign(c: ProfileCurve, n: int = 513, rtol: float = 1e-12) -> str:
    """'positive', 'negative' or 'mixed' for r -> <h, ih'> on the interior grid."""
    check_immersion(c, n)
    g = c.interior_grid(n)
    v = pairing(c._eval(g, 0), c._eval(g, 1))
    tol = rtol * max(float(np.max(np.abs(v))), 1e-300)
    if np.all(v > tol):
        return "positive"
    if np.all(v < -tol):
        return "negative"
    return "mixed"


def twist_report(c: ProfileCurve, window: float, n: int = 1025, tol: float = 1e-8) -> dict:
    """twists: the lift both rises and drops by a full turn somewhere;
    nowhere_constant: every subinterval of length >= window sees the lift move."""
    a, b = c.interval
    if not (0 < window <= b - a):
        raise ParameterError("window must lie in (0, b - a]", window=window)
    lift = angle_lift(c, n)
    s = lift.sigma
    rise = float(np.max(s - np.minimum.accumulate(s)))
    drop = float(np.max(np.maximum.accumulate(s) - s))
    full = 2 * math.pi * (1 - 1e-9)
    twists = rise >= full and drop >= full
    r = lift.r
    nowhere_constant = True
    j = 0
    for i in range(len(r)):
        while j < len(r) - 1 and r[j] < r[i] + window:
            j += 1
        if r[j] < r[i] + window - 1e-15:
            break
        seg = s[i : j + 1]
        if float(seg.max() - seg.min()) <= tol:
            nowhere_constant = False
            break
    return {"twists": bool(twists), "nowhere_constant": bool(nowhere_constant), "max_rise": rise, "max_drop": drop}


def sample_curve(c: ProfileCurve, r: np.ndarray, orders=(0, 1)) -> dict:
    return {o: c._eval(np.asarray(r, dtype=float), o) for o in orders}
