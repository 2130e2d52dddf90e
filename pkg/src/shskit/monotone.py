"""Monotone homotopies <h-dot_t, ih_t'> > 0, origin crossings and the
symplectization embedding of positive-quadrant curves."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .curve import ProfileCurve, check_immersion, combine, curve_from_json, origin_winding, pairing
from .errors import DomainError, MalformedInputError, ParameterError, PreconditionError

STANDARD_EPS = 0.05
NEWTON_TOL = 1e-13
TRANSVERSAL_DET = 1e-10


def _is_standard_germ(c: ProfileCurve, lo: float, hi: float, tol: float = 1e-9) -> bool:
    """c is a positive multiple of (r^2, 1 - r^2) on [lo, hi]."""
    r = np.linspace(lo, hi, 33)
    v = c._eval(r, 0)
    st = np.stack([r * r, 1 - r * r], axis=1)
    s = float(np.sum(v * st) / np.sum(st * st))
    return s > 0 and float(np.max(np.abs(v - s * st))) <= tol * max(1.0, s)


def _hermite_weights(s):
    s = np.asarray(s, dtype=float)
    s2, s3 = s * s, s * s * s
    w = (2 * s3 - 3 * s2 + 1, s3 - 2 * s2 + s, -2 * s3 + 3 * s2, s3 - s2)
    dw = (6 * s2 - 6 * s, 3 * s2 - 4 * s + 1, -6 * s2 + 6 * s, 3 * s2 - 2 * s)
    return w, dw


class MonotonePath:
    """Samples (t_j, h_j) over a fixed r-interval.

    Without velocities the path is linear in t between samples. When every
    sample also carries its time derivative (a curve in r), the path is the
    cubic Hermite interpolant in t instead.
    """

    def __init__(self, ts, curves, eps: float = STANDARD_EPS, check: bool = True, velocities=None):
        ts = [float(t) for t in ts]
        if len(ts) != len(curves) or len(ts) < 2:
            raise ParameterError("a path needs at least two samples with one curve each")
        if velocities is not None and len(velocities) != len(curves):
            raise ParameterError("one velocity per sample is required")
        if any(t1 <= t0 for t0, t1 in zip(ts[:-1], ts[1:])):
            raise ParameterError("sample times must increase strictly")
        iv = curves[0].interval
        for c in curves[1:]:
            if max(abs(c.interval[0] - iv[0]), abs(c.interval[1] - iv[1])) > 1e-12:
                raise DomainError("samples must share one r-interval")
        self.ts = np.asarray(ts)
        self.curves = list(curves)
        self.velocities = None if velocities is None else list(velocities)
        self.eps = float(eps)
        if check:
            for c in self.curves:
                check_immersion(c)
        a, b = iv
        self.standardized = all(
            _is_standard_germ(c, a, a + self.eps) and _is_standard_germ(c, b - self.eps, b) for c in self.curves
        )

    @property
    def interval(self):
        return (float(self.ts[0]), float(self.ts[-1]))

    @property
    def r_interval(self):
        return self.curves[0].interval

    def curve_at(self, t: float) -> ProfileCurve:
        hit = np.nonzero(self.ts == t)[0]
        if hit.size:
            return self.curves[int(hit[0])]
        j = min(max(int(np.searchsorted(self.ts, t, side="right")) - 1, 0), len(self.ts) - 2)
        dt = self.ts[j + 1] - self.ts[j]
        s = (t - self.ts[j]) / dt
        if self.velocities is None:
            return combine([(1 - s, self.curves[j]), (s, self.curves[j + 1])])
        (w0, w1, w2, w3), _ = _hermite_weights(s)
        return combine(
            [
                (float(w0), self.curves[j]),
                (float(w1) * dt, self.velocities[j]),
                (float(w2), self.curves[j + 1]),
                (float(w3) * dt, self.velocities[j + 1]),
            ]
        )

    def state(self, j: int, s, r: np.ndarray):
        """h, h', h-dot on segment j at local times s (array) and radii r."""
        dt = self.ts[j + 1] - self.ts[j]
        h0, h1 = self.curves[j]._eval(r, 0), self.curves[j + 1]._eval(r, 0)
        d0, d1 = self.curves[j]._eval(r, 1), self.curves[j + 1]._eval(r, 1)
        if self.velocities is None:
            s = np.asarray(s, dtype=float)[:, None, None]
            h = (1 - s) * h0[None] + s * h1[None]
            dh = (1 - s) * d0[None] + s * d1[None]
            hdot = np.broadcast_to(((h1 - h0) / dt)[None], h.shape)
            return h, dh, hdot
        v0, v1 = self.velocities[j]._eval(r, 0), self.velocities[j + 1]._eval(r, 0)
        e0, e1 = self.velocities[j]._eval(r, 1), self.velocities[j + 1]._eval(r, 1)
        w, dw = _hermite_weights(s)
        w = [x[:, None, None] for x in w]
        dw = [x[:, None, None] for x in dw]
        h = w[0] * h0 + w[1] * dt * v0 + w[2] * h1 + w[3] * dt * v1
        dh = w[0] * d0 + w[1] * dt * e0 + w[2] * d1 + w[3] * dt * e1
        hdot = (dw[0] * h0 + dw[2] * h1) / dt + dw[1] * v0 + dw[3] * v1
        return h, dh, hdot

    def reversed(self) -> "MonotonePath":
        a, b = self.interval
        vel = None if self.velocities is None else [combine([(-1.0, v)]) for v in self.velocities[::-1]]
        return MonotonePath((a + b) - self.ts[::-1], self.curves[::-1], self.eps, check=False, velocities=vel)

    def to_json(self) -> dict:
        samples = [{"t": float(t), "curve": c.to_json()} for t, c in zip(self.ts, self.curves)]
        if self.velocities is not None:
            for s, v in zip(samples, self.velocities):
                s["velocity"] = v.to_json()
        return {"interval": list(self.interval), "samples": samples, "eps": self.eps}

    @classmethod
    def from_json(cls, d: dict, check: bool = True) -> "MonotonePath":
        try:
            ts = [float(s["t"]) for s in d["samples"]]
            curves = [curve_from_json(s["curve"]) for s in d["samples"]]
            has_v = ["velocity" in s for s in d["samples"]]
            if any(has_v) and not all(has_v):
                raise MalformedInputError("either every sample carries a velocity or none does")
            vel = [curve_from_json(s["velocity"]) for s in d["samples"]] if all(has_v) else None
        except (KeyError, TypeError) as exc:
            raise MalformedInputError(f"malformed monotone path: {exc}") from exc
        return cls(ts, curves, float(d.get("eps", STANDARD_EPS)), check=check, velocities=vel)


def density_grid(path: MonotonePath, n_r: int = 257, per_segment: int = 3):
    """<h-dot, ih'> on (t, r); t runs over both ends and the midpoint of every
    segment (one-sided derivatives at sample times), r over cell midpoints."""
    a, b = path.r_interval
    edges = np.linspace(a, b, n_r + 1)
    r = 0.5 * (edges[:-1] + edges[1:])
    s = np.linspace(0.0, 1.0, per_segment)
    ts, rows = [], []
    for j in range(len(path.ts) - 1):
        h, dh, hdot = path.state(j, s, r)
        rows.append(pairing(hdot, dh))
        ts.extend(path.ts[j] + s * (path.ts[j + 1] - path.ts[j]))
    return np.asarray(ts), r, np.concatenate(rows, axis=0)


def _crossings(path: MonotonePath, n_r: int = 1025, per_segment: int = 9):
    a, b = path.r_interval
    r = np.linspace(a, b, n_r)
    s = np.linspace(0.0, 1.0, per_segment)
    found = []
    for j in range(len(path.ts) - 1):
        h, _, _ = path.state(j, s, r)
        x, y = h[..., 0], h[..., 1]
        cells = []
        for comp in (x, y):
            c4 = np.stack([comp[:-1, :-1], comp[1:, :-1], comp[:-1, 1:], comp[1:, 1:]])
            cells.append((c4.min(axis=0) <= 0) & (c4.max(axis=0) >= 0))
        for i, k in zip(*np.nonzero(cells[0] & cells[1])):
            root = _newton(path, j, 0.5 * (s[i] + s[i + 1]), 0.5 * (r[k] + r[k + 1]))
            if root is None:
                continue
            t, rr, det, dens = root
            if not any(abs(t - u) < 1e-8 and abs(rr - v) < 1e-8 for u, v, *_ in found):
                found.append((t, rr, det, dens))
    found.sort()
    return found


def _newton(path: MonotonePath, j: int, s: float, r: float):
    a, b = path.r_interval
    dt = path.ts[j + 1] - path.ts[j]
    for _ in range(60):
        h, dh, hdot = path.state(j, [s], np.array([r]))
        F = h[0, 0]
        J = np.array([[hdot[0, 0, 0] * dt, dh[0, 0, 0]], [hdot[0, 0, 1] * dt, dh[0, 0, 1]]])
        if np.hypot(*F) < NEWTON_TOL:
            break
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return None
        s, r = s + step[0], r + step[1]
        if not (-0.5 < s < 1.5 and a - 1e-9 <= r <= b + 1e-9):
            return None
    else:
        return None
    if not (0 <= s <= 1 and a <= r <= b) or np.hypot(*F) > 1e-10:
        return None
    det = float(hdot[0, 0, 0] * dh[0, 0, 1] - hdot[0, 0, 1] * dh[0, 0, 0])
    dens = float(pairing(hdot[0], dh[0])[0])
    return float(path.ts[j] + s * dt), float(r), det, dens


def monotone_check(path: MonotonePath, n_r: int = 257) -> dict:
    ts, r, dens = density_grid(path, n_r)
    crossings, boundary = [], []
    (t0, t1), (a, b) = path.interval, path.r_interval
    for t, rr, det, d in _crossings(path):
        if min(abs(t - t0), abs(t - t1), abs(rr - a), abs(rr - b)) < 1e-9:
            # a zero on the edge of the (t, r) domain is not a passage through the origin
            boundary.append({"t": t, "r": rr})
            continue
        transversal = abs(det) > TRANSVERSAL_DET
        crossings.append(
            {
                "t": t,
                "r": rr,
                "det": det,
                "transversal": transversal,
                # the origin winding drops by one where <h-dot, ih'> > 0
                "winding_change": (-1 if d > 0 else 1) if transversal else None,
            }
        )
    mn = float(np.min(dens))
    # min_density is <h-dot, ih'>; the 4-form density carries an extra factor 2
    return {
        "ok": mn > 0,
        "min_density": mn,
        "min_volume_density": 2.0 * mn,
        "crossings": crossings,
        "boundary_zeros": boundary,
        "grid": [len(ts), len(r)],
    }


def standardized_winding(c: ProfileCurve, tol: float = 1e-9) -> float:
    """Winding of h around the origin for curves starting on the positive
    phi-axis and ending on the positive theta-axis, normalized so that
    h_st has winding 0."""
    a, b = c.interval
    p, q = c._eval(np.array([a, b]), 0)
    if not (abs(p[0]) <= tol * max(1.0, abs(p[1])) and p[1] > 0 and abs(q[1]) <= tol * max(1.0, abs(q[0])) and q[0] > 0):
        raise PreconditionError("curve ends are not on the positive axes")
    return origin_winding(c) + 0.25


def winding_obstruction(h0: ProfileCurve, h1: ProfileCurve, tol: float = 1e-6) -> dict:
    """Necessary condition w(h1) <= w(h0) for a standardized monotone homotopy."""
    w0, w1 = standardized_winding(h0), standardized_winding(h1)
    obstructed = w1 > w0 + tol
    return {"verdict": "obstructed" if obstructed else "admissible", "w0": w0, "w1": w1}


_EXOTIC = None


def exotic_ball_path() -> MonotonePath:
    """Stored monotone path from h_st/2 to a curve that winds once less around
    the origin (node tables generated by tools/design_exotic.py)."""
    global _EXOTIC
    if _EXOTIC is None:
        raw = resources.files("shskit").joinpath("data/exotic_path.json").read_text()
        _EXOTIC = MonotonePath.from_json(json.loads(raw))
    return _EXOTIC


def exotic_curve() -> ProfileCurve:
    return exotic_ball_path().curves[-1]


@dataclass(frozen=True)
class EmbeddingReport:
    r: np.ndarray
    s: np.ndarray
    rt: np.ndarray
    residual: float
    on_sphere_defect: float

    def to_json(self) -> dict:
        return {
            "grid_points": int(len(self.r)),
            "residual": self.residual,
            "on_sphere_defect": self.on_sphere_defect,
            "s_min": float(np.min(self.s)),
            "s_max": float(np.max(self.s)),
        }


def embed_symplectization(h: ProfileCurve, n: int = 513) -> EmbeddingReport:
    """(s, r~) = (h1 + h2, sqrt(h1/(h1 + h2))); the pullback of s alpha_st is
    alpha_h exactly when s r~^2 = h1 and s (1 - r~^2) = h2."""
    r = h.interior_grid(n)
    v = h._eval(r, 0)
    bad = (v[:, 0] <= 0) | (v[:, 1] <= 0)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise DomainError("curve leaves the open positive quadrant", r=float(r[i]), h=[float(v[i, 0]), float(v[i, 1])])
    s = v[:, 0] + v[:, 1]
    rt = np.sqrt(v[:, 0] / s)
    res = max(float(np.max(np.abs(s * rt * rt - v[:, 0]))), float(np.max(np.abs(s * (1 - rt * rt) - v[:, 1]))))
    defect = float(np.max(s) - np.min(s))
    return EmbeddingReport(r, s, rt, res, defect)


def linear_path(h0: ProfileCurve, h1: ProfileCurve, n: int = 2) -> MonotonePath:
    ts = np.linspace(0.0, 1.0, n)
    return MonotonePath(ts, [combine([(1 - t, h0), (t, h1)]) for t in ts])


__all__ = [
    "MonotonePath",
    "monotone_check",
    "winding_obstruction",
    "standardized_winding",
    "exotic_ball_path",
    "exotic_curve",
    "embed_symplectization",
    "EmbeddingReport",
    "density_grid",
    "linear_path",
]
