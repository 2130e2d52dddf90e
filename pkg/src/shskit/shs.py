"""Invariant stable Hamiltonian structures (omega_h, lambda_g) on I x T^2.

The pair (h, g) is stable iff <g', ih'> = 0 and <g, ih'> > 0. The Reeb
field in (theta, phi) components is (-h2', h1') / D with D = <g, ih'>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import numerics as nx
from .curve import (
    ProfileCurve,
    _check_same_interval,
    angle_lift,
    curve_from_json,
    dot,
    pairing,
)
from .errors import MalformedInputError, PreconditionError, StabilizationError

DEFAULT_VERIFY_TOL = 1e-7


@dataclass(frozen=True)
class ShsPair:
    h: ProfileCurve
    g: ProfileCurve
    verify_tol: float = DEFAULT_VERIFY_TOL
    boundary_exempt: float = 0.0

    def __post_init__(self):
        _check_same_interval([self.h, self.g])

    @property
    def interval(self):
        return self.h.interval

    def grid(self, n: int = 513) -> np.ndarray:
        return np.unique(np.concatenate([self.h.grid(n), self.g.grid(n)]))

    def interior_grid(self, n: int = 513) -> np.ndarray:
        a, b = self.interval
        g = self.grid(n)
        e = self.boundary_exempt
        return g[(g > a + e) & (g < b - e)]

    def with_g(self, g: ProfileCurve) -> "ShsPair":
        return ShsPair(self.h, g, self.verify_tol, self.boundary_exempt)

    def to_json(self) -> dict:
        return {
            "h": self.h.to_json(),
            "g": self.g.to_json(),
            "verify_tol": self.verify_tol,
            "boundary_exempt": self.boundary_exempt,
        }

    @classmethod
    def from_json(cls, d: dict) -> "ShsPair":
        try:
            return cls(
                curve_from_json(d["h"]),
                curve_from_json(d["g"]),
                float(d.get("verify_tol", DEFAULT_VERIFY_TOL)),
                float(d.get("boundary_exempt", 0.0)),
            )
        except (KeyError, TypeError) as exc:
            raise MalformedInputError(f"malformed pair object: {exc}") from exc


def _samples(pair: ShsPair, r: np.ndarray) -> dict:
    return {
        "h": pair.h._eval(r, 0),
        "dh": pair.h._eval(r, 1),
        "g": pair.g._eval(r, 0),
        "dg": pair.g._eval(r, 1),
    }


def verify(pair: ShsPair, n: int = 513) -> dict:
    """Residual of <g', ih'> = 0 (normalized by sup|g'| sup|h'|) and the
    minimum of <g, ih'> over the interior grid."""
    r = pair.grid(n)
    s = _samples(pair, r)
    res = np.abs(pairing(s["dg"], s["dh"]))
    a, b = pair.interval
    # floor |g'| at |g|/(b-a): for g constant, g' is pure roundoff
    gscale = max(float(np.max(np.hypot(*s["dg"].T))), float(np.max(np.hypot(*s["g"].T))) / (b - a))
    norm = gscale * float(np.max(np.hypot(*s["dh"].T)))
    residual = float(np.max(res)) / norm if norm > 0 else 0.0
    ri = pair.interior_grid(n)
    pr = pairing(pair.g._eval(ri, 0), pair.h._eval(ri, 1))
    min_pairing = float(np.min(pr)) if pr.size else float("nan")
    ok = residual <= pair.verify_tol and pr.size > 0 and min_pairing > 0
    return {
        "residual_sup": residual,
        "min_pairing": min_pairing,
        "argmin_pairing": float(ri[int(np.argmin(pr))]) if pr.size else float("nan"),
        "ok": bool(ok),
    }


def require_verified(pair: ShsPair, n: int = 513) -> dict:
    rep = verify(pair, n)
    if not rep["ok"]:
        raise StabilizationError("pair does not satisfy the stabilization conditions", **rep)
    return rep


def proportionality_values(pair: ShsPair, r: np.ndarray) -> np.ndarray:
    dh = pair.h._eval(r, 1)
    dg = pair.g._eval(r, 1)
    return dot(dg, dh) / dot(dh, dh)


def _refine_extremes(pair: ShsPair, r: np.ndarray, f: np.ndarray) -> tuple[float, float]:
    """Sharpen the grid min and max of f by a zoom search in the two cells
    around each grid extreme."""
    a, b = pair.interval
    e = pair.boundary_exempt
    ends = []
    for x, fallback in ((a + e, r[0]), (b - e, r[-1])):
        sp = float(np.hypot(*pair.h._eval(np.array([x]), 1)[0]))
        ends.append(x if sp > max(pair.h.eta, 1e-12) else fallback)
    out = []
    for sgn, i in ((1.0, int(np.argmin(f))), (-1.0, int(np.argmax(f)))):
        lo = r[i - 1] if i > 0 else ends[0]
        hi = r[i + 1] if i < len(r) - 1 else ends[1]
        _, v = nx.zoom_min(lambda x: sgn * proportionality_values(pair, x), lo, hi)
        out.append(min(sgn * float(f[i]), v) * sgn)
    return out[0], out[1]


def proportionality(pair: ShsPair, n: int = 513, rtol: float = 1e-9) -> dict:
    """f = <g', h'> / |h'|^2, the function with d(lambda) = f omega."""
    r = pair.interior_grid(n)
    sp = np.hypot(*pair.h._eval(r, 1).T)
    if np.any(sp < max(pair.h.eta, 1e-300)):
        from .errors import ImmersionError

        raise ImmersionError("immersion violation", r=float(r[np.argmin(sp)]))
    f = proportionality_values(pair, r)
    # pairs are immutable, and homotopies revisit the same samples often
    cache = pair.__dict__.setdefault("_extremes", {})
    if n not in cache:
        cache[n] = _refine_extremes(pair, r, f)
    lo, hi = cache[n]
    return {
        "r": r,
        "f": f,
        "min": lo,
        "max": hi,
        "constant": bool(hi - lo <= rtol * max(1.0, abs(lo), abs(hi))),
    }


def delta_from_range(fmin: float, fmax: float) -> tuple[float, float]:
    """(delta_minus, delta_plus) for 1 + t f(r) with f in [fmin, fmax]."""
    dplus = math.inf if fmin >= 0 else 1.0 / (-fmin)
    dminus = math.inf if fmax <= 0 else 1.0 / fmax
    return dminus, dplus


def delta_bounds(pair: ShsPair, n: int = 513) -> tuple[float, float]:
    """omega + t d(lambda) = (1 + t f) omega stays nondegenerate exactly for
    -delta_minus < t < delta_plus."""
    p = proportionality(pair, n)
    return delta_from_range(p["min"], p["max"])


def helicity_data(pair: ShsPair, interval=None, tol: float = nx.SIMPSON_TOL) -> dict:
    """Hc = int <h, ih'>, P = int <g, ih'>, Q2 = int <g, ig'>."""
    a, b = pair.interval if interval is None else interval
    h, g = pair.h, pair.g
    br = np.unique(np.concatenate([h.breaks(), g.breaks()]))

    def integrand(u, v):
        return lambda r: pairing(u._eval(r, 0), v._eval(r, 1))

    Hc = nx.adaptive_simpson(integrand(h, h), a, b, tol, breaks=br)
    P = nx.adaptive_simpson(integrand(g, h), a, b, tol, breaks=br)
    Q2 = nx.adaptive_simpson(integrand(g, g), a, b, tol, breaks=br)
    return {"Hc": Hc, "P": P, "Q2": Q2}


def curve_helicity(h: ProfileCurve, interval=None, tol: float = nx.SIMPSON_TOL) -> float:
    a, b = h.interval if interval is None else interval
    return nx.adaptive_simpson(lambda r: pairing(h._eval(r, 0), h._eval(r, 1)), a, b, tol, breaks=h.breaks())


def helicity_difference(h0: ProfileCurve, h1: ProfileCurve) -> dict:
    """Hc(h1) - Hc(h0) for curves with equal endpoints, with the area of the
    loop (h1 followed by h0 reversed): the difference equals -2 * signed area."""
    d = curve_helicity(h1) - curve_helicity(h0)
    return {"delta_Hc": d, "magnitude": abs(d), "orientation": "clockwise" if d > 0 else "counterclockwise"}


# --------------------------------------------------------------------------
# Reeb dynamics


def reeb_values(pair: ShsPair, r: np.ndarray) -> np.ndarray:
    dh = pair.h._eval(r, 1)
    D = pairing(pair.g._eval(r, 0), dh)
    if np.any(D <= 0):
        raise StabilizationError("<g, ih'> <= 0: no Reeb field", r=float(r[np.argmin(D)]))
    return np.stack([-dh[:, 1], dh[:, 0]], axis=1) / D[:, None]


def reeb_field(pair: ShsPair, r: float) -> np.ndarray:
    return reeb_values(pair, np.array([float(r)]))[0]


@dataclass(frozen=True)
class OrbitData:
    r: float
    direction: tuple
    T: float
    E_lambda: float
    E_omega: float

    def to_json(self) -> dict:
        return {"r": self.r, "direction": list(self.direction), "T": self.T, "E_lambda": self.E_lambda, "E_omega": self.E_omega}


def closed_orbit(pair: ShsPair, r: float, Q: int = nx.DEFAULT_Q, tol: float = 1e-9) -> OrbitData:
    R = reeb_field(pair, r)
    tag = nx.rational_tag(R, Q, tol)
    if tag is None:
        raise PreconditionError("slope is not rational within the denominator bound: no closed orbit", r=float(r), Q=Q)
    T = math.hypot(*tag) / math.hypot(*R)
    rr = np.array([float(r)])
    alpha_R = float(pairing(pair.h._eval(rr, 0), pair.h._eval(rr, 1))[0] / pairing(pair.g._eval(rr, 0), pair.h._eval(rr, 1))[0])
    return OrbitData(float(r), tag, T, T, T * alpha_R)


def k_functions(pair: ShsPair, r: np.ndarray):
    """k = h'/D and its r-derivative."""
    dh = pair.h._eval(r, 1)
    d2h = pair.h._eval(r, 2)
    g = pair.g._eval(r, 0)
    dg = pair.g._eval(r, 1)
    D = pairing(g, dh)
    dD = pairing(dg, dh) + pairing(g, d2h)
    k = dh / D[:, None]
    dk = (d2h * D[:, None] - dh * dD[:, None]) / (D * D)[:, None]
    return k, dk


def linearized_return(pair: ShsPair, r: float, Q: int = nx.DEFAULT_Q) -> dict:
    """D Phi_T at a rational torus, with the dimension of ker(D Phi_T - 1)."""
    orb = closed_orbit(pair, r, Q)
    _, dk = k_functions(pair, np.array([float(r)]))
    T = orb.T
    M = np.array([[1.0, 0.0, 0.0], [-dk[0, 1] * T, 1.0, 0.0], [dk[0, 0] * T, 0.0, 1.0]])
    A = M - np.eye(3)
    scale = max(1.0, float(np.max(np.abs(A))))
    rank = int(np.linalg.matrix_rank(A, tol=1e-9 * scale))
    return {"matrix": M, "kernel_dim": 3 - rank, "T": T, "dk": dk[0]}


def flow(pair: ShsPair, r: float, theta: float, phi: float, t: float) -> tuple:
    """Linear Reeb flow on the torus {r} x T^2."""
    R = reeb_field(pair, r)
    return (r, theta + R[0] * t, phi + R[1] * t)


# --------------------------------------------------------------------------
# rational census


@dataclass
class Census:
    points: list = field(default_factory=list)  # (r, (p, q))
    bands: list = field(default_factory=list)  # (lo, hi, (p, q))

    def to_json(self) -> dict:
        return {
            "points": [{"r": r, "tag": list(t)} for r, t in self.points],
            "bands": [{"interval": [lo, hi], "tag": list(t)} for lo, hi, t in self.bands],
        }


def rational_census(h: ProfileCurve, Q: int = nx.DEFAULT_Q, n: int = 1025, tol: float = nx.ROOT_TOL) -> Census:
    """All r where h'/|h'| crosses a rational direction (p, q), |p|,|q| <= Q."""
    lift = angle_lift(h, n)
    r, s = lift.r, lift.sigma
    dirs = nx.coprime_directions(Q)
    base = np.arctan2(dirs[:, 1], dirs[:, 0])
    order = np.argsort(base)
    base, dirs = base[order], dirs[order]
    two_pi = 2 * math.pi
    m_lo = int(math.floor((s.min() - math.pi) / two_pi)) - 1
    m_hi = int(math.ceil((s.max() + math.pi) / two_pi)) + 1
    ms = np.arange(m_lo, m_hi + 1)
    ext = (base[None, :] + two_pi * ms[:, None]).ravel()
    ext_dirs = np.tile(dirs, (len(ms), 1))

    census = Census()
    # constant-slope runs
    flat = np.abs(np.diff(s)) <= 1e-13
    i = 0
    while i < len(flat):
        if flat[i]:
            j = i
            while j < len(flat) and flat[j]:
                j += 1
            lo, hi = r[i], r[j]
            if hi - lo > 1e-9 * (r[-1] - r[0]) and j - i >= 2:
                u = (math.cos(s[i]), math.sin(s[i]))
                tag = nx.rational_tag(u, Q)
                if tag is not None:
                    census.bands.append((float(lo), float(hi), tag))
            i = j
        else:
            i += 1

    s0, s1 = s[:-1], s[1:]
    up = s1 > s0
    lo_idx = np.where(up, np.searchsorted(ext, s0, side="right"), np.searchsorted(ext, s1, side="left"))
    hi_idx = np.where(up, np.searchsorted(ext, s1, side="right"), np.searchsorted(ext, s0, side="left"))
    cells, vals = [], []
    for c in np.nonzero(hi_idx > lo_idx)[0]:
        for k in range(lo_idx[c], hi_idx[c]):
            cells.append(c)
            vals.append(k)
    start_hits = np.nonzero(ext == s[0])[0]
    pts = []
    if start_hits.size:
        pts.append((float(r[0]), tuple(int(v) for v in ext_dirs[start_hits[0]])))
    if cells:
        cells = np.asarray(cells)
        vals = np.asarray(vals)
        u = np.stack([np.cos(ext[vals]), np.sin(ext[vals])], axis=1)

        def fn(x, u=u):
            d = h._eval(x, 1)
            return u[:, 0] * d[:, 1] - u[:, 1] * d[:, 0]

        lo_r, hi_r = r[cells], r[cells + 1]
        flo, fhi = fn(lo_r), fn(hi_r)
        # a direction hit exactly at a grid node may carry a rounding-level
        # sign error; snap those brackets to the endpoint nearest zero
        bad = flo * fhi > 0
        snap = np.where(np.abs(flo) <= np.abs(fhi), lo_r, hi_r)
        roots = np.empty(len(cells))
        roots[bad] = snap[bad]
        if np.any(~bad):
            good = ~bad
            roots[good] = nx.bisect_roots(lambda x: fn(x, u[good]), lo_r[good], hi_r[good], tol)
        for x, v in zip(roots, vals):
            pts.append((float(x), tuple(int(t) for t in ext_dirs[v])))
    band_eps = 10 * tol
    pts = [
        (x, t)
        for x, t in pts
        if not any(lo - band_eps <= x <= hi + band_eps and tuple(bt) == t for lo, hi, bt in census.bands)
    ]
    pts.sort(key=lambda p: (p[0], p[1]))
    census.points = pts
    return census


# --------------------------------------------------------------------------
# Morse-Bott


@dataclass
class MorseBottReport:
    verdict: str
    witnesses: list  # (r, (p, q), d)
    bands: list

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "witnesses": [{"r": r, "tag": list(t), "d": d} for r, t, d in self.witnesses],
            "constant_rational_bands": [{"interval": [lo, hi], "tag": list(t)} for lo, hi, t in self.bands],
        }


def mb_determinant(h: ProfileCurve, r: np.ndarray) -> np.ndarray:
    """d = h1'' h2' - h1' h2''; at Hermite nodes the one-sided value of
    smaller magnitude is used."""
    a, b = h.interval
    eps = 1e-9 * (b - a)
    out = None
    for x in (r, np.clip(r - eps, a, b), np.clip(r + eps, a, b)):
        d1 = h._eval(x, 1)
        d2 = h._eval(x, 2)
        d = d2[:, 0] * d1[:, 1] - d1[:, 0] * d2[:, 1]
        out = d if out is None else np.where(np.abs(d) < np.abs(out), d, out)
    return out


def morse_bott_check(pair: ShsPair, Q: int = nx.DEFAULT_Q, rtol: float = 1e-8) -> MorseBottReport:
    census = rational_census(pair.h, Q)
    grid = pair.h.grid(513)
    scale = float(np.max(np.hypot(*pair.h._eval(grid, 1).T))) * float(np.max(np.hypot(*pair.h._eval(grid, 2).T)))
    tol = rtol * max(scale, 1e-300)
    witnesses = []
    if census.points:
        rs = np.array([p[0] for p in census.points])
        ds = mb_determinant(pair.h, rs)
        witnesses = [(float(x), t, float(d)) for (x, t), d in zip(census.points, ds)]
    if not witnesses and not census.bands:
        verdict = "vacuous"
    elif any(abs(d) < tol for _, _, d in witnesses):
        verdict = "degenerate"
    else:
        verdict = "morse_bott"
    return MorseBottReport(verdict, witnesses, census.bands)


# --------------------------------------------------------------------------
# tameness


def tameness_scan(pair: ShsPair, Q: int = nx.DEFAULT_Q, n: int = 2049, nearest: int = 4) -> dict:
    """Zeros of alpha_h(R) = <h, ih'>/D and the ratio E_lambda/|E_omega| on
    rational tori; the ratio blows up as rational tori approach a zero."""
    r = pair.interior_grid(n)
    a_vals = pairing(pair.h._eval(r, 0), pair.h._eval(r, 1))
    lo, hi = nx.bracket_sign_changes(r, a_vals)
    zeros = []
    if lo.size:
        zeros = nx.bisect_roots(lambda x: pairing(pair.h._eval(x, 0), pair.h._eval(x, 1)), lo, hi).tolist()
    census = rational_census(pair.h, Q)
    sample_r = [x for x, _ in census.points] + [0.5 * (b0 + b1) for b0, b1, _ in census.bands]
    table = []
    if sample_r:
        rs = np.array(sorted(sample_r))
        a, b = pair.interval
        inside = (rs > a) & (rs < b)
        rs = rs[inside]
        if rs.size:
            D = pairing(pair.g._eval(rs, 0), pair.h._eval(rs, 1))
            A = pairing(pair.h._eval(rs, 0), pair.h._eval(rs, 1))
            ratio = np.where(A == 0, np.inf, D / np.where(A == 0, 1.0, np.abs(A)))
            table = [(float(x), float(q)) for x, q in zip(rs, ratio)]
    near = []
    for z in zeros:
        if table:
            srt = sorted(table, key=lambda e: abs(e[0] - z))[:nearest]
            near.append({"r_star": float(z), "tori": sorted(srt)})
    return {"zeros_of_alpha_R": [float(z) for z in zeros], "ratio_table": table, "near_zeros": near}
