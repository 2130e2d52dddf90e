"""Synthesis of stabilizing curves g for a given immersion h.

Every g produced here satisfies g' || h' exactly by construction (either
g' = rho h' or g written in the moving frame of h); positivity of
<g, ih'> is checked on the evaluation grid before returning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics as nx
from .curve import (
    BlendCurve,
    CombinationCurve,
    FrameCurve,
    GluedCurve,
    HermiteCurve,
    PrimitiveCurve,
    ProfileCurve,
    ScalarSpline,
    SpecialStabilizer,
    bump,
    check_immersion,
    curve_from_json,
    dot,
    lift_vector_field,
    pairing,
    rot,
    unit_tangent,
    winding,
)
from .errors import (
    ConstructionError,
    DomainError,
    MalformedInputError,
    NotSynthesizableError,
    NumericalError,
    ObstructionError,
    ParameterError,
    PreconditionError,
    StabilizationError,
)
from .shs import ShsPair, verify

GRAM_COND_MAX = 1e8
SLOPE_VARIATION_MIN = 1e-6
HOMOTOPY_SAMPLES = 33
CONNECT_ATTEMPTS = 8


@dataclass(frozen=True)
class BoundaryData:
    """Stabilizing germs: ``left`` is used on [a, a+eps], ``right`` on [b-eps, b]."""

    left: ProfileCurve
    right: ProfileCurve
    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ParameterError("boundary width eps must be positive", eps=self.eps)

    @classmethod
    def from_solution(cls, g: ProfileCurve, eps: float) -> "BoundaryData":
        return cls(g, g, eps)

    def spans(self, h: ProfileCurve):
        a, b = h.interval
        a0, b0 = a + self.eps, b - self.eps
        if not a0 < b0:
            raise DomainError("boundary germs overlap", eps=self.eps, interval=[a, b])
        if self.left.interval[0] > a + 1e-12 or self.left.interval[1] < a0 - 1e-12:
            raise DomainError("left germ does not cover [a, a+eps]")
        if self.right.interval[0] > b0 + 1e-12 or self.right.interval[1] < b - 1e-12:
            raise DomainError("right germ does not cover [b-eps, b]")
        return a0, b0

    def check(self, h: ProfileCurve, tol: float = 1e-7, n: int = 129) -> None:
        """Each germ paired with h satisfies the stabilization conditions."""
        a, b = h.interval
        a0, b0 = self.spans(h)
        for germ, lo, hi in ((self.left, a, a0), (self.right, b0, b)):
            r = np.linspace(lo, hi, n)
            dh = h._eval(r, 1)
            dg = germ._eval(r, 1)
            gs = max(float(np.max(np.hypot(*dg.T))), float(np.max(np.hypot(*germ._eval(r, 0).T))) / (hi - lo))
            norm = gs * float(np.max(np.hypot(*dh.T)))
            res = float(np.max(np.abs(pairing(dg, dh)))) / norm if norm > 0 else 0.0
            # the pairing may vanish where h' does (S^3 ends), so test the open side
            ri = r[1:] if lo == a else r[:-1]
            pr = pairing(germ._eval(ri, 0), h._eval(ri, 1))
            if res > tol or np.min(pr) <= 0:
                raise PreconditionError(
                    "boundary germ does not stabilize h", side="left" if lo == a else "right",
                    residual=res, min_pairing=float(np.min(pr)),
                )

    def to_json(self) -> dict:
        return {"left": self.left.to_json(), "right": self.right.to_json(), "eps": self.eps}

    @classmethod
    def from_json(cls, d: dict) -> "BoundaryData":
        try:
            return cls(curve_from_json(d["left"]), curve_from_json(d["right"]), float(d["eps"]))
        except (KeyError, TypeError) as exc:
            raise MalformedInputError(f"malformed boundary data: {exc}") from exc


@dataclass(frozen=True)
class CorrectionBasis:
    """Two bumps (center, half-width) and the 2x2 matrix of L(sigma_i) = int sigma_i h'."""

    centers: tuple
    width: float
    gram: np.ndarray

    @property
    def condition(self) -> float:
        return float(np.linalg.cond(self.gram))


# --------------------------------------------------------------------------
# frame helpers


def theta_d(h: ProfileCurve, r: np.ndarray) -> np.ndarray:
    """Angular speed of the unit tangent."""
    k, _, kp = unit_tangent(h, r, with_derivative=True)
    return dot(kp, rot(k))


def frame_coords(g: ProfileCurve, h: ProfileCurve, r: np.ndarray):
    """x = <g, k>, y = <g, ik> and x' for k = h'/|h'|."""
    k, _, kp = unit_tangent(h, r, with_derivative=True)
    gv = g._eval(r, 0)
    x = dot(gv, k)
    y = dot(gv, rot(k))
    dx = dot(g._eval(r, 1), k) + dot(gv, kp)
    return x, y, dx


def slope_variation(h: ProfileCurve, lo: float, hi: float, n: int = 257) -> float:
    lift = lift_vector_field(lambda s: unit_tangent(h, s)[0], lo, hi, np.linspace(lo, hi, n))
    return float(np.max(lift.sigma) - np.min(lift.sigma))


def _interior_breaks(cs, lo, hi):
    pts = np.concatenate([np.asarray(c.breaks(), dtype=float) for c in cs])
    return pts[(pts > lo) & (pts < hi)]


# --------------------------------------------------------------------------
# special and constant-slope solutions


def special_stabilizer(h: ProfileCurve, c: float = 1.0) -> ProfileCurve:
    """g = c i h'/|h'|; <g, ih'> = c |h'|."""
    if not c > 0:
        raise ParameterError("c must be positive", c=c)
    check_immersion(h)
    return SpecialStabilizer(h, c)


def _germ_level(germ: ProfileCurve, h: ProfileCurve, lo: float, hi: float, n: int = 65):
    r = np.linspace(lo, hi, n)
    k, _ = unit_tangent(h, r)
    return dot(germ._eval(r, 0), rot(k))


def constant_slope_stabilizer(h: ProfileCurve, bd: BoundaryData, delta: float, tol: float = 1e-9) -> ProfileCurve:
    """Blend the germs into c i h'/|h'|, possible exactly when both germs
    carry the same level c = <g, ik> on the constant-slope ends."""
    a, b = h.interval
    a0, b0 = bd.spans(h)
    if not 0 < delta < bd.eps:
        raise ParameterError("need 0 < delta < eps", delta=delta, eps=bd.eps)
    for lo, hi in ((a, a0), (b0, b)):
        if slope_variation(h, lo, hi) > tol:
            raise PreconditionError("slope of h is not constant on a boundary germ", interval=[lo, hi])
    levels = []
    for germ, lo, hi in ((bd.left, a, a0), (bd.right, b0, b)):
        lv = _germ_level(germ, h, lo, hi)
        if float(np.max(lv) - np.min(lv)) > tol * max(1.0, float(np.max(np.abs(lv)))):
            raise PreconditionError("germ does not solve the stabilization condition at constant slope")
        levels.append(float(np.mean(lv)))
    c_minus, c_plus = levels
    if abs(c_minus - c_plus) > tol * max(1.0, abs(c_minus), abs(c_plus)):
        raise ObstructionError("constant-slope stabilization requires c- = c+", c_minus=c_minus, c_plus=c_plus)
    if not c_minus > 0:
        raise PreconditionError("germ level must be positive", c=c_minus)
    mid = SpecialStabilizer(h, c_minus)
    return BlendCurve(bd.left, mid, bd.right, (a + delta, a0, b0, b - delta))


# --------------------------------------------------------------------------
# nonconstant slope: boundary value problem


@dataclass(frozen=True)
class _Plan:
    kind: str  # "primitive" or "frame"
    data: tuple


class _GramDegenerate(Exception):
    pass


class _NotPositive(Exception):
    pass


def _multiplier(germ: ProfileCurve, h: ProfileCurve, r0: float, side: int):
    """rho = <g', h'>/|h'|^2 and its one-sided derivative at r0 (side -1:
    germ lives left of r0)."""
    s = 1e-4 * (germ.interval[1] - germ.interval[0])
    rs = np.array([r0, r0 + side * s, r0 + 2 * side * s])
    rs = np.clip(rs, *germ.interval)
    dh = h._eval(rs, 1)
    f = dot(germ._eval(rs, 1), dh) / dot(dh, dh)
    d = side * (-3 * f[0] + 4 * f[1] - f[2]) / (2 * s)
    return float(f[0]), float(d)


def _moment(h: ProfileCurve, c: float, w: float) -> np.ndarray:
    lo, hi = c - w, c + w
    br = list(_interior_breaks([h], lo, hi)) + [c]
    cum = nx.CumulativeIntegral(lambda s: bump(s, c, w)[:, None] * h._eval(s, 1), lo, hi, lo, breaks=br)
    return cum(np.array([hi]))[0]


def correction_candidates(h: ProfileCurve, a0: float, b0: float, max_pairs: int = 6):
    """Bump pairs centered at the largest |k'| points, half-width 5% of the interval."""
    a, b = h.interval
    w = min(0.05 * (b - a), (b0 - a0) / 4)
    r = np.linspace(a0 + w, b0 - w, 257)
    mag = np.abs(theta_d(h, r))
    order = np.argsort(-mag, kind="stable")
    firsts = []
    for i in order:
        if all(abs(r[i] - f) >= 2 * w for f in firsts):
            firsts.append(r[i])
        if len(firsts) >= 3:
            break
    pairs = []
    for c1 in firsts:
        for sep in (2 * w, w):
            cand = [r[i] for i in order if abs(r[i] - c1) >= sep]
            if cand:
                pair = tuple(sorted((float(c1), float(cand[0]))))
                if pair not in pairs:
                    pairs.append(pair)
                break
    return [(p, w) for p in pairs[:max_pairs]]


def correction_basis(h: ProfileCurve, centers, w: float) -> CorrectionBasis:
    M = np.stack([_moment(h, c, w) for c in centers], axis=1)
    return CorrectionBasis(tuple(centers), w, M)


def _solve_primitive(h: ProfileCurve, bd: BoundaryData, centers, w):
    a0, b0 = bd.spans(h)
    rl0, rl1 = _multiplier(bd.left, h, a0, -1)
    rr0, rr1 = _multiplier(bd.right, h, b0, +1)
    seed = ScalarSpline((a0, b0), (rl0, rr0), (rl1, rr1))
    gL = bd.left._eval(np.array([a0]), 0)[0]
    gR = bd.right._eval(np.array([b0]), 0)[0]
    base = PrimitiveCurve(h, seed, a0, gL, (a0, b0))
    defect = gR - base._eval(np.array([b0]), 0)[0]
    basis = correction_basis(h, centers, w)
    cond = basis.condition
    if not np.isfinite(cond) or cond >= GRAM_COND_MAX:
        raise _GramDegenerate(cond)
    coef = np.linalg.solve(basis.gram, defect)
    rho = seed.with_bumps([(c, w, k) for c, k in zip(centers, coef)])
    mid = PrimitiveCurve(h, rho, a0, gL, (a0, b0))
    miss = float(np.hypot(*(mid._eval(np.array([b0]), 0)[0] - gR)))
    if miss > 1e-9 * max(1.0, float(np.hypot(*gR))):
        raise NumericalError("endpoint defect not absorbed", defect=miss)
    return mid


def _ramp_spend(h, xs: ScalarSpline, lo, hi):
    br = list(_interior_breaks([h], lo, hi)) + list(xs.breaks())
    br = [v for v in br if lo < v < hi]
    cum = nx.CumulativeIntegral(
        lambda s: np.stack([theta_d(h, s) * xs(s), np.abs(theta_d(h, s) * xs(s))], axis=1), lo, hi, lo, breaks=br
    )
    signed, absolute = cum(np.array([hi]))[0]
    return float(signed), float(absolute)


def _plan_frame(h: ProfileCurve, bd: BoundaryData):
    a0, b0 = bd.spans(h)
    a, b = h.interval
    xl0, yl0, xl1 = (float(v[0]) for v in frame_coords(bd.left, h, np.array([a0])))
    xr0, yr0, xr1 = (float(v[0]) for v in frame_coords(bd.right, h, np.array([b0])))
    wl = wr = min(0.1 * (b - a), (b0 - a0) / 4)
    for _ in range(40):
        xs = ScalarSpline((a0, a0 + wl, b0 - wr, b0), (xl0, 0.0, 0.0, xr0), (xl1, 0.0, 0.0, xr1))
        _, absl = _ramp_spend(h, xs, a0, a0 + wl)
        _, absr = _ramp_spend(h, xs, b0 - wr, b0)
        if absl <= 0.25 * yl0 and absr <= 0.25 * yr0:
            break
        if absl > 0.25 * yl0:
            wl *= 0.5
        if absr > 0.25 * yr0:
            wr *= 0.5
    else:
        raise ConstructionError("frame ramps cannot be made short enough")
    lo, hi = a0 + wl, b0 - wr
    r = np.linspace(lo, hi, 513)
    th = theta_d(h, r)
    i = int(np.argmax(np.abs(th)))
    peak = abs(float(th[i]))
    if peak < 1e-12:
        raise NotSynthesizableError("slope of h is constant between the germs")
    good = (np.sign(th) == np.sign(th[i])) & (np.abs(th) >= 0.5 * peak)
    j0 = j1 = i
    while j0 > 0 and good[j0 - 1]:
        j0 -= 1
    while j1 < len(r) - 1 and good[j1 + 1]:
        j1 += 1
    if j1 == j0:
        j0, j1 = max(i - 1, 0), min(i + 1, len(r) - 1)
    c, hw = 0.5 * (r[j0] + r[j1]), 0.5 * (r[j1] - r[j0])
    return _Plan("frame", (wl, wr, float(c), float(hw)))


def _solve_frame(h: ProfileCurve, bd: BoundaryData, plan: _Plan):
    a0, b0 = bd.spans(h)
    wl, wr, c, hw = plan.data
    xl0, yl0, xl1 = (float(v[0]) for v in frame_coords(bd.left, h, np.array([a0])))
    xr0, yr0, xr1 = (float(v[0]) for v in frame_coords(bd.right, h, np.array([b0])))
    xs = ScalarSpline((a0, a0 + wl, b0 - wr, b0), (xl0, 0.0, 0.0, xr0), (xl1, 0.0, 0.0, xr1))
    # y(b0) is affine in the bump coefficient; measure it with the curve's own
    # quadrature so the endpoint level is matched to rounding
    end = np.array([b0])
    y_0 = float(FrameCurve(h, xs, a0, yl0, (a0, b0)).y(end)[0])
    y_1 = float(FrameCurve(h, xs.with_bumps([(c, hw, 1.0)]), a0, yl0, (a0, b0)).y(end)[0])
    if abs(y_1 - y_0) < 1e-300:
        raise _GramDegenerate(math.inf)
    coef = (yr0 - y_0) / (y_1 - y_0)
    mid = FrameCurve(h, xs.with_bumps([(c, hw, coef)]), a0, yl0, (a0, b0))
    miss = abs(float(mid.y(np.array([b0]))[0]) - yr0)
    if miss > 1e-9 * max(1.0, abs(yr0)):
        raise NumericalError("frame endpoint level not matched", defect=miss)
    return mid


def _glue(h: ProfileCurve, bd: BoundaryData, mid: ProfileCurve) -> ProfileCurve:
    a, b = h.interval
    a0, b0 = bd.spans(h)
    return GluedCurve([((a, a0), bd.left), ((a0, b0), mid), ((b0, b), bd.right)])


def _positive(h: ProfileCurve, mid: ProfileCurve) -> bool:
    r = mid.grid(513)
    return bool(np.min(pairing(mid._eval(r, 0), h._eval(r, 1))) > 0)


def _solve_plan(h: ProfileCurve, bd: BoundaryData, plan: _Plan) -> ProfileCurve:
    if plan.kind == "primitive":
        centers, w = plan.data
        mid = _solve_primitive(h, bd, centers, w)
    else:
        mid = _solve_frame(h, bd, plan)
    if not _positive(h, mid):
        raise _NotPositive()
    return _glue(h, bd, mid)


def _synthesize(h: ProfileCurve, bd: BoundaryData):
    a0, b0 = bd.spans(h)
    bd.check(h)
    if slope_variation(h, a0, b0) < SLOPE_VARIATION_MIN:
        raise NotSynthesizableError("slope of h is constant on the interior", interval=[a0, b0])
    plan = None
    for centers, w in correction_candidates(h, a0, b0):
        cand = _Plan("primitive", (centers, w))
        try:
            g = _solve_plan(h, bd, cand)
            return g, cand
        except _GramDegenerate:
            continue
        except _NotPositive:
            break
    plan = _plan_frame(h, bd)
    try:
        return _solve_plan(h, bd, plan), plan
    except (_GramDegenerate, _NotPositive) as exc:
        raise ConstructionError("boundary value synthesis failed its positivity re-check") from exc


def boundary_value_stabilizer(h: ProfileCurve, bd: BoundaryData) -> ProfileCurve:
    """Stabilizer agreeing with the germs of ``bd``; g' = rho h' with rho
    seeded by the boundary multipliers and corrected by two bumps, or a
    frame construction when the corrected primitive loses positivity."""
    g, _ = _synthesize(h, bd)
    rep = verify(ShsPair(h, g))
    if not rep["ok"]:
        raise ConstructionError("synthesized stabilizer does not verify", **rep)
    return g


# --------------------------------------------------------------------------
# families


def _pou(grid: np.ndarray, t: float):
    """Normalized C^2 bumps centered at the grid points, support = neighbours."""
    if len(grid) == 1:
        return [(0, 1.0)]
    dt = grid[1] - grid[0]
    w = bump(np.full(len(grid), t), grid, dt)
    idx = np.nonzero(w > 0)[0]
    tot = float(np.sum(w[idx]))
    return [(int(i), float(w[i] / tot)) for i in idx]


def stabilized_family(hs, bds, t_interval=(0.0, 1.0), n_grid: int = HOMOTOPY_SAMPLES):
    """Callable t -> g_t stabilizing h_t rel the germs bd_t.

    Solves on a uniform grid of ``n_grid`` times fix a construction plan
    per window (the grid point and its neighbours); at any t the window
    solutions are blended by a partition of unity."""
    t0, t1 = (float(x) for x in t_interval)
    grid = np.linspace(t0, t1, n_grid)

    def solve(t):
        try:
            return _synthesize(hs(t), bds(t))[1]
        except (StabilizationError, ConstructionError, NumericalError) as exc:
            raise StabilizationError(f"per-time solve failed at t={t!r}", t=float(t), cause=str(exc)) from exc

    plans = nx.parallel_map(solve, grid)

    def works(plan, j):
        h, bd = hs(float(grid[j])), bds(float(grid[j]))
        try:
            _solve_plan(h, bd, plan)
            return True
        except (_GramDegenerate, _NotPositive, NumericalError, ConstructionError):
            return False

    def settle(i):
        """A plan valid on the whole window of grid point i."""
        window = [j for j in (i - 1, i, i + 1) if 0 <= j < len(grid)]
        cands = [plans[i]]
        if plans[i].kind != "frame":
            try:
                cands.append(_plan_frame(hs(float(grid[i])), bds(float(grid[i]))))
            except (StabilizationError, ConstructionError):
                pass
        cands += [plans[j] for j in window if j != i]
        for plan in cands:
            if all(works(plan, j) for j in window if j != i) and (plan is plans[i] or works(plan, i)):
                return plan
        raise StabilizationError(f"no construction plan covers the window at t={float(grid[i])!r}", t=float(grid[i]))

    plans = nx.parallel_map(settle, range(len(grid)))

    def g_at(t: float) -> ProfileCurve:
        h, bd = hs(float(t)), bds(float(t))
        parts = []
        for i, wgt in _pou(grid, float(t)):
            try:
                parts.append((wgt, _solve_plan(h, bd, plans[i])))
            except (_GramDegenerate, _NotPositive, NumericalError) as exc:
                raise StabilizationError(f"window solve failed at t={float(t)!r}", t=float(t)) from exc
        return parts[0][1] if len(parts) == 1 else CombinationCurve(parts)

    return g_at


def stabilize_homotopy(hs, bds, times=None, t_interval=(0.0, 1.0), n_grid: int = HOMOTOPY_SAMPLES):
    """Stabilize t -> h_t rel boundary germs t -> bd_t (callables of t).
    Returns a list of (t, g_t), by default on the solve grid."""
    g_at = stabilized_family(hs, bds, t_interval, n_grid)
    t0, t1 = (float(x) for x in t_interval)
    times = np.linspace(t0, t1, n_grid) if times is None else np.asarray(times, dtype=float)
    out = []
    for t in times:
        g = g_at(float(t))
        rep = verify(ShsPair(hs(float(t)), g))
        if not rep["ok"]:
            raise StabilizationError(f"stabilized family fails at t={float(t)!r}", t=float(t), **rep)
        out.append((float(t), g))
    return out


class _Lift:
    """Exact angle of h'/|h'| at arbitrary r, continued from a node lift."""

    def __init__(self, h: ProfileCurve, lo: float, hi: float, seed: np.ndarray):
        self.h = h
        self.base = lift_vector_field(lambda s: unit_tangent(h, s)[0], lo, hi, seed)

    def __call__(self, r):
        ref = self.base(r)
        k, _ = unit_tangent(self.h, r)
        raw = np.arctan2(k[:, 1], k[:, 0])
        return ref + nx.wrap_angle(raw - ref)


def _same_curve(h0: ProfileCurve, h1: ProfileCurve, lo: float, hi: float, tol: float = 1e-9) -> bool:
    r = np.linspace(lo, hi, 257)
    for order in (0, 1):
        u, v = h0._eval(r, order), h1._eval(r, order)
        if np.max(np.abs(u - v)) > tol * max(1.0, float(np.max(np.abs(u)))):
            return False
    return True


def regular_homotopy_family(h0: ProfileCurve, h1: ProfileCurve, eps: float, attempt: int = 0, nodes: int = 513):
    """t -> h_t rel the eps-germs: polar interpolation of h' plus a bump
    closing the endpoint gap and, for attempt > 0, an interior angle twist
    t(1-t) eta psi(r) that keeps the slope nonconstant."""
    a, b = h0.interval
    a0, b0 = a + eps, b - eps
    seed = np.unique(np.concatenate([np.linspace(a0, b0, nodes), _interior_breaks([h0, h1], a0, b0)]))
    L0 = _Lift(h0, a0, b0, seed)
    L1 = _Lift(h1, a0, b0, seed)
    ends = np.array([a0, b0])
    shift = L0(ends)[0] - L1(ends)[0]
    gap = L1(ends)[1] + shift - L0(ends)[1]
    if abs(gap) > 1e-6:
        raise ObstructionError("turning numbers differ: no regular homotopy rel boundary", gap_turns=gap / (2 * math.pi))
    mid, half = 0.5 * (a0 + b0), 0.5 * (b0 - a0)
    widths = (1.0, 0.6, 0.35, 0.8, 0.5, 0.25, 0.9, 0.45)
    offs = (0.0, 0.0, 0.0, -0.2, 0.3, 0.0, 0.0, -0.2)
    wphi = widths[attempt % 8] * half
    cphi = mid + offs[attempt % 8] * half
    eta = 0.0 if attempt == 0 else 0.05 * attempt
    norm_phi = 16.0 / 35.0 * 2 * wphi  # integral of (1-u^2)^3 over [-w, w]
    delta = h0._eval(ends, 0)
    target = delta[1] - delta[0]

    def raw(t):
        def dfn(r):
            r = np.atleast_1d(r)
            s = (1 - t) * np.hypot(*h0._eval(r, 1).T) + t * np.hypot(*h1._eval(r, 1).T)
            sig = (1 - t) * L0(r) + t * (L1(r) + shift) + eta * t * (1 - t) * bump(r, mid, 0.8 * half)
            return s[:, None] * np.stack([np.cos(sig), np.sin(sig)], axis=1)

        return dfn

    def family(t: float) -> ProfileCurve:
        if t == 0.0:
            return h0
        if t == 1.0:
            return h1
        d0 = raw(t)
        br = list(seed) + [cphi - wphi, cphi, cphi + wphi]
        total = nx.CumulativeIntegral(d0, a0, b0, a0, breaks=br)(np.array([b0]))[0]
        v = (target - total) / norm_phi

        def dfn(r):
            r = np.atleast_1d(r)
            return d0(r) + bump(r, cphi, wphi)[:, None] * v[None, :]

        ns = np.unique(np.concatenate([seed, [cphi - wphi, cphi, cphi + wphi]]))
        ns = ns[(ns >= a0) & (ns <= b0)]
        cum = nx.CumulativeIntegral(dfn, a0, b0, a0, breaks=ns)
        vals = delta[0][None, :] + cum(ns)
        vals[0], vals[-1] = delta[0], delta[1]
        herm = HermiteCurve(ns, vals, dfn(ns), eta=0.0, check=False)
        return GluedCurve([((a, a0), h0), ((a0, b0), herm), ((b0, b), h1)], eta=min(h0.eta, h1.eta))

    return family


def connect_same_winding(h0: ProfileCurve, h1: ProfileCurve, g0: BoundaryData, n: int = HOMOTOPY_SAMPLES):
    """Stable homotopy (h_t, g_t) from h0 to h1 rel the germs of g0."""
    from .homotopy import StableHomotopy

    a, b = h0.interval
    a0, b0 = g0.spans(h0)
    if not (_same_curve(h0, h1, a, a0) and _same_curve(h0, h1, b0, b)):
        raise PreconditionError("h0 and h1 must agree on the boundary germs")
    w0, w1 = winding(h0), winding(h1)
    if abs(w0 - w1) > 1e-6:
        raise ObstructionError("winding numbers differ", winding_h0=w0, winding_h1=w1)
    ts = np.linspace(0.0, 1.0, n)
    if _same_curve(h0, h1, a, b):
        g = boundary_value_stabilizer(h0, g0)
        return StableHomotopy(ts, [ShsPair(h0, g)] * n)
    last = None
    for attempt in range(CONNECT_ATTEMPTS):
        try:
            fam = regular_homotopy_family(h0, h1, g0.eps, attempt)
            hts = {float(t): fam(float(t)) for t in ts}
            for t, ht in hts.items():
                check_immersion(ht)
                if slope_variation(ht, a0, b0) < SLOPE_VARIATION_MIN:
                    raise NotSynthesizableError("slope constant along the family", t=t)
            def h_at(t, fam=fam, hts=hts):
                t = float(t)
                return hts[t] if t in hts else fam(t)

            g_at = stabilized_family(h_at, lambda t: g0, (0.0, 1.0), n)
            pairs = []
            for t in ts:
                p = ShsPair(hts[float(t)], g_at(float(t)))
                rep = verify(p)
                if not rep["ok"]:
                    raise StabilizationError(f"stabilized family fails at t={float(t)!r}", t=float(t), **rep)
                pairs.append(p)
            return StableHomotopy(ts, pairs, family=lambda t, h_at=h_at, g_at=g_at: ShsPair(h_at(t), g_at(t)))
        except ObstructionError:
            raise
        except (StabilizationError, ConstructionError, NumericalError, DomainError, ValueError) as exc:
            last = exc
    raise ConstructionError(f"no stabilizable regular homotopy after {CONNECT_ATTEMPTS} attempts", cause=str(last))
