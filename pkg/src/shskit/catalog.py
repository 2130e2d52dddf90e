"""Named constructions and the classification of T^2-invariant stable
Hamiltonian structures on T^3 and S^3 by binding signs and winding number.

Orientation of the S^3 model: the theta-circle collapses at r = a (where
h' vanishes to first order) and the phi-circle at r = b. The canonical
germs are positive multiples of (s0 r^2, s1 (1 - r^2)), whose tangent
points along (s0, -s1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics as nx
from .curve import (
    ProfileCurve,
    SpecialStabilizer,
    constant,
    contact_sign,
    hermite_from_derivative,
    hermite_from_function,
    lift_vector_field,
    pairing,
    poly,
    standard,
    twist_report,
    unit_tangent,
    winding,
    CircleCurve,
)
from .errors import ConstructionError, DomainError, ParameterError, PreconditionError
from .shs import ShsPair, closed_orbit, proportionality, verify

MANIFOLDS = ("S3", "T3")
STANDARD_EPS = 0.05
WINDING_TOL = 1e-6
WITNESS_SAMPLES = 33
_NODES = 1025


def _manifold(m: str) -> str:
    m = str(m).upper()
    if m not in MANIFOLDS:
        raise ParameterError(f"manifold must be one of {', '.join(MANIFOLDS)}", manifold=m)
    return m


def _sign(x: float) -> str:
    return "+" if x > 0 else "-"


def _sval(s) -> int:
    if s in ("+", 1, "1", "+1"):
        return 1
    if s in ("-", -1, "-1"):
        return -1
    raise ParameterError("sign must be '+' or '-'", sign=s)


def _pv(x: float) -> float:
    return float(nx.wrap_angle(np.array([x]))[0])


# --------------------------------------------------------------------------
# invariants


@dataclass(frozen=True)
class ClassInvariant:
    manifold: str
    s0: str | None
    s1: str | None
    w: float

    def same(self, other: "ClassInvariant", tol: float = WINDING_TOL) -> bool:
        return (
            self.manifold == other.manifold
            and self.s0 == other.s0
            and self.s1 == other.s1
            and abs(self.w - other.w) <= tol
        )

    def to_json(self) -> dict:
        return {"manifold": self.manifold, "s0": self.s0, "s1": self.s1, "w": self.w}


def binding_signs(h: ProfileCurve, rtol: float = 1e-7) -> tuple:
    """(s0, s1) from lim h1'(r)/(r - a) and -h2'(b); raises if the ends are
    not binding compatible."""
    a, b = h.interval
    grid = h.grid(513)
    scale = float(np.max(np.hypot(*h._eval(grid, 1).T)))
    ends = h._eval(np.array([a, b]), 1)
    if math.hypot(*ends[0]) > rtol * scale:
        raise PreconditionError("h' must vanish at r = a (binding end)", dh=[float(v) for v in ends[0]])
    d = 1e-4 * (b - a)
    q = h._eval(np.array([a + d, a + 0.5 * d]), 1) / np.array([[d], [0.5 * d]])
    lim = q[1]
    if abs(lim[0]) <= rtol * scale / (b - a) or np.max(np.abs(q[0] - q[1])) > 0.05 * math.hypot(*lim):
        raise PreconditionError("h1'(r)/(r - a) has no finite nonzero limit at r = a", estimate=[float(v) for v in q[1]])
    if abs(ends[1][1]) <= rtol * scale:
        raise PreconditionError("h2' vanishes at r = b; sign s1 undefined")
    return _sign(lim[0]), _sign(-ends[1][1])


def s3_winding(h: ProfileCurve, s0: str, s1: str, eps: float = STANDARD_EPS) -> float:
    """Turning of h' after replacing [a, a+eps] and [b-eps, b] by the
    canonical germs; the end corrections are shortest rotations inside the
    half-planes {s0 x > 0} and {-s1 y > 0}."""
    a, b = h.interval
    lo, hi = a + eps * (b - a), b - eps * (b - a)
    if not lo < hi:
        raise ParameterError("eps too large", eps=eps)
    p0, p1 = _sval(s0), _sval(s1)
    for r0, r1, comp, sg in ((a, lo, 0, p0), (hi, b, 1, -p1)):
        r = np.linspace(r0, r1, 65)[1:] if r0 == a else np.linspace(r0, r1, 65)
        if np.any(sg * h._eval(r, 1)[:, comp] <= 0):
            raise PreconditionError("end direction leaves its half-plane: ends not standardizable", eps=eps)
    psi = math.atan2(-p1, p0)
    seed = np.linspace(lo, hi, 513)
    lift = lift_vector_field(lambda s: unit_tangent(h, s)[0], lo, hi, seed)
    s_lo, s_hi = float(lift.sigma[0]), float(lift.sigma[-1])
    total = _pv(s_lo - psi) + (s_hi - s_lo) + _pv(psi - s_hi)
    return total / (2 * math.pi)


def classify(pair: ShsPair, manifold: str = "S3", eps: float = STANDARD_EPS) -> ClassInvariant:
    m = _manifold(manifold)
    h = pair.h
    if m == "S3":
        s0, s1 = binding_signs(h)
        return ClassInvariant("S3", s0, s1, s3_winding(h, s0, s1, eps))
    a, b = h.interval
    grid = h.grid(513)
    scale = float(np.max(np.hypot(*h._eval(grid, 1).T)))
    e = h._eval(np.array([a, b]), 1)
    if math.hypot(*(e[0] - e[1])) > 1e-7 * scale:
        raise PreconditionError("h' is not periodic: not a structure on T^3", dh_a=list(map(float, e[0])), dh_b=list(map(float, e[1])))
    gv = pair.g._eval(np.array([a, b]), 0)
    gs = max(float(np.max(np.hypot(*pair.g._eval(grid, 0).T))), 1e-300)
    if math.hypot(*(gv[0] - gv[1])) > 1e-7 * gs:
        raise PreconditionError("g is not periodic: not a structure on T^3")
    w = winding(h)
    if abs(w - round(w)) > WINDING_TOL:
        raise ConstructionError("periodic h' with non-integer turning", w=w)
    return ClassInvariant("T3", None, None, w)


# --------------------------------------------------------------------------
# homotopy witnesses


@dataclass(frozen=True)
class HomotopyAnswer:
    homotopic: bool
    reason: str | None
    invariants: tuple
    witness: object = None

    def to_json(self) -> dict:
        out = {
            "homotopic": self.homotopic,
            "reason": self.reason,
            "invariants": [inv.to_json() for inv in self.invariants],
        }
        if self.witness is not None:
            out["samples"] = len(self.witness)
        return out


class _Polar:
    """Speed and continuous angle of h' at arbitrary r."""

    def __init__(self, h: ProfileCurve, seed: np.ndarray):
        a, b = h.interval
        self.h = h
        self.base = lift_vector_field(lambda s: unit_tangent(h, s)[0], a, b, seed)
        self._memo = {}

    def __call__(self, r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        key = r.tobytes()
        got = self._memo.get(key)
        if got is None:
            k, speed = unit_tangent(self.h, r)
            ref = self.base(r)
            got = (speed, ref + nx.wrap_angle(np.arctan2(k[:, 1], k[:, 0]) - ref))
            if len(self._memo) < 64:
                self._memo[key] = got
        return got


def polar_family(h0: ProfileCurve, h1: ProfileCurve, nodes: int = _NODES):
    """u -> h_u with |h_u'| and arg h_u' interpolated linearly between h0
    and h1. The lifts are anchored at r = a so that the end directions
    stay within pi of each other; the caller checks the r = b end."""
    a, b = h0.interval
    seed = np.unique(np.concatenate([np.linspace(a, b, nodes), h0.breaks(), h1.breaks()]))
    seed = seed[(seed >= a) & (seed <= b)]
    P0, P1 = _Polar(h0, seed), _Polar(h1, seed)
    ends = np.array([a, b])
    s0, s1 = P0(ends)[1], P1(ends)[1]
    shift = -2 * math.pi * round((s1[0] - s0[0]) / (2 * math.pi))
    gap = abs(s1[1] + shift - s0[1])
    start0, start1 = h0._eval(ends[:1], 0)[0], h1._eval(ends[:1], 0)[0]

    def family(u: float) -> ProfileCurve:
        if u == 0.0:
            return h0
        if u == 1.0:
            return h1

        def dfn(r):
            sp0, a0 = P0(r)
            sp1, a1 = P1(r)
            sp = (1 - u) * sp0 + u * sp1
            ang = (1 - u) * a0 + u * (a1 + shift)
            return sp[:, None] * np.stack([np.cos(ang), np.sin(ang)], axis=1)

        return hermite_from_derivative(dfn, seed, (1 - u) * start0 + u * start1, eta=0.0)

    return family, gap


def homotopy_witness(a: ShsPair, b: ShsPair, manifold: str, n: int = WITNESS_SAMPLES):
    """Stable homotopy from a to b: g moves linearly to the special
    stabilizer, h' is interpolated in polar form, g moves back."""
    from .homotopy import StableHomotopy, verify_homotopy

    if n < 4:
        raise ParameterError("a witness needs at least 4 samples", n=n)
    if max(abs(x - y) for x, y in zip(a.interval, b.interval)) > 1e-12:
        raise DomainError("pairs live on different r-intervals")
    fam, gap = polar_family(a.h, b.h)
    if gap >= math.pi:
        raise ConstructionError("end directions differ by pi or more despite equal invariants", gap=gap)
    m = n - 2
    us = np.linspace(0.0, 1.0, m)
    exempt = max(a.boundary_exempt, b.boundary_exempt)
    tol = max(a.verify_tol, b.verify_tol)
    mid = []
    for u in us:
        h = fam(float(u))
        mid.append(ShsPair(h, SpecialStabilizer(h, 1.0), tol, exempt))
    pairs = [a] + mid + [b]
    modes = ["linear"] + ["special"] * (m - 1) + ["linear"]
    gamma = StableHomotopy(np.linspace(0.0, 1.0, n), pairs, modes, check=False)
    rep = verify_homotopy(gamma)
    if not rep["ok"]:
        raise ConstructionError(
            "witness fails verification although the invariants agree", manifold=manifold, failing_t=rep["failing_t"][:5]
        )
    return gamma


def is_homotopic(a: ShsPair, b: ShsPair, manifold: str = "S3", n: int = WITNESS_SAMPLES) -> HomotopyAnswer:
    m = _manifold(manifold)
    ia, ib = classify(a, m), classify(b, m)
    if not ia.same(ib):
        if ia.s0 != ib.s0 or ia.s1 != ib.s1:
            reason = f"binding signs differ: ({ia.s0},{ia.s1}) vs ({ib.s0},{ib.s1})"
        else:
            reason = f"winding numbers differ: {ia.w:.6g} vs {ib.w:.6g}"
        return HomotopyAnswer(False, reason, (ia, ib))
    for p in (a, b):
        rep = verify(p)
        if not rep["ok"]:
            raise PreconditionError("input pair does not verify", **rep)
    return HomotopyAnswer(True, None, (ia, ib), homotopy_witness(a, b, m, n))


# --------------------------------------------------------------------------
# named constructions


def _require(cond: bool, what: str, **details) -> None:
    if not cond:
        raise ConstructionError(f"construction re-check failed: {what}", **details)


def _verified(pair: ShsPair) -> ShsPair:
    rep = verify(pair)
    _require(rep["ok"], "pair does not verify", **rep)
    return pair


def standard_contact() -> ShsPair:
    h = standard()
    pair = _verified(ShsPair(h, h))
    prop = proportionality(pair)
    _require(prop["constant"] and abs(prop["min"] - 1) < 1e-9, "f = 1", **prop)
    return pair


def twist_curve(eps: float = 0.1, r0: float = 0.9, overshoot: float = 0.1, drift: float = 0.1) -> ProfileCurve:
    """Unit-speed curve on [0, 1] whose slope lift drops by (1+overshoot) 2 pi
    on [eps, m] and climbs back on [m, r0], m the midpoint; the linear
    drift keeps the lift nowhere constant."""
    if not 0 < eps < r0 <= 1:
        raise ParameterError("need 0 < eps < r0 <= 1", eps=eps, r0=r0)
    if not (overshoot >= 0 and drift > 0):
        raise ParameterError("overshoot >= 0 and drift > 0 required")
    m = 0.5 * (eps + r0)
    amp = 2 * math.pi * (1 + overshoot)
    w1, w2 = m - eps, r0 - m

    def sigma(r):
        return -math.pi / 4 + drift * r - amp * nx.smoothstep((r - eps) / w1) + amp * nx.smoothstep((r - m) / w2)

    def dfn(r):
        s = sigma(np.atleast_1d(r))
        return np.stack([np.cos(s), np.sin(s)], axis=1)

    nodes = np.unique(np.concatenate([np.linspace(0.0, 1.0, _NODES), [eps, m, r0]]))
    return hermite_from_derivative(dfn, nodes, (0.5, 0.5))


def twist(eps: float = 0.1, r0: float = 0.9, window: float = 0.01) -> ShsPair:
    h = twist_curve(eps, r0)
    pair = _verified(ShsPair(h, SpecialStabilizer(h, 1.0)))
    rep = twist_report(h, window)
    _require(rep["twists"] and rep["nowhere_constant"], "slope twists and is nowhere constant", **rep)
    return pair


def overtwisted(r_star: float = 0.6, r1: float = 0.8) -> ShsPair:
    """h = (sin psi, cos psi), psi = pi r^2 / r*^2: contact on (0, 1],
    h1(r*) = 0 and h2(r*) = -1."""
    if not 0 < r_star <= r1 <= 1:
        raise ParameterError("need 0 < r* <= r1 <= 1", r_star=r_star, r1=r1)
    k = math.pi / (r_star * r_star)

    def fn(r):
        p = k * r * r
        return np.stack([np.sin(p), np.cos(p)], axis=1)

    def dfn(r):
        p = k * r * r
        return (2 * k * r)[:, None] * np.stack([np.cos(p), -np.sin(p)], axis=1)

    nodes = np.unique(np.concatenate([np.linspace(0.0, 1.0, _NODES), [r_star, r1]]))
    h = hermite_from_function(fn, dfn, nodes)
    pair = _verified(ShsPair(h, h))
    at = h._eval(np.array([r_star]), 0)[0]
    _require(abs(at[0]) < 1e-12 and at[1] < 0, "h1(r*) = 0 and h2(r*) < 0", h=[float(v) for v in at])
    r = np.linspace(0.0, r1, 2049)[1:]
    c = pairing(h._eval(r, 0), h._eval(r, 1))
    _require(bool(np.all(c > 0)), "h1' h2 - h2' h1 > 0 on (0, r1]", min=float(np.min(c)))
    return pair


def nontame(r_star: float = 0.5) -> ShsPair:
    """h = (r - r*, (r - r*)^2): h(r*) = 0 and h'(r*) = (1, 0) is rational."""
    if not 0 < r_star < 1:
        raise ParameterError("need 0 < r* < 1", r_star=r_star)
    h = poly((0.0, 1.0), [-r_star, 1.0], [r_star * r_star, -2 * r_star, 1.0])
    pair = _verified(ShsPair(h, SpecialStabilizer(h, 1.0)))
    orb = closed_orbit(pair, r_star)
    _require(abs(orb.E_omega) < 1e-9, "E_omega = 0 on the torus r = r*", E_omega=orb.E_omega)
    return pair


def s3_canonical_curve(s0="+", s1="+", w: int = 0, rho: float = 0.3) -> ProfileCurve:
    """(s0 r^2, s1 (1 - r^2)) plus w curls of size rho on [0.2, 0.8]."""
    p0, p1 = _sval(s0), _sval(s1)
    if int(w) != w:
        raise ParameterError("w must be an integer", w=w)
    w = int(w)
    if w == 0:
        return poly((0.0, 1.0), [0.0, 0.0, p0], [p1, 0.0, -p1])
    u = complex(p0, -p1) / math.sqrt(2)
    sg = 1 if w > 0 else -1
    lo, width = 0.2, 0.6

    def theta(r, order):
        x = (r - lo) / width
        if order == 0:
            return 2 * math.pi * w * nx.smoothstep(x)
        return 2 * math.pi * w * nx.smoothstep_d(x) / width

    def fn(r):
        z = u * (-1j * sg) * (np.exp(1j * theta(r, 0)) - 1) * rho
        return np.stack([p0 * r * r + z.real, p1 * (1 - r * r) + z.imag], axis=1)

    def dfn(r):
        z = u * np.abs(theta(r, 1)) * rho * np.exp(1j * theta(r, 0))
        return np.stack([2 * p0 * r + z.real, -2 * p1 * r + z.imag], axis=1)

    return hermite_from_function(fn, dfn, np.linspace(0.0, 1.0, 2 * _NODES - 1))


def s3_canonical(s0="+", s1="+", w: int = 0) -> ShsPair:
    h = s3_canonical_curve(s0, s1, w)
    r = h.grid(8193)[1:]
    sp = np.hypot(*h._eval(r, 1).T)
    _require(float(np.min(sp / r)) > 1e-3, "canonical curve is an immersion", min_speed=float(np.min(sp)))
    pair = _verified(ShsPair(h, SpecialStabilizer(h, 1.0)))
    inv = classify(pair, "S3")
    _require(
        inv.s0 == _sign(_sval(s0)) and inv.s1 == _sign(_sval(s1)) and abs(inv.w - w) < WINDING_TOL,
        "invariants of the canonical model",
        got=inv.to_json(),
    )
    return pair


def t3_canonical(w: int = 0) -> ShsPair:
    if int(w) != w:
        raise ParameterError("w must be an integer", w=w)
    w = int(w)
    if w == 0:
        h = poly((0.0, 1.0), [0.0, 1.0], [0.0])
        pair = ShsPair(h, constant((0.0, 1.0), (0.0, 1.0)))
    else:
        h = CircleCurve((0.0, 1.0), radius=1.0 / (2 * math.pi * abs(w)), turns=w, phase=-math.pi / 2)
        pair = ShsPair(h, SpecialStabilizer(h, 1.0))
    _verified(pair)
    inv = classify(pair, "T3")
    _require(abs(inv.w - w) < WINDING_TOL, "turning number", w=inv.w)
    return pair


def exotic() -> ShsPair:
    """End curve of the stored monotone path with its special stabilizer."""
    from .monotone import exotic_curve

    h = exotic_curve()
    return _verified(ShsPair(h, SpecialStabilizer(h, 1.0)))


NAMES = {
    "standard_contact": standard_contact,
    "twist": twist,
    "overtwisted": overtwisted,
    "nontame": nontame,
    "s3_canonical": s3_canonical,
    "t3_canonical": t3_canonical,
    "exotic": exotic,
}


def make_named(name: str, **params) -> ShsPair:
    if name not in NAMES:
        raise ParameterError(f"unknown catalog entry {name!r}", known=sorted(NAMES))
    try:
        return NAMES[name](**params)
    except TypeError as exc:
        raise ParameterError(f"bad parameters for {name}: {exc}") from exc


__all__ = [
    "ClassInvariant",
    "HomotopyAnswer",
    "classify",
    "is_homotopic",
    "homotopy_witness",
    "polar_family",
    "make_named",
    "binding_signs",
    "s3_winding",
    "twist_curve",
    "s3_canonical_curve",
    "NAMES",
    "contact_sign",
]
