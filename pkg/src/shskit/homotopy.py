"""Stable homotopies t -> (h_t, g_t), their length and short-homotopy cobordisms.

With alpha_h = h1 dtheta + h2 dphi, omega_t = d alpha_{h_t} and
lambda_t = alpha_{g_t}; mu_t = alpha_{h_t} - alpha_{h_a} so mu-dot = alpha_{h-dot}.
On the Reeb field R_t,
    lambda-dot(R) = <g-dot, ih'>/<g, ih'>,   mu-dot(R) = <h-dot, ih'>/<g, ih'>.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .curve import ProfileCurve, SpecialStabilizer, combine, dot, pairing, rot
from .errors import (
    ConstructionError,
    DegenerateHomotopyError,
    DomainError,
    MalformedInputError,
    ParameterError,
    StabilizationError,
    TooLongError,
)
from .shs import ShsPair, delta_bounds, verify

MODES = ("linear", "special")
DENSITY_GRID = (65, 257)
MAX_PIECES = 2**16
DELTA_FLOOR = 1e-12
_FD_DT = 1e-5


def _is_special(g: ProfileCurve) -> bool:
    return isinstance(g, SpecialStabilizer)


class StableHomotopy:
    """Samples (t_j, pair_j) with a per-segment interpolation rule.

    ``linear``: h and g interpolate linearly. ``special``: h interpolates
    linearly and g_t = c_t i h_t'/|h_t'| with c_t linear, exact for all t.
    An optional ``family`` callable t -> ShsPair overrides both between
    samples (used for families built from per-time solves).
    """

    def __init__(self, ts, pairs, modes=None, family=None, check: bool = True):
        ts = [float(t) for t in ts]
        pairs = list(pairs)
        if len(ts) != len(pairs) or len(ts) < 2:
            raise ParameterError("a homotopy needs at least two samples with one pair each")
        if any(t1 <= t0 for t0, t1 in zip(ts[:-1], ts[1:])):
            raise ParameterError("sample times must increase strictly")
        iv = pairs[0].interval
        for p in pairs[1:]:
            if max(abs(p.interval[0] - iv[0]), abs(p.interval[1] - iv[1])) > 1e-12:
                raise DomainError("samples must share one r-interval")
        modes = ["linear"] * (len(ts) - 1) if modes is None else list(modes)
        if len(modes) != len(ts) - 1 or any(m not in MODES for m in modes):
            raise ParameterError("one interpolation mode per segment, from " + ", ".join(MODES))
        for j, m in enumerate(modes):
            if m == "special" and not (_is_special(pairs[j].g) and _is_special(pairs[j + 1].g)):
                raise ParameterError("special segments need special stabilizers at both ends", segment=j)
        self.ts = np.asarray(ts)
        self.pairs = pairs
        self.modes = modes
        self.family = family
        self._origin = None
        self._cache = {}
        if check:
            for t, p in zip(ts, pairs):
                rep = verify(p)
                if not rep["ok"]:
                    raise StabilizationError(f"sample at t={t!r} does not verify", t=t, **rep)

    # -- basic data -------------------------------------------------------
    @property
    def interval(self):
        return (float(self.ts[0]), float(self.ts[-1]))

    @property
    def r_interval(self):
        return self.pairs[0].interval

    def __len__(self):
        return len(self.ts)

    def _segment(self, t: float) -> int:
        j = int(np.searchsorted(self.ts, t, side="right")) - 1
        return min(max(j, 0), len(self.ts) - 2)

    def pair_at(self, t: float) -> ShsPair:
        a, b = self.interval
        if not a - 1e-12 <= t <= b + 1e-12:
            raise DomainError("t outside the homotopy interval", t=t, interval=[a, b])
        hit = np.nonzero(self.ts == t)[0]
        if hit.size:
            return self.pairs[int(hit[0])]
        if self.family is not None:
            return self.family(float(t))
        j = self._segment(t)
        s = (t - self.ts[j]) / (self.ts[j + 1] - self.ts[j])
        p0, p1 = self.pairs[j], self.pairs[j + 1]
        h = combine([(1 - s, p0.h), (s, p1.h)])
        if self.modes[j] == "special":
            g = SpecialStabilizer(h, (1 - s) * p0.g.c + s * p1.g.c)
        else:
            g = combine([(1 - s, p0.g), (s, p1.g)])
        return ShsPair(h, g, p0.verify_tol, max(p0.boundary_exempt, p1.boundary_exempt))

    def _sample_eval(self, j: int, r: np.ndarray):
        key = (j, r.tobytes())
        got = self._cache.get(key)
        if got is None:
            p = self.pairs[j]
            got = {
                "h": p.h._eval(r, 0),
                "dh": p.h._eval(r, 1),
                "d2h": p.h._eval(r, 2),
                "g": p.g._eval(r, 0),
                "dg": p.g._eval(r, 1),
            }
            if len(self._cache) > 4096:
                self._cache.clear()
            self._cache[key] = got
        return got

    def state(self, t: float, r: np.ndarray, segment: int | None = None) -> dict:
        """h, h', g, g' and their t-derivatives at time t on the r-array.
        ``segment`` selects the one-sided derivative at a sample time."""
        r = np.asarray(r, dtype=float)
        if self.family is not None:
            return self._family_state(t, r)
        j = self._segment(t) if segment is None else segment
        dt = self.ts[j + 1] - self.ts[j]
        s = (t - self.ts[j]) / dt
        e0, e1 = self._sample_eval(j, r), self._sample_eval(j + 1, r)
        lin = {k: (1 - s) * e0[k] + s * e1[k] for k in ("h", "dh", "d2h")}
        out = {"h": lin["h"], "dh": lin["dh"], "hdot": (e1["h"] - e0["h"]) / dt}
        if self.modes[j] == "special":
            c0, c1 = self.pairs[j].g.c, self.pairs[j + 1].g.c
            c = (1 - s) * c0 + s * c1
            speed = np.hypot(*lin["dh"].T)[:, None]
            k = lin["dh"] / speed

            def perp(v):
                return (v - dot(v, k)[:, None] * k) / speed

            dhdot = (e1["dh"] - e0["dh"]) / dt
            out["g"] = c * rot(k)
            out["dg"] = c * rot(perp(lin["d2h"]))
            out["gdot"] = (c1 - c0) / dt * rot(k) + c * rot(perp(dhdot))
        else:
            out["g"] = (1 - s) * e0["g"] + s * e1["g"]
            out["dg"] = (1 - s) * e0["dg"] + s * e1["dg"]
            out["gdot"] = (e1["g"] - e0["g"]) / dt
        return out

    def _family_state(self, t: float, r: np.ndarray) -> dict:
        a, b = self.interval
        step = _FD_DT * (b - a)
        lo, hi = max(a, t - step), min(b, t + step)
        pl, pm, ph = self.pair_at(lo), self.pair_at(t), self.pair_at(hi)
        out = {"h": pm.h._eval(r, 0), "dh": pm.h._eval(r, 1), "g": pm.g._eval(r, 0), "dg": pm.g._eval(r, 1)}
        out["hdot"] = (ph.h._eval(r, 0) - pl.h._eval(r, 0)) / (hi - lo)
        out["gdot"] = (ph.g._eval(r, 0) - pl.g._eval(r, 0)) / (hi - lo)
        return out

    def eval_points(self, per_segment: int = 3):
        """(t, segment) pairs: both ends and interior points of every segment."""
        pts = []
        for j in range(len(self.ts) - 1):
            for s in np.linspace(0.0, 1.0, per_segment):
                pts.append((float(self.ts[j] + s * (self.ts[j + 1] - self.ts[j])), j))
        return pts

    def r_grid(self, n: int = 257) -> np.ndarray:
        a, b = self.r_interval
        e = max(p.boundary_exempt for p in self.pairs)
        r = np.linspace(a, b, n + 2)[1:-1]
        return r[(r > a + e) & (r < b - e)]

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        out = {
            "interval": list(self.interval),
            "samples": [{"t": float(t), "pair": p.to_json()} for t, p in zip(self.ts, self.pairs)],
        }
        if any(m != "linear" for m in self.modes):
            out["interp"] = list(self.modes)
        return out

    @classmethod
    def from_json(cls, d: dict, check: bool = True) -> "StableHomotopy":
        try:
            samples = d["samples"]
            ts = [float(s["t"]) for s in samples]
            pairs = [ShsPair.from_json(s["pair"]) for s in samples]
            iv = d.get("interval", [ts[0], ts[-1]])
        except (KeyError, TypeError, IndexError) as exc:
            raise MalformedInputError(f"malformed homotopy: {exc}") from exc
        if abs(float(iv[0]) - ts[0]) > 1e-12 or abs(float(iv[1]) - ts[-1]) > 1e-12:
            raise MalformedInputError("homotopy interval does not match the sample times")
        return cls(ts, pairs, d.get("interp"), check=check)


def verify_homotopy(gamma: StableHomotopy) -> dict:
    """Every sample and every segment midpoint verifies."""
    worst = 0.0
    failures = []
    for j in range(len(gamma.ts) - 1):
        tm = 0.5 * (gamma.ts[j] + gamma.ts[j + 1])
        for t in (float(gamma.ts[j]), float(tm)):
            rep = verify(gamma.pair_at(t))
            worst = max(worst, rep["residual_sup"])
            if not rep["ok"]:
                failures.append(t)
    rep = verify(gamma.pairs[-1])
    worst = max(worst, rep["residual_sup"])
    if not rep["ok"]:
        failures.append(float(gamma.ts[-1]))
    return {"ok": not failures, "failing_t": failures, "residual_sup": worst}


# --------------------------------------------------------------------------
# constants


@dataclass(frozen=True)
class Constants:
    A: float
    B: float
    delta: float
    L: float

    def astuple(self):
        return (self.A, self.B, self.delta, self.L)

    def to_json(self) -> dict:
        return {"A": self.A, "B": self.B, "delta": self.delta, "L": self.L}


def length_from(A: float, B: float, delta: float, span: float) -> float:
    ratio = 0.0 if B == 0 or math.isinf(delta) else B / delta
    return (A + ratio) * span


def homotopy_constants(gamma: StableHomotopy, n_r: int = 257) -> Constants:
    cached = getattr(gamma, "_constants", None)
    if cached is not None:
        return cached
    r = gamma.r_grid(n_r)
    A = B = 0.0
    fmax = 0.0
    for t, j in gamma.eval_points():
        st = gamma.state(t, r, j)
        D = pairing(st["g"], st["dh"])
        if np.any(D <= 0):
            raise StabilizationError("<g, ih'> <= 0 along the homotopy", t=t)
        A = max(A, float(np.max(np.abs(pairing(st["gdot"], st["dh"]) / D))))
        B = max(B, float(np.max(np.abs(pairing(st["hdot"], st["dh"]) / D))))
        f = dot(st["dg"], st["dh"]) / dot(st["dh"], st["dh"])
        fmax = max(fmax, float(np.max(np.abs(f))))
    delta = math.inf if fmax == 0 else 1.0 / fmax
    for p in gamma.pairs:
        dm, dp = delta_bounds(p)
        delta = min(delta, dm, dp)
    if delta <= DELTA_FLOOR:
        raise DegenerateHomotopyError("delta vanishes: degenerate homotopy", delta=delta)
    a, b = gamma.interval
    out = Constants(A, B, delta, length_from(A, B, delta, b - a))
    gamma._constants = out
    return out


# --------------------------------------------------------------------------
# operation calculus


def _scaled(c: ProfileCurve, k: float) -> ProfileCurve:
    if _is_special(c):
        return SpecialStabilizer(c.base, c.c * k)
    return combine([(k, c)])


def _assert(cond: bool, what: str, **details):
    if not cond:
        raise ConstructionError(f"length calculus violated: {what}", **details)


def reparametrize(gamma: StableHomotopy, scale: float, shift: float) -> StableHomotopy:
    """gamma o tau, tau(s) = scale * s + shift, on tau^{-1}([a, b])."""
    if scale == 0:
        raise ParameterError("reparametrization must be nonconstant")
    ts = (gamma.ts - shift) / scale
    pairs, modes = list(gamma.pairs), list(gamma.modes)
    fam = None
    if gamma.family is not None:
        base = gamma.family
        fam = lambda s: base(scale * s + shift)  # noqa: E731
    if scale < 0:
        ts, pairs, modes = ts[::-1], pairs[::-1], modes[::-1]
    return StableHomotopy(ts, pairs, modes, fam, check=False)


def rescale_lambda(gamma: StableHomotopy, c: float) -> StableHomotopy:
    if not c > 0:
        raise ParameterError("rescaling factor must be positive", c=c)
    pairs = [ShsPair(p.h, _scaled(p.g, c), p.verify_tol, p.boundary_exempt) for p in gamma.pairs]
    return StableHomotopy(gamma.ts, pairs, gamma.modes, check=False)


def rescale_omega(gamma: StableHomotopy, c: float) -> StableHomotopy:
    if not c > 0:
        raise ParameterError("rescaling factor must be positive", c=c)
    pairs = []
    for p in gamma.pairs:
        h = _scaled(p.h, c)
        g = SpecialStabilizer(h, p.g.c) if _is_special(p.g) else p.g
        pairs.append(ShsPair(h, g, p.verify_tol, p.boundary_exempt))
    return StableHomotopy(gamma.ts, pairs, gamma.modes, check=False)


def restrict(gamma: StableHomotopy, lo: float, hi: float) -> StableHomotopy:
    a, b = gamma.interval
    if not (a - 1e-12 <= lo < hi <= b + 1e-12):
        raise DomainError("restriction interval must lie inside the homotopy interval", sub=[lo, hi], interval=[a, b])
    lo, hi = max(lo, a), min(hi, b)
    inner = [j for j, t in enumerate(gamma.ts) if lo < t < hi]
    ts = [lo] + [float(gamma.ts[j]) for j in inner] + [hi]
    pairs = [gamma.pair_at(lo)] + [gamma.pairs[j] for j in inner] + [gamma.pair_at(hi)]
    modes = [gamma.modes[gamma._segment(0.5 * (t0 + t1))] for t0, t1 in zip(ts[:-1], ts[1:])]
    return StableHomotopy(ts, pairs, modes, gamma.family, check=False)


def reverse(gamma: StableHomotopy) -> StableHomotopy:
    if gamma._origin is not None:
        return gamma._origin
    a, b = gamma.interval
    out = reparametrize(gamma, -1.0, a + b)
    out._origin = gamma
    return out


def _same_pair(p: ShsPair, q: ShsPair, tol: float = 1e-12) -> bool:
    if p is q or p.to_json() == q.to_json():
        return True
    r = p.grid(257)
    for u, v in ((p.h, q.h), (p.g, q.g)):
        for order in (0, 1):
            x, y = u._eval(r, order), v._eval(r, order)
            if np.max(np.abs(x - y)) > tol * max(1.0, float(np.max(np.abs(x)))):
                return False
    return True


def concatenate(gamma: StableHomotopy, other: StableHomotopy) -> StableHomotopy:
    if abs(gamma.interval[1] - other.interval[0]) > 1e-12:
        raise DomainError("concatenation needs matching time endpoints", left=gamma.interval, right=other.interval)
    if not _same_pair(gamma.pairs[-1], other.pairs[0]):
        raise DomainError("concatenation needs matching endpoint pairs")
    if gamma.family is not None or other.family is not None:
        raise ParameterError("concatenation of per-time-solved families is not supported; sample them first")
    ts = list(gamma.ts) + list(other.ts[1:])
    pairs = gamma.pairs + other.pairs[1:]
    return StableHomotopy(ts, pairs, gamma.modes + other.modes, check=False)


def transform(gamma: StableHomotopy, op: str, *args) -> StableHomotopy:
    """Apply one calculus operation and assert the length rule it obeys."""
    c0 = homotopy_constants(gamma)
    tol = 1e-9 * max(1.0, c0.L)
    if op == "reparametrize":
        out = reparametrize(gamma, *args)
        c1 = homotopy_constants(out)
        _assert(abs(c1.L - c0.L) <= tol, "affine reparametrization changes L", before=c0.L, after=c1.L)
    elif op in ("rescale_lambda", "rescale_omega"):
        out = (rescale_lambda if op == "rescale_lambda" else rescale_omega)(gamma, *args)
        c1 = homotopy_constants(out)
        _assert(abs(c1.L - c0.L) <= tol, "rescaling changes L", before=c0.L, after=c1.L)
    elif op == "restrict":
        out = restrict(gamma, *args)
        c1 = homotopy_constants(out)
        a, b = gamma.interval
        lo, hi = out.interval
        _assert(c1.L <= (hi - lo) / (b - a) * c0.L + tol, "restriction bound", before=c0.L, after=c1.L)
    elif op == "reverse":
        out = reverse(gamma)
        c1 = homotopy_constants(out)
        same = all(abs(x - y) <= 1e-9 * max(1.0, abs(x)) for x, y in zip(c0.astuple(), c1.astuple()) if math.isfinite(x))
        _assert(same, "reversal changes the constants")
    elif op == "concatenate":
        (other,) = args
        c2 = homotopy_constants(other)
        out = concatenate(gamma, other)
        c1 = homotopy_constants(out)
        _assert(abs(c1.A - max(c0.A, c2.A)) <= tol, "A max rule")
        _assert(abs(c1.B - max(c0.B, c2.B)) <= tol, "B max rule")
        _assert(c1.delta == min(c0.delta, c2.delta) or abs(c1.delta - min(c0.delta, c2.delta)) <= 1e-9 * c1.delta, "delta min rule")
    else:
        raise ParameterError(f"unknown operation {op!r}")
    return out


def split_short(gamma: StableHomotopy, Lmax: float) -> list:
    if not Lmax > 0:
        raise ParameterError("Lmax must be positive")
    L = homotopy_constants(gamma).L
    if L < Lmax and L == 0:
        return [gamma]
    n = int(math.ceil(L / Lmax)) + 1
    a, b = gamma.interval
    edges = np.linspace(a, b, n + 1)
    queue = [(float(lo), float(hi)) for lo, hi in zip(edges[:-1], edges[1:])]
    pieces = []
    while queue:
        lo, hi = queue.pop(0)
        piece = restrict(gamma, lo, hi)
        if homotopy_constants(piece).L < Lmax:
            pieces.append(piece)
        else:
            mid = 0.5 * (lo + hi)
            queue[:0] = [(lo, mid), (mid, hi)]
        if len(pieces) + len(queue) > MAX_PIECES:
            raise DegenerateHomotopyError("splitting needs more than 2^16 pieces")
    return pieces


# --------------------------------------------------------------------------
# cobordisms


@dataclass
class CobordismForm:
    base: StableHomotopy
    slope: float  # f(t) = slope * (t - center)
    center: float
    delta: float
    t: np.ndarray
    r: np.ndarray
    density: np.ndarray
    slices: list = field(default_factory=list)

    def f(self, t):
        return self.slope * (np.asarray(t, dtype=float) - self.center)

    @property
    def min_density(self) -> float:
        return float(np.min(self.density))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t,r,density\n")
        for i, t in enumerate(self.t):
            for k, r in enumerate(self.r):
                buf.write(f"{t:.17g},{r:.17g},{self.density[i, k]:.17g}\n")
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "f_slope": self.slope,
            "f_center": self.center,
            "delta": self.delta,
            "min_density": self.min_density,
            "grid": [len(self.t), len(self.r)],
            "slices": self.slices,
        }


def _density(gamma: StableHomotopy, slope: float, center: float, t: np.ndarray, r: np.ndarray) -> np.ndarray:
    out = np.empty((len(t), len(r)))
    for i, tt in enumerate(t):
        st = gamma.state(float(tt), r)
        f = slope * (tt - center)
        v = st["hdot"] + slope * st["g"] + f * st["gdot"]
        w = st["dh"] + f * st["dg"]
        out[i] = 2.0 * pairing(v, w)
    return out


def cobordism_from_short(gamma: StableHomotopy, grid=DENSITY_GRID) -> CobordismForm:
    """Omega = omega_a + d nu_t + dt ^ nu-dot_t with nu_t = mu_t + f(t) lambda_t."""
    c = homotopy_constants(gamma)
    if not c.L < 1:
        raise TooLongError("length ≥ 1", L=c.L)
    a, b = gamma.interval
    span = b - a
    delta = c.delta
    if math.isinf(delta):
        # any finite delta' with delta' (1 - A span) > B span works
        delta = max(1.0, 2 * c.B * span / (1 - c.A * span))
    slope = c.A * delta + c.B + delta / span
    center = 0.5 * (a + b)
    nt, nr = grid
    for attempt in range(2):
        t = np.linspace(a, b, nt)
        r = gamma.r_grid(nr)
        f = slope * (t - center)
        if not (np.all(np.abs(f) < delta) and np.all(slope > c.A * np.abs(f) + c.B)):
            raise ConstructionError("slope conditions fail on the t-grid", delta=delta, slope=slope)
        dens = _density(gamma, slope, center, t, r)
        if np.min(dens) > 0:
            return CobordismForm(gamma, slope, center, delta, t, r, dens)
        nt, nr = 2 * nt - 1, 2 * nr - 1
    raise ConstructionError("cobordism density is not positive on the refined grid", min_density=float(np.min(dens)))


def _shift(gamma: StableHomotopy, dt: float) -> StableHomotopy:
    return reparametrize(gamma, 1.0, -dt)


def triple_cobordism(gamma: StableHomotopy, grid=DENSITY_GRID) -> CobordismForm:
    """Cobordism over [0, 3] along tau = t, 2 - t, t - 2 (gamma on [0, 1])."""
    c = homotopy_constants(gamma)
    if not c.L < 1 / 3:
        raise TooLongError("length ≥ 1/3", L=c.L)
    a, b = gamma.interval
    g1 = reparametrize(gamma, b - a, a)  # now on [0, 1]
    g2 = _shift(reverse(g1), 1.0)
    g3 = _shift(g1, 2.0)
    tri = concatenate(concatenate(g1, g2), g3)
    form = cobordism_from_short(tri, grid)
    taus = {0.0: 0.0, 1.0: 1.0, 2.0: 0.0, 3.0: 1.0}
    r = tri.r_grid(257)
    for t, tau in taus.items():
        pair = g1.pair_at(tau)
        f = float(form.f(t))
        dm, dp = delta_bounds(pair)
        st = tri.state(t, r, min(tri._segment(t), len(tri.ts) - 2))
        want = pair.h._eval(r, 1) + f * pair.g._eval(r, 1)
        got = st["dh"] + f * st["dg"]
        err = float(np.max(np.abs(got - want)))
        ok = bool(-dm < f < dp and err <= 1e-9)
        form.slices.append({"t": t, "tau": tau, "f": f, "delta_minus": dm, "delta_plus": dp, "slice_error": err, "ok": ok})
        if not ok:
            raise ConstructionError("slice does not land in the expected class", t=t, f=f, error=err)
    return form
