"""Numerical kernels: adaptive Simpson, vectorized bisection, Gauss-Legendre
cumulative integrals, rational direction tags and a small thread-pool helper."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import NumericalError

SIMPSON_TOL = 1e-9
SIMPSON_MAX_DEPTH = 40
ROOT_TOL = 1e-10
ANGLE_TOL = 1e-9
DEFAULT_Q = 64

_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


def thread_count() -> int:
    """Worker cap taken from SHSKIT_THREADS (default: cpu count)."""
    raw = os.environ.get("SHSKIT_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def parallel_map(fn: Callable, items: Sequence) -> list:
    items = list(items)
    n = min(thread_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# --------------------------------------------------------------------------
# quadrature


def adaptive_simpson(
    fn: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = SIMPSON_TOL,
    max_depth: int = SIMPSON_MAX_DEPTH,
    breaks: Iterable[float] | None = None,
) -> float:
    """Adaptive composite Simpson rule for a vectorized scalar integrand.

    Intervals are refined level by level; an interval of length ``l`` is
    accepted once the Richardson estimate is below ``tol * l / (b - a)``.
    """
    if b == a:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    pts = [a, b]
    if breaks is not None:
        pts.extend(x for x in breaks if a < x < b)
    edges = np.unique(np.asarray(pts, dtype=float))
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    # one ulp inside each cell, so a jump at a break is seen from the right side
    flo, fmid, fhi = fn(np.nextafter(lo, hi)), fn(mid), fn(np.nextafter(hi, lo))
    total = 0.0
    width = b - a
    err_budget = 0.0
    for _depth in range(max_depth + 1):
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm = fn(lm)
        frm = fn(rm)
        h = hi - lo
        whole = h / 6.0 * (flo + 4.0 * fmid + fhi)
        halves = h / 12.0 * (flo + 4.0 * flm + 2.0 * fmid + 4.0 * frm + fhi)
        err = np.abs(halves - whole) / 15.0
        ok = err <= tol * h / width
        total += float(np.sum(halves[ok] + (halves[ok] - whole[ok]) / 15.0))
        err_budget += float(np.sum(err[ok]))
        if np.all(ok):
            return sign * total
        keep = ~ok
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        flo, fmid, fhi = flo[keep], fmid[keep], fhi[keep]
        flm, frm = flm[keep], frm[keep]
        lo, mid, hi, flo, fmid, fhi = (
            np.concatenate([lo, mid]),
            np.concatenate([0.5 * (lo + mid), 0.5 * (mid + hi)]),
            np.concatenate([mid, hi]),
            np.concatenate([flo, fmid]),
            np.concatenate([flm, frm]),
            np.concatenate([fmid, fhi]),
        )
    h = hi - lo
    achieved = err_budget + float(np.sum(np.abs(h / 6.0 * (flo + 4 * fmid + fhi))))
    raise NumericalError(
        "adaptive Simpson did not converge", achieved_tolerance=achieved, depth=max_depth
    )


class CumulativeIntegral:
    """r -> integral_{r0}^{r} F(s) ds for a vectorized F: (n,) -> (n, k).

    Cells are the union of ``breaks`` refined to width at most ``max_width``;
    each cell uses 10-point Gauss-Legendre, so piecewise polynomial
    integrands of degree <= 19 aligned with the breaks are integrated exactly.
    """

    def __init__(self, fn, a: float, b: float, r0: float, breaks=(), max_width=None):
        self.fn = fn
        self.a, self.b, self.r0 = float(a), float(b), float(r0)
        if max_width is None:
            max_width = (b - a) / 256.0
        pts = [a, b, r0] + [x for x in breaks if a < x < b]
        pts = np.unique(np.asarray(pts, dtype=float))
        dif = np.diff(pts)
        m = np.maximum(1, np.ceil(dif / max_width)).astype(int)
        seg = np.repeat(np.arange(len(dif)), m)
        j = np.arange(int(m.sum())) - np.repeat(np.cumsum(m) - m, m) + 1
        inner = pts[seg] + dif[seg] * (j / m[seg])
        inner[j == m[seg]] = pts[1:]
        self.edges = np.concatenate([pts[:1], inner])
        lo, hi = self.edges[:-1], self.edges[1:]
        half = 0.5 * (hi - lo)
        xs = (0.5 * (hi + lo))[:, None] + half[:, None] * _GL_X[None, :]
        vals = np.asarray(fn(xs.ravel()))
        k = 1 if vals.ndim == 1 else vals.shape[1]
        vals = vals.reshape(len(lo), len(_GL_X), k)
        cell = np.einsum("j,cjk->ck", _GL_W, vals) * half[:, None]
        cum = np.vstack([np.zeros((1, k)), np.cumsum(cell, axis=0)])
        i0 = int(np.searchsorted(self.edges, self.r0))
        self.cum = cum - cum[i0]
        self.k = k

    def __call__(self, r) -> np.ndarray:
        r = np.atleast_1d(np.asarray(r, dtype=float))
        idx = np.clip(np.searchsorted(self.edges, r, side="right") - 1, 0, len(self.edges) - 2)
        lo = self.edges[idx]
        half = 0.5 * (r - lo)
        xs = (0.5 * (r + lo))[:, None] + half[:, None] * _GL_X[None, :]
        vals = np.asarray(self.fn(xs.ravel())).reshape(len(r), len(_GL_X), self.k)
        part = np.einsum("j,njk->nk", _GL_W, vals) * half[:, None]
        return self.cum[idx] + part


# --------------------------------------------------------------------------
# root finding


def bisect_roots(fn, lo, hi, tol: float = ROOT_TOL, max_iter: int = 200) -> np.ndarray:
    """Vectorized bisection. ``fn`` maps an array of r to an array of values;
    every bracket [lo_i, hi_i] must carry a sign change (zeros allowed)."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    if lo.size == 0:
        return lo
    flo = np.asarray(fn(lo), dtype=float)
    fhi = np.asarray(fn(hi), dtype=float)
    if np.any(flo * fhi > 0):
        raise NumericalError("bisection bracket without sign change")
    done_lo = flo == 0
    done_hi = (fhi == 0) & ~done_lo
    hi = np.where(done_lo, lo, hi)
    lo = np.where(done_hi, hi, lo)
    for _ in range(max_iter):
        if np.all(hi - lo <= tol):
            break
        mid = 0.5 * (lo + hi)
        fm = np.asarray(fn(mid), dtype=float)
        left = np.sign(fm) == np.sign(flo)
        exact = fm == 0
        lo = np.where(exact, mid, np.where(left, mid, lo))
        flo = np.where(exact, fm, np.where(left, fm, flo))
        hi = np.where(exact, mid, np.where(left, hi, mid))
    else:
        raise NumericalError("bisection did not reach tolerance", tol=tol)
    return 0.5 * (lo + hi)


def zoom_min(fn, lo: float, hi: float, points: int = 65, rounds: int = 7) -> tuple[float, float]:
    """Minimum of a vectorized function on [lo, hi] by repeated grid search:
    each round samples ``points`` nodes and keeps the two cells around the
    best one. Returns (x, fn(x)); the endpoints are always sampled."""
    a, b = float(lo), float(hi)
    best_x, best_v = a, math.inf
    for _ in range(rounds):
        x = np.linspace(a, b, points)
        v = np.asarray(fn(x), dtype=float)
        k = int(np.argmin(v))
        if v[k] < best_v:
            best_x, best_v = float(x[k]), float(v[k])
        a, b = x[max(k - 1, 0)], x[min(k + 1, points - 1)]
        if not b > a:
            break
    return best_x, best_v


def bracket_sign_changes(x: np.ndarray, y: np.ndarray):
    """Cells [x_i, x_{i+1}] with y_i < 0 <= y_{i+1} or y_i > 0 >= y_{i+1}."""
    y0, y1 = y[:-1], y[1:]
    mask = ((y0 < 0) & (y1 >= 0)) | ((y0 > 0) & (y1 <= 0))
    idx = np.nonzero(mask)[0]
    return x[idx], x[idx + 1]


# --------------------------------------------------------------------------
# rational directions


def wrap_angle(x):
    """Map angles to (-pi, pi]."""
    y = np.mod(np.asarray(x) + np.pi, 2 * np.pi) - np.pi
    return np.where(y == -np.pi, np.pi, y)


def rational_tag(direction, Q: int = DEFAULT_Q, tol: float = ANGLE_TOL):
    """Coprime (p, q) with |p|,|q| <= Q parallel to ``direction`` within
    ``tol`` radians, or None."""
    x, y = float(direction[0]), float(direction[1])
    if x == 0.0 and y == 0.0:
        return None
    swap = abs(y) > abs(x)
    num, den = (x, y) if swap else (y, x)
    frac = Fraction(num / den).limit_denominator(Q)
    small, big = frac.numerator, frac.denominator
    # orient like the input direction
    if swap:
        a, b = (small, big) if y > 0 else (-small, -big)
    else:
        a, b = (big, small) if x > 0 else (-big, -small)
    if abs(a) > Q or abs(b) > Q or math.gcd(abs(a), abs(b)) != 1:
        return None
    ang = math.atan2(x * b - y * a, x * a + y * b)
    if abs(ang) <= tol:
        return (int(a), int(b))
    return None


def coprime_directions(Q: int) -> np.ndarray:
    """All primitive integer vectors (p, q) with |p|, |q| <= Q, shape (m, 2)."""
    rng = np.arange(-Q, Q + 1)
    P, R = np.meshgrid(rng, rng, indexing="ij")
    P, R = P.ravel(), R.ravel()
    g = np.gcd(P, R)
    keep = g == 1
    return np.stack([P[keep], R[keep]], axis=1)


def shoelace_area(pts: np.ndarray) -> float:
    """Signed area of the closed polygon through ``pts`` (counterclockwise > 0)."""
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def smoothstep(u):
    """C^2 step: 0 for u <= 0, 1 for u >= 1 (quintic)."""
    u = np.clip(u, 0.0, 1.0)
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u))


def smoothstep_d(u):
    inside = (u > 0) & (u < 1)
    uc = np.clip(u, 0.0, 1.0)
    return np.where(inside, 30.0 * uc * uc * (1.0 - uc) ** 2, 0.0)
