"""Seeded random inputs shared by the acceptance suite and the tests."""

from __future__ import annotations

import math

import numpy as np

from . import numerics as nx
from .curve import (
    HermiteCurve,
    PrimitiveCurve,
    ProfileCurve,
    ScalarSpline,
    SpecialStabilizer,
    hermite_from_derivative,
    pairing,
    rot,
    unit_tangent,
)
from .errors import ConstructionError
from .shs import ShsPair
from .stabilize import BoundaryData, slope_variation


def _angle_curve(sigma, speed, start, nodes) -> HermiteCurve:
    def dfn(r):
        r = np.atleast_1d(r)
        s, v = sigma(r), speed(r)
        return v[:, None] * np.stack([np.cos(s), np.sin(s)], axis=1)

    return hermite_from_derivative(dfn, nodes, start)


def random_immersion(rng: np.random.Generator, amp: float = 2.0, nodes: int = 9, min_variation: float = 0.1) -> HermiteCurve:
    """Hermite immersion on [0, 1] with a trigonometric slope lift and
    speed in [0.7, 1.3]; redrawn until the interior slope moves by
    ``min_variation`` radians."""
    for _ in range(100):
        a = rng.uniform(-amp, amp, 3)
        ph = rng.uniform(0, 2 * math.pi, 3)
        s0 = rng.uniform(-math.pi, math.pi)
        start = rng.normal(size=2)

        def sigma(r, a=a, ph=ph, s0=s0):
            return s0 + sum(a[j] * np.sin((j + 1) * math.pi * r + ph[j]) for j in range(3))

        def speed(r, ph=ph):
            return 1 + 0.3 * np.sin(2 * math.pi * r + ph[0])

        h = _angle_curve(sigma, speed, start, np.linspace(0.0, 1.0, nodes))
        if slope_variation(h, 0.1, 0.9) >= min_variation:
            return h
    raise ConstructionError("could not draw an immersion with enough slope variation")


def random_germ(h: ProfileCurve, r0: float, lo: float, hi: float, rng: np.random.Generator) -> ProfileCurve:
    """g = g0 + rho int h' with constant rho, positive on [lo, hi]."""
    r = np.linspace(lo, hi, 65)
    for _ in range(100):
        k, _ = unit_tangent(h, np.array([r0]))
        k = k[0]
        g0 = rng.uniform(0.2, 2.0) * rot(k[None])[0] + rng.uniform(-2.0, 2.0) * k
        rho = rng.uniform(-2.0, 2.0)
        g = PrimitiveCurve(h, ScalarSpline(h.interval, (rho, rho), (0.0, 0.0)), r0, g0, h.interval)
        if np.min(pairing(g._eval(r, 0), h._eval(r, 1))) > 0:
            return g
    raise ConstructionError("could not draw a positive boundary germ")


def random_boundary(h: ProfileCurve, rng: np.random.Generator, eps: float = 0.1) -> BoundaryData:
    a, b = h.interval
    return BoundaryData(random_germ(h, a, a, a + eps, rng), random_germ(h, b, b - eps, b, rng), eps)


def random_straight(rng: np.random.Generator) -> HermiteCurve:
    """Constant slope: h = p + phi(r) k with phi' > 0."""
    theta = rng.uniform(-math.pi, math.pi)
    k = np.array([math.cos(theta), math.sin(theta)])
    p = rng.normal(size=2)
    amp, ph = rng.uniform(0.0, 0.5), rng.uniform(0, 2 * math.pi)

    def dfn(r):
        r = np.atleast_1d(r)
        return (1 + amp * np.sin(2 * math.pi * r + ph))[:, None] * k[None, :]

    return hermite_from_derivative(dfn, np.linspace(0.0, 1.0, 33), p)


def level_germ(h: ProfileCurve, c: float, rng: np.random.Generator) -> ProfileCurve:
    """Germ g = c ik + (s + rho (h - h(a))) k along a straight h, with level c."""
    k, _ = unit_tangent(h, np.array([h.interval[0]]))
    k = k[0]
    g0 = c * rot(k[None])[0] + rng.uniform(-1.0, 1.0) * k
    rho = rng.uniform(-1.0, 1.0)
    return PrimitiveCurve(h, ScalarSpline(h.interval, (rho, rho), (0.0, 0.0)), h.interval[0], g0, h.interval)


def random_special_pair(rng: np.random.Generator, amp: float = 2.0) -> ShsPair:
    h = random_immersion(rng, amp)
    return ShsPair(h, SpecialStabilizer(h, float(rng.uniform(0.5, 2.0))))


def random_bump_curve(rng: np.random.Generator, nodes: int = 17, scale: float = 1.0) -> HermiteCurve:
    """Hermite curve on [0, 1] vanishing at both ends (values and slopes)."""
    r = np.linspace(0.0, 1.0, nodes)
    w = (r * (1 - r))[:, None]
    dw = (1 - 2 * r)[:, None]
    v = rng.normal(size=(nodes, 2)) * scale
    dv = rng.normal(size=(nodes, 2)) * scale
    return HermiteCurve(r, w * w * v, 2 * w * dw * v + w * w * dv, eta=0.0, check=False)


def random_homotopy(rng: np.random.Generator, h_rate: float, c_rate: float, samples: int = 9):
    """Special-mode homotopy h_t = h + t eps p, g_t = c (1 + t c_rate) i k_t on [0, 1]."""
    from .curve import combine
    from .homotopy import StableHomotopy

    h = random_immersion(rng, amp=1.0)
    p = random_bump_curve(rng, scale=h_rate)
    c0 = float(rng.uniform(0.5, 2.0))
    ts = np.linspace(0.0, 1.0, samples)
    pairs = []
    for t in ts:
        ht = combine([(1.0, h), (float(t), p)])
        pairs.append(ShsPair(ht, SpecialStabilizer(ht, c0 * (1 + c_rate * float(t)))))
    return StableHomotopy(ts, pairs, ["special"] * (samples - 1))


def perturbed_s3(pair_h: ProfileCurve, rng: np.random.Generator, amp: float = 1.0, c=None) -> ShsPair:
    """Same binding signs and winding: rotate and rescale h' by bumps
    supported inside (0.15, 0.85)."""
    from .catalog import _Polar

    a, b = pair_h.interval
    seed = np.linspace(a, b, 1025)
    P = _Polar(pair_h, seed)
    cs = rng.uniform(0.25, 0.75, 2)
    ws = rng.uniform(0.05, 0.1, 2)
    da = rng.uniform(-amp, amp, 2)
    ds = rng.uniform(-0.5, 0.5, 2)

    def dfn(r):
        r = np.atleast_1d(r)
        sp, ang = P(r)
        ang = ang + sum(da[j] * nx.smoothstep(1 - ((r - cs[j]) / ws[j]) ** 2) for j in range(2))
        sp = sp * np.exp(sum(ds[j] * nx.smoothstep(1 - ((r - cs[j]) / ws[j]) ** 2) for j in range(2)))
        return sp[:, None] * np.stack([np.cos(ang), np.sin(ang)], axis=1)

    h = hermite_from_derivative(dfn, seed, pair_h._eval(np.array([a]), 0)[0])
    c = float(rng.uniform(0.5, 2.0)) if c is None else c
    return ShsPair(h, SpecialStabilizer(h, c))


def random_quadrant_curve(rng: np.random.Generator) -> HermiteCurve:
    """Curve in the open positive quadrant with positive, slowly varying coordinates."""
    base = rng.uniform(0.2, 1.0, 2)
    amp = rng.uniform(0.0, 0.07, (2, 2))
    ph = rng.uniform(0, 2 * math.pi, (2, 2))
    r = np.linspace(0.0, 1.0, 65)
    h = np.stack([base[i] + sum(amp[i, j] * np.sin((j + 1) * math.pi * r + ph[i, j]) for j in range(2)) + (1 - 2 * i) * 0.5 * r for i in range(2)], axis=1)
    dh = np.stack([sum(amp[i, j] * (j + 1) * math.pi * np.cos((j + 1) * math.pi * r + ph[i, j]) for j in range(2)) + (1 - 2 * i) * 0.5 for i in range(2)], axis=1)
    h[:, 1] += 0.5
    return HermiteCurve(r, h, dh, eta=0.0, check=False)


__all__ = [
    "random_immersion",
    "random_germ",
    "random_boundary",
    "random_straight",
    "level_germ",
    "random_special_pair",
    "random_bump_curve",
    "random_homotopy",
    "perturbed_s3",
    "random_quadrant_curve",
]
