"""Generate src/shskit/data/exotic_path.json.

The path rotates the middle of h_0 = h_st / 2 clockwise about c while the
whole picture expands slowly:

    h_t(r) = e^{kappa t} (c + R(-omega t beta(r)) (h_0(r) - c)),

with beta = 0 near r = 0, 1 (ends stay positive multiples of h_st) and
beta = 1 around r*, the point of h_0 at distance |c| from c. Writing
g = h e^{-kappa t},

    <h-dot, ih'> = e^{2 kappa t} (omega beta <c - h_0, h_0'> + kappa <g, ig'>),

and <c - h_0, h_0'> > 0 along h_0, so a small kappa keeps the path
monotone (checked on a fine grid below). The only zero of h_t is at r*,
reached once when omega t equals the angle from h_0(r*) - c to -c.

Each sample stores h_t and its time derivative as Hermite tables in r.
"""

from __future__ import annotations

import argparse
import json
import math
import pathlib

import numpy as np

C = np.array([0.75, -0.3])
KAPPA = 0.005
OMEGA = 1.0
T_FLOW = 6.1
N_SAMPLES = 33
N_NODES = 129


def S(u):
    u = np.clip(u, 0.0, 1.0)
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u))


def dS(u):
    inside = (u > 0) & (u < 1)
    u = np.clip(u, 0.0, 1.0)
    return np.where(inside, 30.0 * u * u * (1 - u) ** 2, 0.0)


L0, L1, R1, R0 = 0.07, 0.55, 0.70, 0.94


def beta(r):
    return np.where(r < 0.6, S((r - L0) / (L1 - L0)), S((R0 - r) / (R0 - R1)))


def dbeta(r):
    return np.where(r < 0.6, dS((r - L0) / (L1 - L0)) / (L1 - L0), -dS((R0 - r) / (R0 - R1)) / (R0 - R1))


def rot(v):
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def R(theta, v):
    c, s = np.cos(theta)[..., None], np.sin(theta)[..., None]
    return np.stack([c[..., 0] * v[..., 0] - s[..., 0] * v[..., 1], s[..., 0] * v[..., 0] + c[..., 0] * v[..., 1]], axis=-1)


def pairing(u, v):
    return u[..., 1] * v[..., 0] - u[..., 0] * v[..., 1]


def state(t, r):
    """h, h', h-dot, h-dot' at flow time t."""
    h0 = 0.5 * np.stack([r * r, 1 - r * r], axis=-1)
    d0 = np.stack([r, -r], axis=-1)
    q = R(-OMEGA * t * beta(r), h0 - C)
    e = math.exp(KAPPA * t)
    th1 = -OMEGA * t * dbeta(r)  # d theta / dr
    tht = -OMEGA * beta(r)  # d theta / dt
    thtr = -OMEGA * dbeta(r)  # d^2 theta / dt dr
    Rd = R(-OMEGA * t * beta(r), d0)
    g = C + q
    dg = Rd + th1[:, None] * rot(q)
    h = e * g
    dh = e * dg
    hdot = KAPPA * h + e * tht[:, None] * rot(q)
    hdot_r = KAPPA * dh + e * (thtr[:, None] * rot(q) + tht[:, None] * rot(dg))
    return h, dh, hdot, hdot_r


def r_star():
    from math import isclose

    lo, hi = 0.3, 0.9
    f = lambda r: float(np.hypot(*(0.5 * np.array([r * r, 1 - r * r]) - C)) - np.hypot(*C))  # noqa: E731
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (f(lo) < 0) == (f(mid) < 0):
            lo = mid
        else:
            hi = mid
    assert isclose(lo, hi, abs_tol=1e-12)
    return lo


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parents[1] / "src/shskit/data/exotic_path.json"))
    args = ap.parse_args()

    rs = r_star()
    q0 = 0.5 * np.array([rs * rs, 1 - rs * rs]) - C
    ang = (math.atan2(q0[1], q0[0]) - math.atan2(-C[1], -C[0])) % (2 * math.pi)
    print(f"r* = {rs:.6f}, beta(r*) = {float(beta(np.array([rs]))[0]):.3f}, crossing flow time = {ang:.4f} (T = {T_FLOW})")

    # exact density on a fine grid
    rr = np.linspace(0.0, 1.0, 4001)[1:-1]
    worst = math.inf
    for t in np.linspace(0.0, T_FLOW, 1001):
        _, dh, hd, _ = state(t, rr)
        worst = min(worst, float(np.min(pairing(hd, dh) / rr)))
    print(f"min <h-dot, ih'>/r over the fine grid: {worst:.3e}")
    assert worst > 0

    r = np.linspace(0.0, 1.0, N_NODES)
    samples = []
    for tau in np.linspace(0.0, 1.0, N_SAMPLES):
        h, dh, hd, hdr = state(tau * T_FLOW, r)
        hd, hdr = hd * T_FLOW, hdr * T_FLOW  # derivatives in path time
        if tau == 0.0:
            h = 0.5 * np.stack([r * r, 1 - r * r], axis=-1)
            dh = np.stack([r, -r], axis=-1)
        curve = {"interval": [0.0, 1.0], "kind": "hermite", "eta": 0.0,
                 "nodes": [{"r": float(x), "h": [float(a), float(b)], "dh": [float(c), float(d)]}
                           for x, (a, b), (c, d) in zip(r, h, dh)]}
        vel = {"interval": [0.0, 1.0], "kind": "hermite", "eta": 0.0,
               "nodes": [{"r": float(x), "h": [float(a), float(b)], "dh": [float(c), float(d)]}
                         for x, (a, b), (c, d) in zip(r, hd, hdr)]}
        samples.append({"t": float(tau), "curve": curve, "velocity": vel})
    doc = {"interval": [0.0, 1.0], "samples": samples, "eps": 0.05}
    pathlib.Path(args.out).write_text(json.dumps(doc, separators=(",", ":")) + "\n")
    print("wrote", args.out)


if __name__ == "__main__":
    main()
