"""Acceptance checks at desk scale. Every check is seeded, so the report is
reproducible byte for byte; wall-clock times go to the caller, never into
the report."""

from __future__ import annotations

import json
import math
import time

import numpy as np

from . import catalog as K
from . import homotopy as H
from . import monotone as M
from . import numerics as nx
from . import samples as S
from . import shs
from . import stabilize as B
from .curve import SpecialStabilizer, combine, curve_from_json, poly, standard
from .errors import DomainError, ObstructionError
from .shs import ShsPair

SEED = 20240


def _rng(k: int) -> np.random.Generator:
    return np.random.default_rng(SEED + k)


def check_stabilization(n: int = 100) -> dict:
    rng = _rng(1)
    worst_res, worst_min, failures = 0.0, math.inf, 0
    for _ in range(n):
        h = S.random_immersion(rng)
        bd = S.random_boundary(h, rng)
        try:
            g = B.boundary_value_stabilizer(h, bd)
        except Exception:  # counted, reported below
            failures += 1
            continue
        rep = shs.verify(ShsPair(h, g))
        worst_res = max(worst_res, rep["residual_sup"])
        worst_min = min(worst_min, rep["min_pairing"])
        failures += 0 if rep["residual_sup"] < 1e-7 and rep["min_pairing"] > 0 else 1
    return {"cases": n, "failures": failures, "max_residual": worst_res, "min_pairing": worst_min, "ok": failures == 0}


def check_constant_slope(n: int = 50) -> dict:
    rng = _rng(2)
    wrong = 0
    for equal in (True, False):
        for _ in range(n):
            h = S.random_straight(rng)
            c = float(rng.uniform(0.5, 2.0))
            c2 = c if equal else c * (1 + float(rng.choice([-1, 1])) * float(rng.uniform(0.05, 0.45)))
            bd = B.BoundaryData(S.level_germ(h, c, rng), S.level_germ(h, c2, rng), 0.1)
            try:
                g = B.constant_slope_stabilizer(h, bd, 0.05)
                ok = equal and shs.verify(ShsPair(h, g))["ok"]
            except ObstructionError:
                ok = not equal
            wrong += 0 if ok else 1
    return {"cases": 2 * n, "mismatches": wrong, "ok": wrong == 0}


def _delta_brute(pair: ShsPair, dt: float = 1e-3, tmax: float = 50.0):
    """First grid t where h' + t g' stops pointing along h' somewhere."""
    r = pair.interior_grid(8193)
    dh, dg = pair.h._eval(r, 1), pair.g._eval(r, 1)
    hh, gh = np.sum(dh * dh, axis=1), np.sum(dg * dh, axis=1)
    out = []
    for sgn in (-1.0, 1.0):
        hit = math.inf
        for t0 in np.arange(0.0, tmax, 1000 * dt):
            ts = t0 + dt * np.arange(1, 1001)
            bad = np.any(hh[None, :] + sgn * ts[:, None] * gh[None, :] <= 0, axis=1)
            if np.any(bad):
                hit = float(ts[int(np.argmax(bad))])
                break
        out.append(hit)
    return tuple(out)


def check_delta(n: int = 50) -> dict:
    rng = _rng(3)
    worst = 0.0
    for _ in range(n):
        pair = S.random_special_pair(rng)
        dm, dp = shs.delta_bounds(pair)
        bm, bp = _delta_brute(pair)
        for x, y in ((dm, bm), (dp, bp)):
            err = 0.0 if math.isinf(x) and math.isinf(y) else abs(x - y)
            worst = max(worst, err)
    return {"cases": n, "max_error": worst, "ok": worst <= 1e-3}


def _loop_area(h0, h1, n: int = 20001) -> float:
    r = np.linspace(0.0, 1.0, n)
    loop = np.concatenate([h1._eval(r, 0), h0._eval(r[::-1], 0)[1:]])
    return nx.shoelace_area(loop)


def check_helicity(n: int = 30) -> dict:
    rng = _rng(4)
    worst = 0.0
    for _ in range(n):
        h0 = S.random_immersion(rng, amp=1.0)
        h1 = combine([(1.0, h0), (1.0, S.random_bump_curve(rng, scale=0.5))])
        d = shs.helicity_difference(h0, h1)["magnitude"]
        worst = max(worst, abs(d - 2 * abs(_loop_area(h0, h1))))
    hst = shs.curve_helicity(standard())
    return {"cases": n, "max_error": worst, "Hc_standard": hst, "ok": worst <= 1e-6 and abs(hst - 1) <= 1e-9}


def example_length() -> H.StableHomotopy:
    """Constant omega, g_t = (1 + t) g_0 on t in [0, 1]."""
    h = standard()
    g0 = SpecialStabilizer(h, 1.0)
    return H.StableHomotopy([0.0, 1.0], [ShsPair(h, g0), ShsPair(h, SpecialStabilizer(h, 2.0))])


def check_length(n: int = 20) -> dict:
    c = H.homotopy_constants(example_length())
    ex_err = max(abs(c.A - 1), abs(c.B), abs(c.L - 1))
    rng = _rng(5)
    rep_err, restr_excess = 0.0, -math.inf
    for _ in range(n):
        g = S.random_homotopy(rng, float(rng.uniform(0, 0.3)), float(rng.uniform(0, 0.3)))
        c0 = H.homotopy_constants(g)
        scale, shift = float(rng.uniform(0.2, 5.0)), float(rng.uniform(-2, 2))
        c1 = H.homotopy_constants(H.reparametrize(g, scale, shift))
        rep_err = max(rep_err, abs(c1.L - c0.L) / max(1.0, c0.L))
        lo, hi = np.sort(rng.uniform(0, 1, 2))
        c2 = H.homotopy_constants(H.restrict(g, float(lo), float(hi)))
        restr_excess = max(restr_excess, c2.L - (hi - lo) * c0.L)
    ok = ex_err <= 1e-8 and rep_err <= 1e-9 and restr_excess <= 1e-9
    return {
        "example": c.to_json(),
        "example_error": ex_err,
        "reparam_error": rep_err,
        "restriction_excess": restr_excess,
        "cases": n,
        "ok": ok,
    }


def short_homotopies(n: int = 20):
    """Seeded homotopies with L < 0.9, every other one with L < 1/3."""
    rng = _rng(6)
    out = []
    while len(out) < n:
        small = len(out) % 2 == 0
        s = 0.05 if small else 0.3
        g = S.random_homotopy(rng, float(rng.uniform(0, s)), float(rng.uniform(0, s)))
        L = H.homotopy_constants(g).L
        if L < (1 / 3 if small else 0.9):
            out.append(g)
    return out


def check_cobordism(n: int = 20) -> dict:
    min_short, min_triple, triples, slices_ok = math.inf, math.inf, 0, True
    grids_ok = True
    for g in short_homotopies(n):
        form = H.cobordism_from_short(g)
        grids_ok &= form.density.shape[0] == H.DENSITY_GRID[0] and form.density.shape[1] == len(g.r_grid(H.DENSITY_GRID[1]))
        min_short = min(min_short, form.min_density)
        if H.homotopy_constants(g).L < 1 / 3:
            tri = H.triple_cobordism(g)
            triples += 1
            min_triple = min(min_triple, tri.min_density)
            slices_ok &= all(s["ok"] for s in tri.slices) and len(tri.slices) == 4
    ok = grids_ok and min_short > 0 and triples > 0 and min_triple > 0 and slices_ok
    return {"cases": n, "min_density": min_short, "triples": triples, "min_density_triple": min_triple, "slices_ok": bool(slices_ok), "ok": ok}


def check_monotone() -> dict:
    path = M.exotic_ball_path()
    rep = M.monotone_check(path)
    w0, w1 = M.standardized_winding(path.curves[0]), M.standardized_winding(path.curves[-1])
    obs = M.winding_obstruction(path.curves[-1], standard(scale=2.0))
    cr = rep["crossings"]
    ok = (
        rep["ok"]
        and rep["min_density"] > 0
        and len(cr) == 1
        and cr[0]["transversal"]
        and abs(w0) <= 1e-6
        and abs(w1 + 1) <= 1e-6
        and obs["verdict"] == "obstructed"
        and path.standardized
    )
    return {
        "min_density": rep["min_density"],
        "crossings": [{k: v for k, v in c.items() if k != "det"} for c in cr],
        "w_start": w0,
        "w_end": w1,
        "obstruction": obs["verdict"],
        "ok": bool(ok),
    }


def mb_pair() -> ShsPair:
    h = poly((0.0, 1.0), [0.0, 1.0], [0.0, 0.0, 0.5])
    return ShsPair(h, SpecialStabilizer(h, 1.0))


def check_morse_bott(n: int = 20) -> dict:
    pair = mb_pair()
    rep = shs.morse_bott_check(pair)
    pts = rep.witnesses
    idx = np.unique(np.linspace(0, len(pts) - 1, min(n, len(pts))).round().astype(int))
    agree = 0
    for i in idx:
        r, _, d = pts[i]
        lr = shs.linearized_return(pair, r)
        agree += int((lr["kernel_dim"] == 2) == (abs(d) > 1e-8))
    kernel2 = sum(shs.linearized_return(pair, r)["kernel_dim"] == 2 for r, _, _ in pts)
    ok = rep.verdict == "morse_bott" and kernel2 == len(pts) > 0 and agree == len(idx) and len(idx) == n
    return {
        "verdict": rep.verdict,
        "census_points": len(pts),
        "kernel_dim_2": int(kernel2),
        "checked": int(len(idx)),
        "agree": agree,
        "ok": ok,
    }


def check_energies(n: int = 50) -> dict:
    pair = mb_pair()
    orb = shs.closed_orbit(pair, 0.5)
    err = max(abs(orb.T - math.sqrt(5)), abs(orb.E_lambda - math.sqrt(5)), abs(orb.E_omega + 0.25))
    # integrate lambda and alpha along the trajectory produced by flow(),
    # with velocities from central differences of flow positions
    rr = np.array([0.5])
    hv, gv = pair.h._eval(rr, 0)[0], pair.g._eval(rr, 0)[0]

    def velocity(t, step=1e-4):
        t = np.atleast_1d(t)
        fwd = np.array([shs.flow(pair, 0.5, 0.0, 0.0, x + step)[1:] for x in t])
        bwd = np.array([shs.flow(pair, 0.5, 0.0, 0.0, x - step)[1:] for x in t])
        return (fwd - bwd) / (2 * step)

    El = nx.adaptive_simpson(lambda t: velocity(t) @ gv, 0.0, orb.T, 1e-12)
    Eo = nx.adaptive_simpson(lambda t: velocity(t) @ hv, 0.0, orb.T, 1e-12)
    end = shs.flow(pair, 0.5, 0.0, 0.0, orb.T)
    closing = max(abs(end[1] - round(end[1])), abs(end[2] - round(end[2])))
    cross = max(abs(El - orb.E_lambda), abs(Eo - orb.E_omega), closing)
    contact = K.make_named("overtwisted")
    census = shs.rational_census(contact.h, 64)
    rs = [x for x, _ in census.points if 0 < x < 1]
    pick = [rs[i] for i in np.unique(np.linspace(0, len(rs) - 1, n).round().astype(int))]
    worst = 0.0
    for x in pick:
        o = shs.closed_orbit(contact, x)
        worst = max(worst, abs(o.E_lambda - o.E_omega))
    ok = err <= 1e-8 and cross <= 1e-8 and worst <= 1e-9 and len(pick) == n
    return {"orbit": orb.to_json(), "error": err, "cross_check": cross, "contact_tori": len(pick), "contact_max_gap": worst, "ok": ok}


def classification_pairs(n: int = 20):
    rng = _rng(10)
    out = []
    for i in range(n):
        s0, s1 = ("+", "-")[i % 2], ("+", "-")[(i // 2) % 2]
        w = (i // 4) % 3 - 1
        base = K.make_named("s3_canonical", s0=s0, s1=s1, w=w).h
        out.append((S.perturbed_s3(base, rng), S.perturbed_s3(base, rng)))
    return out


def check_classification(n: int = 20) -> dict:
    witnesses = 0
    for a, b in classification_pairs(n):
        ans = K.is_homotopic(a, b, "S3")
        if ans.homotopic and len(ans.witness) == K.WITNESS_SAMPLES and H.verify_homotopy(ans.witness)["ok"]:
            witnesses += 1
    reps = []
    for s0 in ("+", "-"):
        for s1 in ("+", "-"):
            for w in (-1, 0, 1):
                reps.append(K.make_named("s3_canonical", s0=s0, s1=s1, w=w))
    wrong_no = 0
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            if K.is_homotopic(reps[i], reps[j], "S3").homotopic:
                wrong_no += 1
    st = K.classify(K.make_named("standard_contact"), "S3")
    ok = witnesses == n and wrong_no == 0 and st.s0 == "+" and st.s1 == "+" and abs(st.w) <= 1e-6
    return {"equal_pairs": n, "witnesses": witnesses, "unequal_pairs": len(reps) * (len(reps) - 1) // 2, "false_yes": wrong_no, "standard": st.to_json(), "ok": ok}


def check_embedding(n: int = 20) -> dict:
    rng = _rng(11)
    worst = 0.0
    for _ in range(n):
        rep = M.embed_symplectization(S.random_quadrant_curve(rng))
        worst = max(worst, rep.residual)
    try:
        M.embed_symplectization(M.exotic_curve())
        raised = False
    except DomainError:
        raised = True
    return {"cases": n, "max_residual": worst, "exotic_domain_error": raised, "ok": worst < 1e-10 and raised}


def _roundtrip(obj, cls):
    from .jsonio import dumps, loads

    return cls.from_json(loads(dumps(obj.to_json())))


def check_roundtrip() -> dict:
    """save -> load reproduces every result bit for bit."""
    from .jsonio import dumps

    results = {}
    pair = K.make_named("twist")
    q = _roundtrip(pair, ShsPair)
    results["pair"] = dumps(shs.verify(pair)) == dumps(shs.verify(q))
    c = pair.h
    c2 = curve_from_json(json.loads(json.dumps(c.to_json())))
    r = c.grid(257)
    results["curve"] = bool(np.array_equal(c._eval(r, 0), c2._eval(r, 0)) and np.array_equal(c._eval(r, 1), c2._eval(r, 1)))
    g = S.random_homotopy(_rng(12), 0.1, 0.1)
    g2 = _roundtrip(g, H.StableHomotopy)
    results["homotopy"] = dumps(H.homotopy_constants(g)) == dumps(H.homotopy_constants(g2))
    path = M.exotic_ball_path()
    p2 = _roundtrip(path, M.MonotonePath)
    results["monotone_path"] = dumps(M.monotone_check(path)) == dumps(M.monotone_check(p2))
    h = S.random_immersion(_rng(13))
    bd = S.random_boundary(h, _rng(14))
    bd2 = _roundtrip(bd, B.BoundaryData)
    results["boundary"] = dumps(B.boundary_value_stabilizer(h, bd).to_json()) == dumps(B.boundary_value_stabilizer(h, bd2).to_json())
    return {"roundtrips": results, "ok": all(results.values())}


CRITERIA = [
    (1, "stabilization soundness", check_stabilization),
    (2, "constant-slope obstruction", check_constant_slope),
    (3, "delta oracle", check_delta),
    (4, "helicity", check_helicity),
    (5, "length calculus", check_length),
    (6, "short-homotopy cobordism", check_cobordism),
    (7, "monotone and winding", check_monotone),
    (8, "Morse-Bott", check_morse_bott),
    (9, "energies", check_energies),
    (10, "classification", check_classification),
    (11, "embedding", check_embedding),
    (12, "round trips", check_roundtrip),
]


def run(ids=None, log=None) -> list:
    """Run the selected checks; ``log(id, name, seconds)`` receives timings."""
    out = []
    for k, name, fn in CRITERIA:
        if ids and k not in ids:
            continue
        t0 = time.perf_counter()
        res = fn()
        if log is not None:
            log(k, name, time.perf_counter() - t0)
        out.append({"id": k, "name": name, **res})
    return out


__all__ = ["CRITERIA", "run", "example_length", "mb_pair", "short_homotopies", "classification_pairs"]
