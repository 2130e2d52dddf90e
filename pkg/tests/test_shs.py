import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shskit import catalog, shs
from shskit import samples as S
from shskit.curve import SpecialStabilizer, constant, pairing, poly, standard
from shskit.errors import PreconditionError
from shskit.shs import ShsPair


def _trapezoid(v, r):
    return float(np.sum(0.5 * (v[1:] + v[:-1]) * np.diff(r)))


def mb_curve():
    return poly((0.0, 1.0), [0, 1], [0, 0, 0.5])


def test_verify_examples():
    h = standard((0.1, 0.9))
    rep = shs.verify(ShsPair(h, h))
    assert rep["ok"] and rep["residual_sup"] < 1e-12
    rep = shs.verify(ShsPair(h, constant(h.interval, (1 / math.sqrt(2), 1 / math.sqrt(2)))))
    assert rep["ok"] and rep["residual_sup"] == 0.0
    r0 = 0.1 + 0.8 / 512  # first interior grid point
    assert rep["min_pairing"] == pytest.approx(2 * math.sqrt(2) * r0, rel=1e-12)
    assert shs.verify(ShsPair(h, constant(h.interval, (0.0, 1.0))))["ok"]
    assert not shs.verify(ShsPair(h, constant(h.interval, (-1 / math.sqrt(2), -1 / math.sqrt(2)))))["ok"]


def test_proportionality_examples():
    h = standard((0.1, 0.9))
    p = shs.proportionality(ShsPair(h, h))
    assert p["constant"] and p["min"] == pytest.approx(1.0)
    p = shs.proportionality(ShsPair(h, SpecialStabilizer(h, 1.0)))
    assert p["constant"] and abs(p["max"]) < 1e-12
    p = shs.proportionality(ShsPair(h, standard((0.1, 0.9), scale=2.0)))
    assert p["min"] == pytest.approx(2.0) and p["max"] == pytest.approx(2.0)


def test_delta_examples():
    h = standard((0.1, 0.9))
    assert shs.delta_bounds(ShsPair(h, h)) == (pytest.approx(1.0), math.inf)
    assert shs.delta_bounds(ShsPair(h, SpecialStabilizer(h, 1.0))) == (math.inf, math.inf)
    assert shs.delta_from_range(-2.0, 3.0) == (pytest.approx(1 / 3), pytest.approx(1 / 2))


@given(st.integers(0, 10_000))
def test_delta_against_grid_oracle(seed):
    pair = S.random_special_pair(np.random.default_rng(seed))
    dm, dp = shs.delta_bounds(pair)
    # nothing is exempt, so the closed interval counts; f jumps at spline
    # nodes, so sample both one-sided limits there as well
    a, b = pair.interval
    br = pair.h.breaks()
    r = np.unique(np.clip(np.concatenate([np.linspace(a, b, 4097), np.nextafter(br, -np.inf), np.nextafter(br, np.inf)]), a, b))
    dh, dg = pair.h._eval(r, 1), pair.g._eval(r, 1)
    f = np.sum(dg * dh, 1) / np.sum(dh * dh, 1)
    # omega + t d(lambda) = (1 + t f) omega: nondegenerate just below each bound,
    # degenerate somewhere just above it
    for sgn, d in ((1.0, dp), (-1.0, dm)):
        if math.isinf(d):
            assert np.all(sgn * f >= 0)
            continue
        assert np.all(1 + sgn * 0.999 * d * f > 0)
        assert np.any(1 + sgn * 1.001 * d * f <= 0)


def test_helicity_examples():
    assert shs.curve_helicity(standard()) == pytest.approx(1.0, abs=1e-12)
    h0 = poly((0.0, 1.0), [0, 1], [0])
    h1 = poly((0.0, 1.0), [0, 1], [0, 1, -1])
    d = shs.helicity_difference(h0, h1)
    assert d["delta_Hc"] == pytest.approx(1 / 3, abs=1e-12)
    h = standard()
    assert shs.helicity_data(ShsPair(h, constant(h.interval, (0.5, 0.5))))["Q2"] == 0.0


def test_helicity_matches_trapezoid_oracle(rng):
    h = S.random_immersion(rng)
    r = np.linspace(0, 1, 200_001)
    v = pairing(h._eval(r, 0), h._eval(r, 1))
    assert shs.curve_helicity(h) == pytest.approx(_trapezoid(v, r), abs=1e-8)


def test_reeb_examples():
    h = standard()
    assert np.allclose(shs.reeb_field(ShsPair(h, h), 0.5), (1.0, 1.0))
    pair = ShsPair(mb_curve(), SpecialStabilizer(mb_curve(), 1.0))
    assert np.allclose(shs.reeb_field(pair, 0.5), np.array([-0.5, 1.0]) * 2 / math.sqrt(5))
    r = np.random.default_rng(0).uniform(0, 1, 100)
    R = shs.reeb_values(pair, r)
    assert np.allclose(np.sum(pair.g._eval(r, 0) * R, 1), 1.0)


def test_closed_orbit_examples():
    pair = ShsPair(mb_curve(), SpecialStabilizer(mb_curve(), 1.0))
    o = shs.closed_orbit(pair, 0.5)
    assert (o.T, o.E_lambda, o.E_omega) == (pytest.approx(math.sqrt(5)), pytest.approx(math.sqrt(5)), pytest.approx(-0.25))
    h = standard()
    o = shs.closed_orbit(ShsPair(h, h), 0.5)
    assert (o.T, o.E_lambda, o.E_omega) == (pytest.approx(1.0), pytest.approx(1.0), pytest.approx(1.0))
    with pytest.raises(PreconditionError):
        q = poly((0.0, 1.0), [0, 1], [0, math.sqrt(2)])
        shs.closed_orbit(ShsPair(q, SpecialStabilizer(q, 1.0)), 0.5, Q=50)


def test_flow_closes_after_period():
    pair = ShsPair(mb_curve(), SpecialStabilizer(mb_curve(), 1.0))
    o = shs.closed_orbit(pair, 0.5)
    _, th, ph = shs.flow(pair, 0.5, 0.1, 0.2, o.T)
    assert th - 0.1 == pytest.approx(round(th - 0.1), abs=1e-12)
    assert ph - 0.2 == pytest.approx(round(ph - 0.2), abs=1e-12)


def test_linearized_return_examples():
    pair = ShsPair(mb_curve(), SpecialStabilizer(mb_curve(), 1.0))
    lr = shs.linearized_return(pair, 0.5)
    M = lr["matrix"]
    assert lr["kernel_dim"] == 2 and np.linalg.det(M) == pytest.approx(1.0)
    assert abs(M[1, 0]) > 0 and abs(M[2, 0]) > 0
    # dk against finite differences of k = h'/D
    k = lambda r: shs.k_functions(pair, np.array([r]))[0][0]
    fd = (k(0.5 + 1e-6) - k(0.5 - 1e-6)) / 2e-6
    assert np.allclose(fd, lr["dk"], atol=1e-7)
    h = standard()
    assert shs.linearized_return(ShsPair(h, h), 0.5)["kernel_dim"] == 3


def test_census_examples():
    c = shs.rational_census(poly((0.1, 0.9), [0, 1], [0, 0, 0.5]), Q=3)
    got = [(round(r, 9), t) for r, t in c.points]
    assert got == [(round(1 / 3, 9), (3, 1)), (0.5, (2, 1)), (round(2 / 3, 9), (3, 2))]
    c = shs.rational_census(standard(), Q=8)
    assert not c.points and len(c.bands) == 1 and c.bands[0][2] == (1, -1)
    q = poly((0.0, 1.0), [0, 1], [0, math.sqrt(2)])
    c = shs.rational_census(q, Q=64)
    assert not c.points and not c.bands


def test_census_against_farey_oracle():
    # slope direction of (r, r^2/2) is (1, r): rational tori at r = q/p
    Q = 12
    c = shs.rational_census(poly((0.05, 0.95), [0, 1], [0, 0, 0.5]), Q=Q)
    want = sorted({q / p for p in range(1, Q + 1) for q in range(1, p) if math.gcd(p, q) == 1 and 0.05 < q / p < 0.95})
    assert np.allclose([r for r, _ in c.points], want, atol=1e-9)


def test_morse_bott_examples():
    pair = ShsPair(mb_curve(), SpecialStabilizer(mb_curve(), 1.0))
    rep = shs.morse_bott_check(pair)
    assert rep.verdict == "morse_bott"
    assert all(d == pytest.approx(-1.0) for _, _, d in rep.witnesses)
    q = poly((0.0, 1.0), [0, 1], [0, math.sqrt(2)])
    assert shs.morse_bott_check(ShsPair(q, SpecialStabilizer(q, 1.0))).verdict == "vacuous"
    h = standard()
    rep = shs.morse_bott_check(ShsPair(h, h))
    assert rep.bands and rep.bands[0][2] == (1, -1)


def test_tameness_examples():
    h = standard((0.1, 0.9))
    scan = shs.tameness_scan(ShsPair(h, h), Q=16)
    assert not scan["zeros_of_alpha_R"]
    assert all(x == pytest.approx(1.0) for _, x in scan["ratio_table"])
    scan = shs.tameness_scan(catalog.make_named("twist"))
    assert scan["zeros_of_alpha_R"]
    assert max(x for _, x in scan["ratio_table"]) > 1e3
    pair = catalog.make_named("nontame")
    assert abs(shs.closed_orbit(pair, 0.5).E_omega) < 1e-9


def test_pair_json_roundtrip():
    pair = catalog.make_named("overtwisted")
    q = ShsPair.from_json(pair.to_json())
    assert shs.verify(q) == shs.verify(pair)
