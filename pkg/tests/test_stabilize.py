import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shskit import catalog, shs
from shskit import samples as S
from shskit import stabilize as B
from shskit.curve import CircleCurve, HermiteCurve, SpecialStabilizer, combine, pairing, poly, standard, winding
from shskit.errors import NotSynthesizableError, ObstructionError, ParameterError
from shskit.shs import ShsPair


def mb_curve():
    return poly((0.0, 1.0), [0, 1], [0, 0, 0.5])


def interior_bump(scale, seed, lo=0.3, hi=0.7, nodes=33):
    rng = np.random.default_rng(seed)
    r = np.linspace(0, 1, nodes)
    m = ((r > lo) & (r < hi)).astype(float)[:, None]
    return HermiteCurve(r, scale * m * rng.normal(size=(nodes, 2)), scale * m * rng.normal(size=(nodes, 2)), eta=0.0)


def interior_loop():
    """Added to a curve of speed about 2r, a full circle of radius 0.1 traced on
    [0.4, 0.6] makes the sum turn once more."""
    r = np.linspace(0, 1, 129)
    u = np.clip((r - 0.4) / 0.2, 0, 1)
    ang = 2 * math.pi * u * u * u * (10 - 15 * u + 6 * u * u)
    dang = 2 * math.pi * 30 * u * u * (1 - u) ** 2 / 0.2
    v = 0.1 * np.stack([np.sin(ang), 1 - np.cos(ang)], 1)
    dv = 0.1 * dang[:, None] * np.stack([np.cos(ang), np.sin(ang)], 1)
    return HermiteCurve(r, v, dv, eta=0.0)


def test_special_examples():
    h = standard()
    g = B.special_stabilizer(h, 1.0)
    r = np.linspace(0.05, 1, 20)
    assert np.allclose(g._eval(r, 0), np.array([1, 1]) / math.sqrt(2))
    c = CircleCurve()
    g = B.special_stabilizer(c, 2.0)
    assert np.allclose(g._eval(r, 0), -2 * c._eval(r, 0))
    with pytest.raises(ParameterError):
        B.special_stabilizer(h, 0.0)


@given(st.integers(0, 10_000), st.floats(0.1, 10))
def test_special_pairing_is_c_speed(seed, c):
    h = S.random_immersion(np.random.default_rng(seed))
    g = B.special_stabilizer(h, c)
    r = h.grid(257)
    assert np.allclose(pairing(g._eval(r, 0), h._eval(r, 1)), c * np.hypot(*h._eval(r, 1).T))
    assert shs.verify(ShsPair(h, g))["ok"]


def test_constant_slope_examples():
    h = standard()
    bd = B.BoundaryData.from_solution(h, 0.1)
    g = B.constant_slope_stabilizer(h, bd, 0.05)
    assert shs.verify(ShsPair(h, g))["ok"]
    r = np.concatenate([np.linspace(0, 0.05, 9), np.linspace(0.95, 1, 9)])
    assert np.allclose(g._eval(r, 0), h._eval(r, 0))
    k = np.array([1, -1]) / math.sqrt(2)
    ik = np.array([1, 1]) / math.sqrt(2)
    left = B.SpecialStabilizer(h, 1.0)
    right = B.SpecialStabilizer(h, 2.0)
    with pytest.raises(ObstructionError):
        B.constant_slope_stabilizer(h, B.BoundaryData(left, right, 0.1), 0.05)
    assert np.allclose(left._eval(np.array([0.5]), 0), ik)
    assert abs(k @ ik) < 1e-15


def test_constant_slope_blend_of_global_solution():
    h = standard()
    g0 = combine([(1.0, h), (1.0, SpecialStabilizer(h, 0.5))])
    g = B.constant_slope_stabilizer(h, B.BoundaryData.from_solution(g0, 0.1), 0.05)
    assert shs.verify(ShsPair(h, g))["ok"]


def test_boundary_value_examples():
    h = mb_curve()
    bd = B.BoundaryData.from_solution(SpecialStabilizer(h, 1.0), 0.1)
    g = B.boundary_value_stabilizer(h, bd)
    assert shs.verify(ShsPair(h, g))["residual_sup"] < 1e-7
    r = np.concatenate([np.linspace(0, 0.1, 9), np.linspace(0.9, 1, 9)])
    assert np.allclose(g._eval(r, 0), bd.left._eval(r, 0), atol=1e-12)
    bd2 = B.BoundaryData(SpecialStabilizer(h, 1.0), SpecialStabilizer(h, 2.0), 0.1)
    assert shs.verify(ShsPair(h, B.boundary_value_stabilizer(h, bd2)))["ok"]
    with pytest.raises(NotSynthesizableError):
        B.boundary_value_stabilizer(standard(), B.BoundaryData.from_solution(standard(), 0.1))


@given(st.integers(0, 10_000))
def test_boundary_value_random(seed):
    rng = np.random.default_rng(seed)
    h = S.random_immersion(rng)
    bd = S.random_boundary(h, rng)
    g = B.boundary_value_stabilizer(h, bd)
    rep = shs.verify(ShsPair(h, g))
    assert rep["ok"]
    a, b = h.interval
    r = np.linspace(a, a + bd.eps, 17)
    assert np.allclose(g._eval(r, 0), bd.left._eval(r, 0), atol=1e-12)


def test_stabilize_constant_family():
    h = mb_curve()
    bd = B.BoundaryData.from_solution(SpecialStabilizer(h, 1.0), 0.1)
    fam = B.stabilize_homotopy(lambda t: h, lambda t: bd, times=[0.0, 0.37, 1.0], n_grid=5)
    single = B.boundary_value_stabilizer(h, bd)
    r = np.linspace(0, 1, 65)
    for _, g in fam:
        assert np.allclose(g._eval(r, 0), single._eval(r, 0), atol=1e-12)


def test_stabilize_perturbation_is_linear_in_xi():
    # |g_dot|_C1 scales with |xi|_C1, the perturbation estimate; at t = 0 both
    # families share h_0 = h and hence one construction plan
    h = mb_curve()
    bd = B.BoundaryData.from_solution(SpecialStabilizer(h, 1.0), 0.1)
    r = np.linspace(0, 1, 257)
    rates = []
    for scale in (0.005, 0.01):
        xi = interior_bump(scale, 4)
        hs = lambda t, xi=xi: combine([(1.0, h), (t, xi)])
        (_, g0), (_, g1) = B.stabilize_homotopy(hs, lambda t: bd, times=[0.0, 1e-5], n_grid=5)
        dot = max(np.max(np.abs(g1._eval(r, o) - g0._eval(r, o))) for o in (0, 1)) / 1e-5
        xn = max(np.max(np.abs(xi._eval(r, o))) for o in (0, 1))
        rates.append(dot / xn)
    assert rates[1] == pytest.approx(rates[0], rel=1e-3)
    assert rates[0] < 1e3


def test_stabilize_reversed_time():
    h = mb_curve()
    xi = interior_bump(0.02, 5)
    bd = B.BoundaryData.from_solution(SpecialStabilizer(h, 1.0), 0.1)
    hs = lambda t: combine([(1.0, h), (t, xi)])
    fwd = B.stabilize_homotopy(hs, lambda t: bd, times=[0.25], n_grid=5)
    bwd = B.stabilize_homotopy(lambda t: hs(1 - t), lambda t: bd, times=[0.75], n_grid=5)
    r = np.linspace(0, 1, 65)
    assert np.allclose(fwd[0][1]._eval(r, 0), bwd[0][1]._eval(r, 0), atol=1e-12)


def test_connect_examples():
    h = standard()
    bd = B.BoundaryData.from_solution(SpecialStabilizer(h, 1.0), 0.1)
    # h_st itself has constant slope; perturb it in the interior first
    h0 = combine([(1.0, h), (1.0, interior_bump(0.05, 1))])
    h1 = combine([(1.0, h), (1.0, interior_bump(0.05, 2))])
    assert winding(h0) == pytest.approx(winding(h1), abs=1e-9)
    gamma = B.connect_same_winding(h0, h1, bd, n=9)
    for p in gamma.pairs:
        assert shs.verify(p)["ok"]
    same = B.connect_same_winding(h0, h0, bd, n=3)
    assert all(p.h is h0 for p in same.pairs)
    # same germs, one extra interior loop: the turning differs by one
    loop = combine([(1.0, h0), (1.0, interior_loop())])
    assert winding(loop) == pytest.approx(winding(h0) + 1, abs=1e-6)
    with pytest.raises(ObstructionError):
        B.connect_same_winding(h0, loop, bd)


def test_connect_exotic_is_obstructed():
    h0 = standard(scale=0.5)
    ex = catalog.make_named("exotic").h
    bd = B.BoundaryData.from_solution(SpecialStabilizer(h0, 1.0), 0.05)
    # turning numbers agree, but the germs differ: a precondition, not an obstruction
    with pytest.raises(Exception):
        B.connect_same_winding(h0, ex, bd)
