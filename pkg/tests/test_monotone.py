import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shskit import monotone as M
from shskit.curve import combine, origin_winding, poly, standard
from shskit.errors import DomainError, MalformedInputError, ParameterError


def lifting_line() -> M.MonotonePath:
    """h_t(r) = (r, t) on t in [0, 1]."""
    iv = (0.0, 1.0)
    return M.MonotonePath([0.0, 1.0], [poly(iv, [0, 1], [0]), poly(iv, [0, 1], [1])])


def test_lifting_line():
    rep = M.monotone_check(lifting_line())
    assert rep["ok"]
    assert rep["min_density"] == pytest.approx(1.0, abs=1e-12)
    assert rep["min_volume_density"] == pytest.approx(2.0, abs=1e-12)
    assert rep["crossings"] == []
    # h_0(0) is the origin, a corner of the (t, r) domain
    assert rep["boundary_zeros"] == [{"t": 0.0, "r": 0.0}]
    _, _, dens = M.density_grid(lifting_line())
    assert np.max(np.abs(2 * dens - 2.0)) < 1e-12


def test_reversed_is_negative():
    path = lifting_line()
    rep = M.monotone_check(path.reversed())
    assert not rep["ok"]
    assert rep["min_volume_density"] == pytest.approx(-2.0, abs=1e-12)
    _, _, d0 = M.density_grid(path)
    _, _, d1 = M.density_grid(path.reversed())
    assert np.max(np.abs(d1[::-1] + d0)) < 1e-12


def test_density_matches_direct_formula():
    # second evaluation path: 2 (h1' h2-dot - h2' h1-dot) from curve_at and central differences in t
    rng = np.random.default_rng(11)
    iv = (0.0, 1.0)
    curves = [poly(iv, rng.normal(size=3), rng.normal(size=3) + [2, 1, 0]) for _ in range(3)]
    path = M.MonotonePath([0.0, 0.5, 1.0], curves, check=False)
    ts, r, dens = M.density_grid(path)
    for t, row in zip(ts, dens):
        if t in path.ts:
            continue
        dt = 1e-7
        hdot = (path.curve_at(t + dt)._eval(r, 0) - path.curve_at(t - dt)._eval(r, 0)) / (2 * dt)
        dh = path.curve_at(t)._eval(r, 1)
        direct = 2 * (dh[:, 0] * hdot[:, 1] - dh[:, 1] * hdot[:, 0])
        assert np.max(np.abs(direct - 2 * row)) < 1e-6


def test_exotic_path():
    path = M.exotic_ball_path()
    rep = M.monotone_check(path)
    assert rep["ok"] and rep["min_density"] > 0
    assert len(rep["crossings"]) == 1
    cross = rep["crossings"][0]
    assert cross["transversal"] and cross["winding_change"] == -1
    assert path.standardized
    assert M.standardized_winding(path.curves[0]) == pytest.approx(0.0, abs=1e-6)
    assert M.standardized_winding(path.curves[-1]) == pytest.approx(-1.0, abs=1e-6)


def test_exotic_start_is_half_standard():
    h0 = M.exotic_ball_path().curves[0]
    r = np.linspace(0.0, 1.0, 9)
    assert np.max(np.abs(h0._eval(r, 0) - 0.5 * standard()._eval(r, 0))) < 1e-12
    r = np.linspace(0.0, 1.0, 1001)
    assert np.max(np.abs(h0._eval(r, 0) - 0.5 * standard()._eval(r, 0))) < 1e-9


def test_winding_obstruction_examples():
    ex, h = M.exotic_curve(), standard()
    assert M.winding_obstruction(ex, standard(scale=2.0))["verdict"] == "obstructed"
    assert M.winding_obstruction(h, ex)["verdict"] == "admissible"
    assert M.winding_obstruction(h, h)["verdict"] == "admissible"


@given(st.floats(0.3, 3.0), st.floats(0.3, 3.0))
def test_scaling_path_keeps_winding(c0, c1):
    # rescaling h_st never passes through the origin, so the winding is fixed
    path = M.MonotonePath([0.0, 1.0], [standard(scale=c0), standard(scale=c1)])
    rep = M.monotone_check(path)
    assert rep["crossings"] == []
    assert rep["ok"] == (c1 > c0)
    w = [M.standardized_winding(c) for c in path.curves]
    assert abs(w[0] - w[1]) < 1e-6


def test_hermite_weights():
    s = np.linspace(0, 1, 11)
    (w0, w1, w2, w3), (d0, d1, d2, d3) = M._hermite_weights(s)
    assert np.allclose(w0 + w2, 1.0) and np.allclose(d0 + d2, 0.0)
    assert (w0[0], w1[0], w2[0], w3[0]) == (1.0, 0.0, 0.0, 0.0)
    assert (d1[0], d3[-1]) == (1.0, 1.0)
    # reproduces t^3 from values and slopes at 0 and 1
    assert np.allclose(w1 * 0 + w2 * 1 + w3 * 3, s**3)


def test_json_round_trip_with_velocities():
    path = M.exotic_ball_path()
    assert path.velocities is not None
    back = M.MonotonePath.from_json(json.loads(json.dumps(path.to_json())))
    r = np.linspace(0, 1, 65)
    for t in (0.13, 0.5, 0.91):
        assert np.max(np.abs(back.curve_at(t)._eval(r, 0) - path.curve_at(t)._eval(r, 0))) < 1e-14
    d = path.to_json()
    del d["samples"][0]["velocity"]
    with pytest.raises(MalformedInputError):
        M.MonotonePath.from_json(d)


def test_curve_at_matches_state():
    path = M.exotic_ball_path()
    r = np.linspace(0.05, 0.95, 33)
    j = 2
    t0, t1 = path.ts[j], path.ts[j + 1]
    h, _, _ = path.state(j, [0.3], r)
    assert np.max(np.abs(h[0] - path.curve_at(t0 + 0.3 * (t1 - t0))._eval(r, 0))) < 1e-12


def test_embedding():
    rep = M.embed_symplectization(standard((0.1, 0.9)))
    assert rep.residual < 1e-12 and rep.on_sphere_defect < 1e-12
    rep = M.embed_symplectization(standard(scale=2.0))
    assert np.max(np.abs(rep.s - 2.0)) < 1e-12 and rep.residual < 1e-12
    with pytest.raises(DomainError) as info:
        M.embed_symplectization(M.exotic_curve())
    assert "r" in info.value.details


def test_linear_path_and_errors():
    h0 = standard(scale=0.5)
    h1 = combine([(2.0, standard())])
    assert M.monotone_check(M.linear_path(h0, h1, 5))["ok"]
    with pytest.raises(ParameterError):
        M.MonotonePath([0.0], [h0])
    with pytest.raises(DomainError):
        M.MonotonePath([0.0, 1.0], [h0, standard((0.0, 2.0))])
    assert origin_winding(h0) == pytest.approx(-0.25, abs=1e-9)
