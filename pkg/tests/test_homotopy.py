import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shskit import homotopy as H
from shskit.curve import SpecialStabilizer, pairing, standard
from shskit.errors import DomainError, ParameterError, TooLongError
from shskit.samples import random_homotopy
from shskit.shs import ShsPair, delta_bounds


def growth(rate: float) -> H.StableHomotopy:
    """h fixed, g_t = (1 + rate t) g_0 on [0, 1]."""
    h = standard()
    return H.StableHomotopy(
        [0.0, 1.0], [ShsPair(h, SpecialStabilizer(h, 1.0)), ShsPair(h, SpecialStabilizer(h, 1.0 + rate))]
    )


def constant() -> H.StableHomotopy:
    h = standard()
    p = ShsPair(h, SpecialStabilizer(h, 1.0))
    return H.StableHomotopy([0.0, 1.0], [p, p])


def fd_B(gamma: H.StableHomotopy, n_t: int = 41, n_r: int = 257, dt: float = 1e-6) -> float:
    """Finite-difference estimate of max |<h_t-dot, h_t'>| / <g_t, i h_t'>."""
    r = gamma.r_grid(n_r)
    a, b = gamma.interval
    best = 0.0
    for t in np.linspace(a + 2 * dt, b - 2 * dt, n_t):
        p = gamma.pair_at(float(t))
        hdot = (gamma.pair_at(float(t) + dt).h._eval(r, 0) - gamma.pair_at(float(t) - dt).h._eval(r, 0)) / (2 * dt)
        dh = p.h._eval(r, 1)
        D = pairing(p.g._eval(r, 0), dh)
        best = max(best, float(np.max(np.abs(pairing(hdot, dh) / D))))
    return best


def test_growth_example():
    c = H.homotopy_constants(growth(1.0))
    assert c.A == pytest.approx(1.0, abs=1e-9)
    assert c.B == pytest.approx(0.0, abs=1e-12)
    assert c.L == pytest.approx(1.0, abs=1e-9)
    c = H.homotopy_constants(growth(0.1))
    assert c.A == pytest.approx(0.1, abs=1e-9)
    assert c.L == pytest.approx(0.1, abs=1e-9)


def test_constant_homotopy():
    gamma = constant()
    A, B, delta, L = H.homotopy_constants(gamma).astuple()
    assert (A, B, L) == (0.0, 0.0, 0.0)
    assert delta == pytest.approx(min(delta_bounds(gamma.pairs[0])), rel=1e-9)


@given(st.integers(0, 2**31 - 1))
def test_constants_against_oracles(seed):
    # special mode: <g-dot, h'> / <g, i h'> = c-dot / c, largest at t = 0
    rng = np.random.default_rng(seed)
    c_rate = float(rng.uniform(0, 0.3))
    gamma = random_homotopy(rng, float(rng.uniform(0, 0.3)), c_rate)
    c = H.homotopy_constants(gamma)
    assert c.A == pytest.approx(c_rate, abs=1e-9)
    assert c.B == pytest.approx(fd_B(gamma), rel=2e-2, abs=1e-6)
    assert c.L == pytest.approx(c.A + c.B / c.delta, rel=1e-12)


def test_rescale_lambda_keeps_L():
    gamma = random_homotopy(np.random.default_rng(3), 0.2, 0.2)
    L0 = H.homotopy_constants(gamma).L
    assert H.homotopy_constants(H.rescale_lambda(gamma, 2.0)).L == pytest.approx(L0, rel=1e-9)
    assert H.homotopy_constants(H.rescale_omega(gamma, 0.5)).L == pytest.approx(L0, rel=1e-9)


def test_restrict_bound():
    gamma = random_homotopy(np.random.default_rng(4), 0.2, 0.2)
    L0 = H.homotopy_constants(gamma).L
    assert H.homotopy_constants(H.restrict(gamma, 0.0, 0.5)).L <= 0.5 * L0 + 1e-9
    with pytest.raises(DomainError):
        H.restrict(gamma, -0.5, 0.5)


def test_reverse_twice():
    gamma = random_homotopy(np.random.default_rng(5), 0.2, 0.1)
    back = H.reverse(H.reverse(gamma))
    assert back is gamma
    rev = H.reverse(gamma)
    p, q = gamma.pair_at(0.3), rev.pair_at(0.7)
    r = p.grid(65)
    assert np.max(np.abs(p.h._eval(r, 0) - q.h._eval(r, 0))) < 1e-12


@given(st.floats(0.2, 5.0), st.floats(-2.0, 2.0))
def test_reparametrize_invariant(scale, shift):
    gamma = random_homotopy(np.random.default_rng(6), 0.2, 0.2)
    L0 = H.homotopy_constants(gamma).L
    L1 = H.homotopy_constants(H.reparametrize(gamma, scale, shift)).L
    assert L1 == pytest.approx(L0, rel=1e-9)


def test_transform_ops():
    gamma = random_homotopy(np.random.default_rng(7), 0.1, 0.1)
    H.transform(gamma, "reparametrize", 2.0, 1.0)
    H.transform(gamma, "rescale_lambda", 3.0)
    H.transform(gamma, "rescale_omega", 0.5)
    H.transform(gamma, "restrict", 0.25, 0.75)
    H.transform(gamma, "reverse")
    tail = H.reparametrize(H.reverse(gamma), 1.0, -1.0)
    out = H.transform(gamma, "concatenate", tail)
    assert out.interval == (0.0, 2.0)
    with pytest.raises(ParameterError):
        H.transform(gamma, "twist")
    with pytest.raises(DomainError):
        H.concatenate(gamma, gamma)


def test_split_short():
    pieces = H.split_short(growth(1.0), 1 / 3)
    assert len(pieces) >= 3
    assert all(H.homotopy_constants(p).L < 1 / 3 for p in pieces)
    for left, right in zip(pieces[:-1], pieces[1:]):
        assert left.interval[1] == right.interval[0]
    joined = pieces[0]
    for p in pieces[1:]:
        joined = H.concatenate(joined, p)
    assert joined.interval == (0.0, 1.0)
    assert len(H.split_short(constant(), 1 / 3)) == 1
    with pytest.raises(ParameterError):
        H.split_short(constant(), 0.0)


def test_cobordism_short():
    form = H.cobordism_from_short(growth(0.1))
    assert form.density.size >= 10**4
    assert form.min_density > 0
    assert np.all(np.abs(form.f(form.t)) < form.delta)
    lines = form.to_csv().splitlines()
    assert lines[0] == "t,r,density" and len(lines) == form.density.size + 1
    assert form.summary()["grid"] == list(form.density.shape)


def test_cobordism_constant_has_increasing_f():
    form = H.cobordism_from_short(constant())
    assert form.slope > 0
    assert np.all(np.diff(form.f(form.t)) > 0)
    assert form.min_density > 0


def test_cobordism_too_long():
    with pytest.raises(TooLongError) as info:
        H.cobordism_from_short(growth(2.0))
    assert "length ≥ 1" in str(info.value)


def test_triple_cobordism():
    form = H.triple_cobordism(growth(0.1))
    assert form.t[0] == 0.0 and form.t[-1] == 3.0
    assert form.min_density > 0
    assert [s["t"] for s in form.slices] == [0.0, 1.0, 2.0, 3.0]
    at2 = form.slices[2]
    # the slice at t = 2 is (omega_0, lambda_0 + f d-lambda) with |f| inside the delta window
    assert at2["tau"] == 0.0 and at2["ok"]
    assert -at2["delta_minus"] < at2["f"] < at2["delta_plus"]
    with pytest.raises(TooLongError):
        H.triple_cobordism(growth(0.4))


def test_json_round_trip():
    gamma = random_homotopy(np.random.default_rng(8), 0.1, 0.1)
    d = json.loads(json.dumps(gamma.to_json()))
    back = H.StableHomotopy.from_json(d)
    assert back.modes == gamma.modes
    c0, c1 = H.homotopy_constants(gamma), H.homotopy_constants(back)
    assert c1.L == pytest.approx(c0.L, rel=1e-12)
    assert H.verify_homotopy(back)["ok"]


def test_bad_construction():
    h = standard()
    p = ShsPair(h, SpecialStabilizer(h, 1.0))
    with pytest.raises(ParameterError):
        H.StableHomotopy([0.0], [p])
    with pytest.raises(ParameterError):
        H.StableHomotopy([1.0, 0.0], [p, p])
    # f vanishes for the standard pair, so delta is infinite and L stays 0
    c = H.homotopy_constants(H.StableHomotopy([0.0, 1.0], [p, p]))
    assert math.isinf(c.delta) and c.L == 0.0
