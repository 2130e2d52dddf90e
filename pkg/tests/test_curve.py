import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shskit import catalog
from shskit.curve import (
    CircleCurve,
    HermiteCurve,
    combine,
    contact_sign,
    curve_from_json,
    origin_winding,
    poly,
    reparametrize,
    slope,
    standard,
    twist_report,
    winding,
)
from shskit.errors import DomainError, ImmersionError, MalformedInputError

coef = st.floats(-3, 3, allow_nan=False)


def test_eval_examples():
    h = standard()
    assert np.allclose(h.eval(0.5, 1), (1.0, -1.0))
    assert np.allclose(h.eval(0.5, 0), (0.25, 0.75))
    q = poly((0.0, 1.0), [0, 1], [0, 0, 0.5])
    assert np.allclose(q.eval(0.25, 2), (0.0, 1.0))


@given(st.lists(coef, min_size=4, max_size=4), st.lists(coef, min_size=4, max_size=4))
def test_hermite_reproduces_cubics(cx, cy):
    # a cubic sampled at the nodes must be reproduced exactly, derivatives included
    p = [np.polynomial.Polynomial(cx), np.polynomial.Polynomial(cy)]
    nodes = np.array([0.0, 0.3, 0.55, 1.0])
    h = HermiteCurve(nodes, np.stack([q(nodes) for q in p], 1), np.stack([q.deriv()(nodes) for q in p], 1), eta=0.0)
    r = np.linspace(0, 1, 37)
    for order in (0, 1, 2):
        want = np.stack([q.deriv(order)(r) for q in p], 1)
        assert np.allclose(h._eval(r, order), want, atol=1e-10)


def test_hermite_derivative_matches_difference_quotient():
    rng = np.random.default_rng(3)
    nodes = np.linspace(0, 1, 9)
    h = HermiteCurve(nodes, rng.normal(size=(9, 2)), rng.normal(size=(9, 2)), eta=0.0)
    r = np.linspace(0.013, 0.987, 50)  # off the nodes, where h'' jumps
    step = 1e-6
    fd = (h._eval(r + step, 0) - h._eval(r - step, 0)) / (2 * step)
    assert np.allclose(fd, h._eval(r, 1), atol=1e-7)


def test_slope_examples():
    s = slope(standard(), 0.3)
    assert np.allclose(s.direction, np.array([1, -1]) / math.sqrt(2))
    assert s.rational_tag == (1, -1)
    s = slope(poly((0.0, 1.0), [0, 1], [0, math.sqrt(2)]), 0.4, Q=50)
    assert s.rational_tag is None
    s = slope(poly((0.0, 1.0), [0, 1], [0, 0, 0.5]), 0.5)
    assert s.rational_tag == (2, 1)


def test_winding_examples():
    assert winding(standard()) == pytest.approx(0.0, abs=1e-12)
    assert winding(CircleCurve()) == pytest.approx(1.0, abs=1e-12)


def test_exotic_turning_and_origin_winding():
    h = catalog.make_named("exotic").h
    # regularly homotopic to h_st: the turning is unchanged, the winding around 0 drops
    assert winding(h) == pytest.approx(0.0, abs=1e-6)
    assert origin_winding(h) + 0.25 == pytest.approx(-1.0, abs=1e-6)


def test_contact_sign_examples():
    h = standard((0.1, 0.9))
    assert contact_sign(h) == "positive"
    assert contact_sign(combine([(-1.0, h)])) == "positive"
    assert contact_sign(catalog.make_named("twist").h) == "mixed"


def test_twist_report_examples():
    assert twist_report(standard(), 0.05) == {**twist_report(standard(), 0.05), "twists": False, "nowhere_constant": False}
    rep = twist_report(catalog.make_named("twist").h, 0.01)
    assert rep["twists"] and rep["nowhere_constant"]
    rep = twist_report(CircleCurve(turns=0.5), 0.05)
    assert not rep["twists"] and rep["nowhere_constant"]


def test_combine_examples():
    h = standard()
    r = np.linspace(0, 1, 11)
    assert np.allclose(combine([(0.5, h), (0.5, h)])._eval(r, 0), h._eval(r, 0))
    assert np.allclose(combine([(1.0, h), (-1.0, h)])._eval(r, 0), 0.0)


@given(st.floats(0.2, 5.0), st.floats(-2.0, 2.0))
def test_reparametrize_composes(scale, shift):
    rng = np.random.default_rng(7)
    nodes = np.linspace(0, 1, 6)
    h = HermiteCurve(nodes, rng.normal(size=(6, 2)), rng.normal(size=(6, 2)), eta=0.0)
    k = reparametrize(h, scale, shift)
    a, b = k.interval
    r = np.linspace(a, b, 13)
    assert np.allclose(k._eval(r, 0), h._eval(scale * r + shift, 0))
    assert np.allclose(k._eval(r, 1), scale * h._eval(scale * r + shift, 1))


def test_json_roundtrip_is_exact():
    for name in ("twist", "overtwisted", "s3_canonical", "exotic"):
        c = catalog.make_named(name).h
        d = curve_from_json(c.to_json())
        r = c.grid(129)
        assert np.array_equal(c._eval(r, 0), d._eval(r, 0))
        assert np.array_equal(c._eval(r, 1), d._eval(r, 1))


def test_malformed_and_domain_errors():
    with pytest.raises(MalformedInputError):
        HermiteCurve([0.0], [[0, 0]], [[1, 0]])
    with pytest.raises(DomainError):
        HermiteCurve([0.0, 0.0], [[0, 0], [1, 0]], [[1, 0], [1, 0]])
    with pytest.raises(ImmersionError):
        slope(poly((0.0, 1.0), [0, 0], [0, 0]), 0.5)
