import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shskit import numerics as nx
from shskit.errors import NumericalError


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=6), st.floats(-1, 1), st.floats(0.1, 2))
def test_simpson_exact_antiderivative(c, a, span):
    p = np.polynomial.Polynomial(c)
    b = a + span
    want = p.integ()(b) - p.integ()(a)
    assert nx.adaptive_simpson(p, a, b, 1e-11) == pytest.approx(want, abs=1e-9)


def test_simpson_reversed_and_empty():
    assert nx.adaptive_simpson(np.cos, 1.0, 0.0) == pytest.approx(-math.sin(1.0), abs=1e-9)
    assert nx.adaptive_simpson(np.cos, 0.3, 0.3) == 0.0


def test_simpson_jump_at_break():
    # integrand that jumps at a declared break
    f = lambda r: np.where(r < 0.3, 1.0, 5.0)
    assert nx.adaptive_simpson(f, 0.0, 1.0, breaks=[0.3]) == pytest.approx(0.3 + 3.5, abs=1e-12)


def test_simpson_reports_failure():
    with pytest.raises(NumericalError):
        nx.adaptive_simpson(lambda r: np.sign(np.sin(1 / (r + 1e-300))), 0.0, 1.0, max_depth=6)


def test_cumulative_integral_matches_antiderivative():
    ci = nx.CumulativeIntegral(lambda s: np.stack([np.cos(s), 2 * s], 1), 0.0, 2.0, 0.5, breaks=[1.0])
    r = np.linspace(0, 2, 17)
    want = np.stack([np.sin(r) - math.sin(0.5), r * r - 0.25], 1)
    assert np.allclose(ci(r), want, atol=1e-12)


def test_bisect_roots_vectorized():
    roots = nx.bisect_roots(lambda x: x * x - 2.0, [0.0, -2.0], [2.0, 0.0])
    assert np.allclose(roots, [math.sqrt(2), -math.sqrt(2)], atol=1e-9)
    with pytest.raises(NumericalError):
        nx.bisect_roots(lambda x: x * x + 1, [0.0], [1.0])


def test_zoom_min():
    x, v = nx.zoom_min(lambda s: (s - 0.3) ** 2 + 1, 0.0, 1.0)
    assert x == pytest.approx(0.3, abs=1e-7) and v == pytest.approx(1.0, abs=1e-14)
    # a boundary minimum is found too
    x, v = nx.zoom_min(lambda s: s, 0.2, 1.0)
    assert x == 0.2
    # one-sided limit at a jump: the infimum is approached from the right of 0.5
    x, v = nx.zoom_min(lambda s: np.where(s <= 0.5, 1.0, s), 0.0, 1.0)
    assert v == pytest.approx(0.5, abs=1e-7)


@given(st.integers(-20, 20), st.integers(-20, 20))
def test_rational_tag_recovers_directions(p, q):
    if p == q == 0:
        return
    g = math.gcd(p, q)
    tag = nx.rational_tag((p / math.hypot(p, q), q / math.hypot(p, q)), 64)
    assert tag == (p // g, q // g)


def test_rational_tag_rejects_irrational():
    assert nx.rational_tag((1.0, math.sqrt(2)), 50) is None


def test_coprime_directions_count():
    # directions (p, q) with |p|, |q| <= Q and gcd 1: compare with a direct count
    Q = 7
    dirs = {tuple(d) for d in nx.coprime_directions(Q)}
    want = {(p, q) for p in range(-Q, Q + 1) for q in range(-Q, Q + 1) if math.gcd(p, q) == 1}
    assert dirs == want


def test_shoelace_unit_square():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]], dtype=float)
    assert nx.shoelace_area(sq) == pytest.approx(1.0)
    assert nx.shoelace_area(sq[::-1]) == pytest.approx(-1.0)


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("SHSKIT_THREADS", "3")
    assert nx.thread_count() == 3
    monkeypatch.setenv("SHSKIT_THREADS", "0")
    assert nx.thread_count() == 1
    assert nx.parallel_map(lambda v: v * v, [1, 2, 3]) == [1, 4, 9]
