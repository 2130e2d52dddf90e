import re
from pathlib import Path

import numpy as np
import pytest

from shskit import catalog as K
from shskit.curve import standard
from shskit.errors import ParameterError
from shskit.render import SAMPLES, Marker, RenderSpec, render

GOLDEN = Path(__file__).parent / "golden" / "standard_twist.svg"


def golden_inputs():
    curves = [standard(), K.make_named("twist").h]
    return curves, RenderSpec(title="h_st and twist", markers=[Marker(0, 0.5, "r=1/2")])


def path_points(svg: str) -> list:
    out = []
    for d in re.findall(r'd="M ([^"]+)"', svg):
        out.append(np.array([[float(v) for v in seg.split()] for seg in d.split(" L ")]))
    return out


def test_golden():
    curves, spec = golden_inputs()
    assert render(curves, spec) == GOLDEN.read_text()


def test_paths_follow_curves():
    # with a fixed viewport the pixel map is explicit, so each vertex can be checked
    curves = [standard(), standard(scale=0.5)]
    spec = RenderSpec(width=200, height=100, viewport=(-1.0, 1.0, 0.0, 1.0))
    pts = path_points(render(curves, spec))
    assert len(pts) == 2
    for c, p in zip(curves, pts):
        v = c._eval(np.linspace(*c.interval, SAMPLES), 0)
        X, Y = (v[:, 0] + 1.0) / 2.0 * 200, (1.0 - v[:, 1]) * 100
        assert np.max(np.abs(p - np.stack([X, Y], axis=1))) <= 0.005 + 1e-9


def test_empty_and_deterministic():
    svg = render([])
    assert svg.startswith("<?xml") and "<path" not in svg
    curves, spec = golden_inputs()
    assert render(curves, spec) == render(curves, spec)


def test_styles_and_escaping():
    spec = RenderSpec(styles=[{"stroke": "#ff0000", "dash": "3 3"}], title="a < b & c")
    svg = render([standard()], spec)
    assert 'stroke="#ff0000"' in svg and 'stroke-dasharray="3 3"' in svg
    assert "<title>a &lt; b &amp; c</title>" in svg


@pytest.mark.parametrize(
    "spec",
    [
        RenderSpec(width=0),
        RenderSpec(viewport=(1.0, 0.0, 0.0, 1.0)),
        RenderSpec(markers=[Marker(3, 0.5, "x")]),
    ],
)
def test_bad_specs(spec):
    with pytest.raises(ParameterError):
        render([standard()], spec)


def test_rejects_non_curves():
    with pytest.raises(ParameterError):
        render([np.zeros((3, 2))])
