import re

import pytest

from fivevertex.model import LatticeSpec, enumerate_configurations, ferroelectric_configuration
from fivevertex.render import Style, path_points, render


def polylines(svg: bytes) -> list[list[tuple[float, float]]]:
    out = []
    for pts in re.findall(rb'<polyline points="([^"]*)"', svg):
        out.append([tuple(map(float, p.split(b","))) for p in pts.split()])
    return out


def test_single_path_small():
    spec = LatticeSpec(1, 1, 2)
    (conf,) = enumerate_configurations(spec)
    lines = polylines(render(conf, spec, "svg"))
    assert len(lines) == 1
    # up from the bottom edge, right along row 1, up through the top edge
    assert path_points(conf, spec, 0) == [(1.0, 0.5), (1.0, 1.0), (2.0, 1.0), (2.0, 1.5)]
    assert len(lines[0]) - 1 == 3


def test_one_polyline_per_path():
    spec = LatticeSpec(3, 5, 6)
    conf = next(enumerate_configurations(spec))
    assert len(polylines(render(conf, spec))) == 3


@pytest.mark.parametrize("fmt", ["svg", "ppm"])
def test_deterministic(fmt):
    spec = LatticeSpec(2, 4, 5)
    conf = list(enumerate_configurations(spec))[7]
    style = Style(cell=9, color_vertices=True)
    assert render(conf, spec, fmt, style) == render(conf, spec, fmt, style)


def test_dimensions_scale():
    for spec in (LatticeSpec(2, 4, 5), LatticeSpec(2, 8, 10), LatticeSpec(1, 3, 7)):
        conf = ferroelectric_configuration(spec)
        svg = render(conf, spec, "svg", Style(cell=10))
        w, h = map(int, re.search(rb'width="(\d+)" height="(\d+)"', svg).groups())
        assert (w, h) == (10 * spec.L, 10 * spec.M)
        ppm = render(conf, spec, "ppm", Style(cell=4))
        header = ppm.split(b"\n", 3)
        assert header[0] == b"P6" and header[1] == f"{4 * spec.L} {4 * spec.M}".encode()
        assert len(header[3]) == 3 * 16 * spec.L * spec.M


def test_bad_format():
    spec = LatticeSpec(1, 1, 2)
    (conf,) = enumerate_configurations(spec)
    with pytest.raises(ValueError):
        render(conf, spec, "png")
