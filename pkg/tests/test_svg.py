import xml.etree.ElementTree as ET

import numpy as np

from prodprestige import svg

NS = "{http://www.w3.org/2000/svg}"


def _parse(fig):
    return ET.fromstring(fig.render())


def test_scatter_is_valid_svg_with_thresholds():
    rng = np.random.default_rng(0)
    root = _parse(svg.scatter_plane(rng.normal(size=300), rng.normal(size=300), rng.integers(0, 7, 300), title="t"))
    assert root.tag == NS + "svg"
    assert len(root.findall(NS + "circle")) == 300
    dashed = [e for e in root.findall(NS + "line") if e.get("stroke-dasharray")]
    assert len(dashed) == 4


def test_scatter_thins_large_inputs():
    rng = np.random.default_rng(1)
    root = _parse(svg.scatter_plane(rng.normal(size=5000), rng.normal(size=5000), max_points=1000))
    assert len(root.findall(NS + "circle")) == 1000


def test_heatmap_colours_and_nan():
    m = np.array([[1.0, -1.0], [0.0, np.nan]])
    root = _parse(svg.heatmap(m, ["a", "b"], ["x", "y"], "h"))
    fills = [r.get("fill") for r in root.findall(NS + "rect")][1:]
    assert fills == ["#ff0000", "#0000ff", "#ffffff", "#cccccc"]
    texts = [t.text for t in root.findall(NS + "text")]
    assert "1.00" in texts and "nan" not in texts


def test_text_is_escaped(tmp_path):
    fig = svg.Figure()
    fig.text(0, 0, "a < b & c")
    path = fig.save(tmp_path / "f.svg")
    assert ET.parse(path).getroot().find(NS + "text").text == "a < b & c"


def test_ridgeline_and_trends():
    x = np.linspace(0, 1, 50)
    root = _parse(svg.ridgeline({"one": (x, np.exp(-x)), "two": (x, x)}, "r", "x"))
    assert len(root.findall(NS + "polyline")) == 2
    root = _parse(svg.trend_bands({"P": (x, x, x - 0.1, x + 0.1)}))
    assert len(root.findall(NS + "polygon")) == 1
    assert "no data" in svg.ridgeline({}).render()
    assert "no data" in svg.trend_bands({}).render()


def test_degenerate_limits_and_ticks():
    assert svg._padded((2.0, 2.0)) == (1.5, 2.5)
    assert svg._padded((np.nan, 1.0)) == (0.0, 1.0)
    t = svg._ticks((0.0, 10.0), 5)
    assert t[0] == 0 and t[-1] == 10 and len(t) <= 6
    assert svg._fmt(3.0) == "3" and svg._fmt(0.25) == "0.25"


def test_colour_scales():
    assert svg.diverging_color(0.0, 1.0) == "#ffffff"
    assert svg.diverging_color(5.0, 1.0) == "#ff0000"
    assert svg.sequential_color(1.0, 1.0) == "#0087ff"
    assert svg.sequential_color(np.nan, 1.0) == "#cccccc"
