import xml.etree.ElementTree as ET

import pytest

from hrris.plots import line_chart, write_line_chart


def _series():
    return [
        ("HrRis", [(0.0, 1.0), (10.0, 2.5), (20.0, 4.0)]),
        ("PassiveRis", [(0.0, 0.5), (10.0, 1.5), (20.0, 2.0)]),
    ]


def test_chart_is_well_formed_xml_with_one_line_per_series():
    svg = line_chart(_series(), "demo", "power (dBm)", "capacity")
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
    ns = {"s": "http://www.w3.org/2000/svg"}
    polylines = root.findall(".//s:polyline", ns)
    assert len(polylines) == 2
    texts = [t.text for t in root.findall(".//s:text", ns)]
    assert "demo" in texts and "HrRis" in texts and "PassiveRis" in texts


def test_chart_is_deterministic():
    a = line_chart(_series(), "t", "x", "y")
    b = line_chart(_series(), "t", "x", "y")
    assert a == b


def test_single_point_series_does_not_collapse_the_axes():
    svg = line_chart([("only", [(5.0, 1.0)])], "t", "x", "y")
    ET.fromstring(svg)  # well-formed despite the degenerate ranges


def test_labels_are_escaped():
    svg = line_chart([("a<b&c", [(0.0, 1.0), (1.0, 2.0)])], "x<y", "p&q", "r")
    ET.fromstring(svg)
    assert "a&lt;b&amp;c" in svg


def test_empty_input_rejected():
    with pytest.raises(ValueError):
        line_chart([], "t", "x", "y")
    with pytest.raises(ValueError):
        line_chart([("empty", [])], "t", "x", "y")


def test_write_chart_creates_the_file(tmp_path):
    path = write_line_chart(tmp_path / "chart.svg", _series(), "t", "x", "y")
    assert path.exists()
    assert path.read_text(encoding="utf-8").startswith("<svg ")
