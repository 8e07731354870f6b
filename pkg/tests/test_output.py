import os
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from curvtrack.experiments import overlap_map
from curvtrack.manifold import Kind, ManifoldSpec
from curvtrack.output import (
    CSV_MAGIC,
    atomic_write,
    csv_text,
    emit_heatmap,
    format_field,
    heatmap_svg,
    ramp_color,
    read_csv,
)

SVG = "{http://www.w3.org/2000/svg}"


def cells(svg):
    root = ET.fromstring(svg)
    group = root.find(f"{SVG}g")
    return [r for r in group.findall(f"{SVG}rect")], root


@pytest.mark.parametrize(
    "value, text",
    [(1.0, "1"), (-0.0, "0"), (float("nan"), "nan"), (1 / 3, "0.333333333"), (1.5e-7, "1.5e-07"), (3, "3"), ("ok", "ok")],
)
def test_format_field(value, text):
    assert format_field(value) == text


def test_csv_layout():
    text = csv_text(("a", "b"), [(1.0, "x"), (np.float64(2.5), "y")])
    assert text == f"{CSV_MAGIC}\n# a,b\n1,x\n2.5,y\n"
    assert read_csv(text) == (["a", "b"], [["1", "x"], ["2.5", "y"]])
    with pytest.raises(ValueError):
        csv_text(("a",), [(1, 2)])


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_nine_digit_round_trip(x):
    assert float(format_field(x)) == pytest.approx(x, rel=1e-8, abs=0)


def test_ramp_endpoints():
    assert ramp_color(0.0) == "#253494"
    assert ramp_color(1.0) == "#ffed6f"
    assert ramp_color(5.0) == ramp_color(1.0)


def test_two_by_two_map():
    values = np.array([[0.1, -2.0], [3.25, 0.5]])
    svg = heatmap_svg(values, [0, 1], [0, 1])
    rects, root = cells(svg)
    assert len(rects) == 4
    fills = {r.get("fill") for r in rects}
    assert ramp_color(0.0) in fills and ramp_color(1.0) in fills
    texts = {t.get("class"): t.text for t in root.iter(f"{SVG}text")}
    assert texts["legend-max"] == "max = 3.25"
    assert texts["legend-min"] == "min = -2.0"


def test_constant_map_is_one_colour():
    rects, root = cells(heatmap_svg(np.full((3, 4), 0.7), [0, 1, 2], [0, 1, 2, 3]))
    assert {r.get("fill") for r in rects} == {ramp_color(0.5)}
    texts = {t.get("class"): t.text for t in root.iter(f"{SVG}text")}
    assert texts["legend-max"] == "max = 0.7" and texts["legend-min"] == "min = 0.7"


def test_rejects_nonfinite():
    with pytest.raises(ValueError):
        heatmap_svg(np.array([[np.inf]]), [0], [0])


def test_flagged_cells_outlined(tmp_path):
    res = overlap_map(ManifoldSpec(Kind.TORUS, 1.0, 0.0, 1.0), (-2, 2, 41), 101)
    path = tmp_path / "overlap.svg"
    emit_heatmap(res, path, "overlap")
    root = ET.parse(path).getroot()
    outlined = [r for r in root.iter(f"{SVG}rect") if r.get("class") == "flagged"]
    assert len(outlined) == int(res.flags.sum()) == 3


def test_atomic_write_success(tmp_path):
    path = tmp_path / "sub" / "out.csv"
    atomic_write(path, "hello\n")
    assert path.read_text() == "hello\n"
    assert os.listdir(path.parent) == ["out.csv"]


def test_atomic_write_failure_leaves_nothing(tmp_path, monkeypatch):
    path = tmp_path / "out.csv"

    def broken_replace(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", broken_replace)
    with pytest.raises(OSError):
        atomic_write(path, "data\n")
    assert os.listdir(tmp_path) == []


def test_atomic_write_keeps_old_file_on_failure(tmp_path, monkeypatch):
    path = tmp_path / "out.csv"
    path.write_text("old\n")

    class Boom:
        def __str__(self):
            raise RuntimeError("cannot render")

    with pytest.raises(TypeError):
        atomic_write(path, Boom())
    assert path.read_text() == "old\n"
    assert os.listdir(tmp_path) == ["out.csv"]
