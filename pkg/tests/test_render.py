from fractions import Fraction as F
from pathlib import Path

import pytest

from kakeya.assembly import ParamFamily, slice_at
from kakeya.cli import main
from kakeya.moran import build_state
from kakeya.render import CellCapExceeded, fmt, render_stage_figure, render_line_fan, render_stages, slice_raster

GOLDENS = Path(__file__).parent / "goldens"

GOLDEN_ARGS = {
    "stages_default.svg": ["--figure", "stages", "--rounds", "2"],
    "stages_drawn.svg": ["--figure", "stages", "--rounds", "2", "--source", "drawn"],
    "fan_nonsticky.svg": ["--figure", "fan-nonsticky", "--slice-t", "1/2"],
    "fan_sticky.svg": ["--figure", "fan-sticky", "--k", "2", "--slice-t", "1/2"],
    "plates.svg": ["--figure", "plates", "--k", "2", "--lam", "2/3"],
    "slices.pgm": ["--figure", "slices", "--rounds", "2", "--size", "128"],
}


def render_to(tmp_path, name):
    out = tmp_path / name
    assert main(["render", *GOLDEN_ARGS[name], "--out", str(out)]) == 0
    return out.read_bytes()


@pytest.mark.parametrize("name", sorted(GOLDEN_ARGS))
def test_matches_golden(tmp_path, name):
    assert render_to(tmp_path, name) == (GOLDENS / name).read_bytes()


@pytest.mark.parametrize("x,places,text", [
    (F(1, 3), 3, "0.333"),
    (F(2, 3), 3, "0.667"),
    (F(1, 2), 0, "1"),
    (F(-1, 2), 0, "-1"),
    (F(-1, 2000), 3, "-0.001"),
    (F(-1, 3000), 3, "0"),
    (16, 3, "16"),
    (F(5, 4), 1, "1.3"),
])
def test_fmt(x, places, text):
    assert fmt(x, places) == text


def test_stage_panels_show_the_cell_counts():
    doc = render_stage_figure("drawn")
    # 8 chosen cells in the first panel, 16 in the second, 8 parent outlines
    first, second = doc.split('<g id="stage-2">')
    assert first.count('fill="#555555"') == 8
    assert second.count('fill="#555555"') == 16
    assert second.count('stroke="#c00000"') == 8
    with pytest.raises(ValueError):
        render_stage_figure("elsewhere")


def test_deterministic():
    assert render_stage_figure() == render_stage_figure()
    fam = ParamFamily(build_state([1]).cells)
    assert render_line_fan(fam, slice_t=F(1, 3)) == render_line_fan(fam, slice_t=F(1, 3))


def test_cell_cap():
    with pytest.raises(CellCapExceeded):
        render_stages(stages=2, cell_cap=10)
    with pytest.raises(CellCapExceeded):
        render_line_fan(ParamFamily(build_state([1, 1]).cells), cell_cap=100)
    assert main(["render", "--figure", "fan-sticky", "--k", "5"]) == 2


def test_unknown_style():
    with pytest.raises(ValueError):
        render_line_fan(ParamFamily(build_state([1]).cells), style="dotted")


def test_raster_rows_are_slices():
    fam = ParamFamily(build_state([1]).cells)
    data = slice_raster(fam, 32, 8)
    header = b"P5\n32 8\n255\n"
    assert data.startswith(header)
    pixels = data[len(header):]
    assert len(pixels) == 32 * 8
    for i in range(8):
        t = F(2 * (7 - i) + 1, 16)
        union = slice_at(fam, t)
        for j in range(32):
            x = 2 * F(2 * j + 1, 64)
            assert (pixels[32 * i + j] == 0) == union.contains(x)
    with pytest.raises(ValueError):
        slice_raster(fam, 0, 4)
