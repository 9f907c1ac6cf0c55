import re

from helpers import abc_timeline
from densetp.render import render_svg


def rects(svg):
    return [(float(m.group(1)), float(m.group(2)), m.group(3))
            for m in re.finditer(r'<rect class="token" x="([\d.]+)" y="\d+" width="([\d.]+)".*?data-value="([^"]*)"', svg)]


def test_abc_widths():
    boxes = rects(render_svg({"x": abc_timeline()}))
    assert [v for _, _, v in boxes] == ["a", "b", "c"]
    widths = [w for _, w, _ in boxes]
    total = sum(widths)
    for w, d in zip(widths, (7, 3, 3.9)):
        assert abs(w / total - d / 13.9) < 1e-4


def test_witness_rendering(m1_witness):
    svg = render_svg(m1_witness)
    boxes = rects(svg)
    assert len(boxes) == 16
    assert all(w > 0 for _, w, _ in boxes)
    assert 'data-start="0"' in svg and 'data-end="3"' in svg
    assert svg.count('class="lane"') == 1
    assert render_svg(m1_witness) == svg


def test_empty_plan_rejected():
    try:
        render_svg({})
    except ValueError:
        return
    raise AssertionError("empty plan rendered")
