"""SVG drawing of multi-timelines: one lane per variable, one box per token."""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List
from xml.sax.saxutils import escape

from .model import MultiTimeline, token_times

__all__ = ["render_svg"]

_PALETTE = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
            "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"]


def render_svg(plan: MultiTimeline, width: int = 960, lane_height: int = 44,
               label_width: int = 90, margin: int = 20) -> str:
    """Draw ``plan`` with a time axis linear in the token start/end times.

    Output depends only on the input, so equal plans give identical SVG.
    """
    if not plan:
        raise ValueError("nothing to render: the multi-timeline is empty")
    horizon = max(tl.horizon for tl in plan.values()) or Fraction(1)
    plot_w = width - label_width - 2 * margin
    scale = plot_w / horizon

    def x(t: Fraction) -> float:
        return float(label_width + margin + t * scale)

    colors: Dict[str, str] = {}
    height = 2 * margin + lane_height * len(plan) + 24
    out: List[str] = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for lane, (name, tl) in enumerate(plan.items()):
        y = margin + lane * lane_height
        out.append(f'<text x="{margin}" y="{y + lane_height / 2 + 4:.1f}" font-size="12">{escape(name)}</text>')
        out.append(f'<g class="lane" data-variable="{escape(name)}">')
        for tok, (s, e) in zip(tl.tokens, token_times(tl)):
            color = colors.setdefault(tok.value, _PALETTE[len(colors) % len(_PALETTE)])
            x0, x1 = x(s), x(e)
            out.append(
                f'<rect class="token" x="{x0:.3f}" y="{y + 6}" width="{x1 - x0:.3f}" '
                f'height="{lane_height - 12}" fill="{color}" fill-opacity="0.55" stroke="#333" '
                f'data-value="{escape(tok.value)}" data-start="{s}" data-end="{e}">'
                f'<title>{escape(tok.value)} [{s}, {e}]</title></rect>')
            out.append(f'<text x="{(x0 + x1) / 2:.3f}" y="{y + lane_height / 2 + 3:.1f}" '
                       f'text-anchor="middle">{escape(tok.value)}</text>')
        out.append("</g>")
    axis_y = margin + lane_height * len(plan) + 4
    out.append(f'<line x1="{x(Fraction(0)):.3f}" y1="{axis_y}" x2="{x(horizon):.3f}" y2="{axis_y}" stroke="#000"/>')
    step = max(1, int(horizon) // 20)
    for t in range(0, int(horizon) + 1, step):
        out.append(f'<line x1="{x(Fraction(t)):.3f}" y1="{axis_y}" x2="{x(Fraction(t)):.3f}" '
                   f'y2="{axis_y + 4}" stroke="#000"/>')
        out.append(f'<text x="{x(Fraction(t)):.3f}" y="{axis_y + 15}" text-anchor="middle">{t}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
