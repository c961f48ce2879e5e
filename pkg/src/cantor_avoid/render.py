"""SVG figures: one horizontal band per generation, one bar per interval.

This is the only place rationals become floats.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from .cantor import CantorSpec, generation

ROW_HEIGHT = 18
ROW_GAP = 10
MARGIN = 16
LABEL_WIDTH = 90

C_COLOR = "#3b6ea5"
F_COLOR = "#b5462f"


def _fmt(v: float) -> str:
    return f"{v:.4f}"


def _svg(rows, width: int) -> str:
    """``rows`` is a list of ``(label, IntervalSet, color)``."""
    span = width - 2 * MARGIN - LABEL_WIDTH
    height = 2 * MARGIN + len(rows) * (ROW_HEIGHT + ROW_GAP) - (ROW_GAP if rows else 0)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    x0 = MARGIN + LABEL_WIDTH
    for r, (label, ivs, color) in enumerate(rows):
        y = MARGIN + r * (ROW_HEIGHT + ROW_GAP)
        out.append(f'<g class="row" data-label="{escape(label)}" data-bars="{len(ivs)}">')
        out.append(
            f'<text x="{MARGIN}" y="{y + ROW_HEIGHT - 4}" font-family="monospace" '
            f'font-size="12">{escape(label)}</text>'
        )
        out.append(
            f'<line x1="{x0}" y1="{y + ROW_HEIGHT}" x2="{x0 + span}" y2="{y + ROW_HEIGHT}" '
            f'stroke="#cccccc" stroke-width="1"/>'
        )
        for iv in ivs:
            left = x0 + float(iv.lo) * span
            w = max(float(iv.hi - iv.lo) * span, 0.5)
            out.append(
                f'<rect class="bar" x="{_fmt(left)}" y="{y}" width="{_fmt(w)}" '
                f'height="{ROW_HEIGHT}" fill="{color}"/>'
            )
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_spec(spec: CantorSpec, depth: int, width: int = 800) -> str:
    """Rows C_0 .. C_depth."""
    rows = [(f"C_{n}", generation(spec, n), C_COLOR) for n in range(depth + 1)]
    return _svg(rows, width)


def render_trace(trace, width: int = 800) -> str:
    """For each generation, a C_phi(n) row followed by the F_n row."""
    rows = []
    for state in trace.states:
        rows.append((f"C_{state.phi_n}", generation(trace.spec, state.phi_n), C_COLOR))
        rows.append((f"F_{state.n}", state.kept, F_COLOR))
    return _svg(rows, width)
