"""Minimal SVG heatmaps for outcome grids: one panel per (edge distance, roller)."""

from __future__ import annotations

from xml.sax.saxutils import escape

CELL = 36
MARGIN = 56
GAP = 28


def _colour(rate: float) -> str:
    # red (0) -> amber -> green (1)
    rate = min(max(rate, 0.0), 1.0)
    if rate < 0.5:
        t = rate / 0.5
        r, g, b = 215, int(48 + t * (190 - 48)), 39
    else:
        t = (rate - 0.5) / 0.5
        r, g, b = int(215 - t * (215 - 26)), int(190 - t * (190 - 152)), int(39 + t * (80 - 39))
    return f"#{r:02x}{g:02x}{b:02x}"


def render_grid_svg(grid, title: str | None = None) -> str:
    a = grid.axes
    n_pen, n_vel = len(a.penetrations), len(a.velocities)
    panels = [(k, r) for k in range(len(a.edge_distances)) for r in range(len(a.roller_types))]
    panel_w = MARGIN + n_vel * CELL
    panel_h = MARGIN + n_pen * CELL
    top = 30 if title else 0
    width = len(panels) * panel_w + (len(panels) - 1) * GAP + 16
    height = top + panel_h + 40

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="8" y="20" font-size="14">{escape(title)}</text>')

    reps = a.repetitions
    for p, (k, r) in enumerate(panels):
        x0 = 8 + p * (panel_w + GAP)
        y0 = top
        label = f"l={a.edge_distances[k] * 1e3:g} mm, {a.roller_types[r].value}"
        out.append(f'<text x="{x0 + MARGIN}" y="{y0 + 14}">{escape(label)}</text>')
        for j, v in enumerate(a.velocities):
            cx = x0 + MARGIN + j * CELL + CELL / 2
            out.append(f'<text x="{cx:g}" y="{y0 + MARGIN - 6}" text-anchor="middle">{v:g}</text>')
        for i, pen in enumerate(a.penetrations):
            cy = y0 + MARGIN + i * CELL + CELL / 2 + 4
            out.append(f'<text x="{x0 + MARGIN - 6}" y="{cy:g}" text-anchor="end">{pen * 1e3:g}</text>')
            for j in range(n_vel):
                wins = int(grid.success[i, j, k, r])
                x = x0 + MARGIN + j * CELL
                y = y0 + MARGIN + i * CELL
                out.append(
                    f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" '
                    f'fill="{_colour(wins / reps)}" stroke="white"/>'
                )
                out.append(
                    f'<text x="{x + CELL / 2:g}" y="{y + CELL / 2 + 4:g}" '
                    f'text-anchor="middle">{wins}/{reps}</text>'
                )
        out.append(
            f'<text x="{x0 + MARGIN + n_vel * CELL / 2:g}" y="{y0 + panel_h + 18}" '
            f'text-anchor="middle">roller speed (rev/min)</text>'
        )
        out.append(
            f'<text x="{x0 + 10}" y="{y0 + MARGIN + n_pen * CELL / 2:g}" '
            f'transform="rotate(-90 {x0 + 10} {y0 + MARGIN + n_pen * CELL / 2:g})" '
            f'text-anchor="middle">penetration (mm)</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
