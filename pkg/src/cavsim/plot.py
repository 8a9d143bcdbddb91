"""Four-panel time-series figure (position, speed, acceleration, gap) as plain SVG."""
from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

from .engine import CollisionEvent, TrajectoryLog

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)
PANELS = (
    ("x", "position (m)"),
    ("v", "velocity (m/s)"),
    ("a", "acceleration (m/s²)"),
    ("gap", "gap to leader (m)"),
)

WIDTH = 800
PANEL_H = 200
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 120, 20, 40
N_TICKS = 5


def _limits(values: Sequence[float]) -> tuple[float, float]:
    lo, hi = min(values), max(values)
    span = hi - lo
    if span == 0:
        pad = abs(lo) * 0.05 or 1.0
    else:
        pad = 0.05 * span
    return lo - pad, hi + pad


def _num(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def render_timeseries_svg(log: TrajectoryLog, events: Sequence[CollisionEvent] = ()) -> str:
    """Render ``log`` as a standalone SVG document.

    One polyline per vehicle in each panel, a shared legend, and a red
    cross on the position panel at every collision (follower position at
    the event time). Axes are fitted to the data with a 5% margin.
    """
    if not log.records:
        raise ValueError("cannot plot an empty trajectory log")
    times = log.times()
    t_lo, t_hi = _limits(times)
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = PANEL_H - MARGIN_T - MARGIN_B
    height = PANEL_H * len(PANELS)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" '
        f'viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{WIDTH}" height="{height}" fill="white"/>',
    ]

    def sx(t):
        return MARGIN_L + (t - t_lo) / (t_hi - t_lo) * plot_w

    for row, (column, label) in enumerate(PANELS):
        top = row * PANEL_H + MARGIN_T
        values = [getattr(r, column) for r in log if getattr(r, column) is not None]
        y_lo, y_hi = _limits(values) if values else (0.0, 1.0)

        def sy(y, top=top, y_lo=y_lo, y_hi=y_hi):
            return top + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

        out.append(f'<g class="panel" id="panel-{column}">')
        out.append(
            f'<rect x="{MARGIN_L}" y="{top}" width="{plot_w}" height="{plot_h}" '
            'fill="none" stroke="black" stroke-width="0.8"/>'
        )
        for i in range(N_TICKS + 1):
            tv = t_lo + (t_hi - t_lo) * i / N_TICKS
            yv = y_lo + (y_hi - y_lo) * i / N_TICKS
            out.append(f'<text x="{sx(tv):.1f}" y="{top + plot_h + 14}" text-anchor="middle">{_num(tv)}</text>')
            out.append(f'<text x="{MARGIN_L - 5}" y="{sy(yv) + 4:.1f}" text-anchor="end">{_num(yv)}</text>')
        out.append(
            f'<text x="{MARGIN_L + plot_w / 2:.1f}" y="{top + plot_h + 30}" text-anchor="middle">time (s)</text>'
        )
        out.append(
            f'<text transform="translate(14 {top + plot_h / 2:.1f}) rotate(-90)" '
            f'text-anchor="middle">{escape(label)}</text>'
        )
        for idx, vid in enumerate(log.vehicle_ids):
            pts = [(r.t, getattr(r, column)) for r in log.vehicle(vid) if getattr(r, column) is not None]
            if not pts:
                continue
            coords = " ".join(f"{sx(t):.2f},{sy(y):.2f}" for t, y in pts)
            color = PALETTE[idx % len(PALETTE)]
            out.append(
                f'<polyline class="vehicle-{vid}" fill="none" stroke="{color}" '
                f'stroke-width="1.2" points="{coords}"/>'
            )
        if column == "x":
            for ev in events:
                rec = min(log.vehicle(ev.follower), key=lambda r: abs(r.t - ev.t))
                cx, cy = sx(ev.t), sy(rec.x)
                out.append(
                    f'<g class="collision"><title>collision t={_num(ev.t)} s: '
                    f'{ev.follower} hit {ev.leader}</title>'
                    f'<path d="M{cx - 5:.2f},{cy - 5:.2f} L{cx + 5:.2f},{cy + 5:.2f} '
                    f'M{cx - 5:.2f},{cy + 5:.2f} L{cx + 5:.2f},{cy - 5:.2f}" '
                    'stroke="red" stroke-width="2"/></g>'
                )
        out.append("</g>")

    legend_x = WIDTH - MARGIN_R + 15
    out.append('<g class="legend">')
    for idx, vid in enumerate(log.vehicle_ids):
        y = MARGIN_T + 10 + idx * 16
        color = PALETTE[idx % len(PALETTE)]
        out.append(f'<line x1="{legend_x}" y1="{y}" x2="{legend_x + 20}" y2="{y}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{legend_x + 25}" y="{y + 4}">vehicle {vid}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
