"""Self-contained SVG renderings of a telemetry file.

Two figures: a top view of the trajectories (with the traced reference
points ``q - phi`` dashed) and stacked time traces of the path error norms,
the worst coordination residuals, and the virtual-coordinate rates.  Both
are pure functions of the telemetry content, so identical CSV input yields
identical SVG bytes.
"""

from __future__ import annotations

import numpy as np

from .telemetry import Telemetry

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
)
MAX_POINTS = 1500


def _stride(n: int) -> int:
    return max(1, (n + MAX_POINTS - 1) // MAX_POINTS)


def _fmt(x: float) -> str:
    return f"{x:.2f}"


class _Panel:
    """One plot area mapping data coordinates onto SVG pixels."""

    def __init__(self, x0, y0, width, height, xlim, ylim):
        self.x0, self.y0 = x0, y0
        self.w, self.h = width, height
        span_x = xlim[1] - xlim[0] or 1.0
        span_y = ylim[1] - ylim[0] or 1.0
        self.xlim = (xlim[0], xlim[0] + span_x)
        self.ylim = (ylim[0], ylim[0] + span_y)

    def px(self, x):
        return self.x0 + (x - self.xlim[0]) / (self.xlim[1] - self.xlim[0]) * self.w

    def py(self, y):
        return self.y0 + self.h - (y - self.ylim[0]) / (self.ylim[1] - self.ylim[0]) * self.h

    def frame(self, parts, title, xlabel, ylabel):
        parts.append(
            f'<rect x="{_fmt(self.x0)}" y="{_fmt(self.y0)}" width="{_fmt(self.w)}" '
            f'height="{_fmt(self.h)}" fill="none" stroke="#333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(self.x0 + self.w / 2)}" y="{_fmt(self.y0 - 6)}" '
            f'text-anchor="middle" font-size="13" fill="#111">{title}</text>'
        )
        parts.append(
            f'<text x="{_fmt(self.x0 + self.w / 2)}" y="{_fmt(self.y0 + self.h + 30)}" '
            f'text-anchor="middle" font-size="11" fill="#111">{xlabel}</text>'
        )
        parts.append(
            f'<text x="{_fmt(self.x0 - 42)}" y="{_fmt(self.y0 + self.h / 2)}" '
            f'text-anchor="middle" font-size="11" fill="#111" '
            f'transform="rotate(-90 {_fmt(self.x0 - 42)} {_fmt(self.y0 + self.h / 2)})"'
            f'>{ylabel}</text>'
        )
        for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
            xv = self.xlim[0] + frac * (self.xlim[1] - self.xlim[0])
            yv = self.ylim[0] + frac * (self.ylim[1] - self.ylim[0])
            xp, yp = self.px(xv), self.py(yv)
            parts.append(
                f'<line x1="{_fmt(xp)}" y1="{_fmt(self.y0 + self.h)}" x2="{_fmt(xp)}" '
                f'y2="{_fmt(self.y0 + self.h + 4)}" stroke="#333" stroke-width="1"/>'
            )
            parts.append(
                f'<text x="{_fmt(xp)}" y="{_fmt(self.y0 + self.h + 15)}" '
                f'text-anchor="middle" font-size="9" fill="#333">{xv:.3g}</text>'
            )
            parts.append(
                f'<line x1="{_fmt(self.x0 - 4)}" y1="{_fmt(yp)}" x2="{_fmt(self.x0)}" '
                f'y2="{_fmt(yp)}" stroke="#333" stroke-width="1"/>'
            )
            parts.append(
                f'<text x="{_fmt(self.x0 - 6)}" y="{_fmt(yp + 3)}" '
                f'text-anchor="end" font-size="9" fill="#333">{yv:.3g}</text>'
            )

    def polyline(self, parts, xs, ys, color, dashed=False, width=1.2):
        pts = " ".join(f"{_fmt(self.px(x))},{_fmt(self.py(y))}"
                       for x, y in zip(xs, ys) if np.isfinite(x) and np.isfinite(y))
        if not pts:
            return
        dash = ' stroke-dasharray="6 4"' if dashed else ""
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{width}"{dash}/>'
        )


def _document(width, height, parts) -> str:
    body = "\n".join(parts)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" '
        f'width="{width}" height="{height}" font-family="Helvetica, Arial, sans-serif">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n{body}\n</svg>\n'
    )


def _limits(arrays, pad=0.05):
    lo = min(float(np.nanmin(a)) for a in arrays if a.size)
    hi = max(float(np.nanmax(a)) for a in arrays if a.size)
    span = (hi - lo) or 1.0
    return lo - pad * span, hi + pad * span


def trajectory_svg(tel: Telemetry) -> str:
    """Top view: solid vehicle tracks, dashed reference-point traces."""
    step = _stride(tel.n_ticks)
    qx = tel.column("q_x")[::step]
    qy = tel.column("q_y")[::step]
    fx = qx - tel.column("phi_x")[::step]
    fy = qy - tel.column("phi_y")[::step]
    xlim = _limits([qx, fx])
    ylim = _limits([qy, fy])
    panel = _Panel(70, 40, 540, 460, xlim, ylim)
    parts = []
    panel.frame(parts, "Fleet trajectories (top view)", "x [m]", "y [m]")
    for g in range(tel.n_vehicles):
        color = PALETTE[g % len(PALETTE)]
        panel.polyline(parts, fx[:, g], fy[:, g], color, dashed=True, width=0.8)
        panel.polyline(parts, qx[:, g], qy[:, g], color)
        x0, y0 = panel.px(qx[0, g]), panel.py(qy[0, g])
        x1, y1 = panel.px(qx[-1, g]), panel.py(qy[-1, g])
        parts.append(f'<circle cx="{_fmt(x0)}" cy="{_fmt(y0)}" r="3.5" fill="{color}"/>')
        parts.append(
            f'<rect x="{_fmt(x1 - 3)}" y="{_fmt(y1 - 3)}" width="6" height="6" '
            f'fill="white" stroke="{color}" stroke-width="1.5"/>'
        )
        label = f"{tel.kinds[g]} {g}"
        ly = 46 + 14 * g
        parts.append(
            f'<line x1="630" y1="{ly}" x2="650" y2="{ly}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="655" y="{ly + 3}" font-size="10" fill="#111">{label}</text>'
        )
    return _document(760, 560, parts)


def traces_svg(tel: Telemetry) -> str:
    """Stacked traces: path error norms, worst residuals, coordinate rates."""
    step = _stride(tel.n_ticks)
    times = tel.times[::step]
    phi = np.sqrt(
        tel.column("phi_x") ** 2 + tel.column("phi_y") ** 2
        + np.nan_to_num(tel.column("phi_z")) ** 2
    )[::step]
    res = tel.column("residual_max")[::step]
    omega = tel.column("omega")
    if tel.n_ticks >= 2:
        rate = np.diff(omega, axis=0) / tel.dt
        rate_t = tel.times[1:]
        rate = rate[:: _stride(rate.shape[0])]
        rate_t = rate_t[:: _stride(len(rate_t))]
    else:
        rate = np.zeros((0, tel.n_vehicles))
        rate_t = np.zeros(0)
    tlim = (float(times[0]), float(times[-1]) if len(times) > 1 else float(times[0]) + 1.0)
    parts = []
    specs = [
        ("Path-following error norms", "|phi| [m]", times, phi, None),
        ("Worst coordination residuals", "max |w_i - w_k - delta| ", times, res, None),
        ("Virtual-coordinate rates", "d(omega)/dt", rate_t, rate, -1.0),
    ]
    for row, (title, ylabel, ts, series, hline) in enumerate(specs):
        finite = series[np.isfinite(series)]
        ylim = _limits([finite]) if finite.size else (0.0, 1.0)
        panel = _Panel(70, 40 + row * 230, 600, 170, tlim, ylim)
        panel.frame(parts, title, "t [s]" if row == 2 else "", ylabel)
        if hline is not None and ylim[0] <= hline <= ylim[1]:
            yp = panel.py(hline)
            parts.append(
                f'<line x1="{_fmt(panel.x0)}" y1="{_fmt(yp)}" '
                f'x2="{_fmt(panel.x0 + panel.w)}" y2="{_fmt(yp)}" '
                f'stroke="#999" stroke-width="0.8" stroke-dasharray="2 3"/>'
            )
        for g in range(tel.n_vehicles):
            if series.size:
                panel.polyline(parts, ts, series[:, g], PALETTE[g % len(PALETTE)], width=1.0)
    return _document(760, 740, parts)
