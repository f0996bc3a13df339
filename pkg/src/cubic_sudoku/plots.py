"""Minimal deterministic SVG line plots (no plotting dependency, byte-stable)."""

from __future__ import annotations

_WIDTH, _HEIGHT = 720, 440
_MARGIN = 60
_COLOURS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"]


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def svg_line_plot(path: str, x_values, series: dict, title: str,
                  xlabel: str = "", ylabel: str = ""):
    """Write a polyline plot; ``series`` maps label -> list of y values."""
    xs = list(x_values)
    all_y = [y for ys in series.values() for y in ys]
    if not xs or not all_y:
        raise ValueError("nothing to plot")
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(all_y), max(all_y)
    if x_hi == x_lo:
        x_hi = x_lo + 1
    if y_hi == y_lo:
        y_hi = y_lo + 1
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad
    inner_w = _WIDTH - 2 * _MARGIN
    inner_h = _HEIGHT - 2 * _MARGIN

    def px(x):
        return _MARGIN + inner_w * (x - x_lo) / (x_hi - x_lo)

    def py(y):
        return _HEIGHT - _MARGIN - inner_h * (y - y_lo) / (y_hi - y_lo)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH // 2}" y="24" text-anchor="middle" font-size="16" '
        f'font-family="sans-serif">{title}</text>',
        f'<line x1="{_MARGIN}" y1="{_HEIGHT - _MARGIN}" x2="{_WIDTH - _MARGIN}" '
        f'y2="{_HEIGHT - _MARGIN}" stroke="black"/>',
        f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" '
        f'y2="{_HEIGHT - _MARGIN}" stroke="black"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        xv = x_lo + frac * (x_hi - x_lo)
        yv = y_lo + frac * (y_hi - y_lo)
        parts.append(f'<text x="{_fmt(px(xv))}" y="{_HEIGHT - _MARGIN + 18}" '
                     f'text-anchor="middle" font-size="11" font-family="sans-serif">'
                     f'{xv:.3g}</text>')
        parts.append(f'<text x="{_MARGIN - 8}" y="{_fmt(py(yv) + 4)}" '
                     f'text-anchor="end" font-size="11" font-family="sans-serif">'
                     f'{yv:.3g}</text>')
    if xlabel:
        parts.append(f'<text x="{_WIDTH // 2}" y="{_HEIGHT - 12}" text-anchor="middle" '
                     f'font-size="13" font-family="sans-serif">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="16" y="{_HEIGHT // 2}" text-anchor="middle" '
                     f'font-size="13" font-family="sans-serif" '
                     f'transform="rotate(-90 16 {_HEIGHT // 2})">{ylabel}</text>')
    for idx, (label, ys) in enumerate(series.items()):
        colour = _COLOURS[idx % len(_COLOURS)]
        pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{colour}" '
                     f'stroke-width="1.5"/>')
        parts.append(f'<text x="{_WIDTH - _MARGIN + 4}" y="{_MARGIN + 16 * idx + 10}" '
                     f'font-size="11" font-family="sans-serif" fill="{colour}">'
                     f'{label}</text>')
    parts.append("</svg>")
    with open(path, "w") as f:
        f.write("\n".join(parts))
        f.write("\n")
