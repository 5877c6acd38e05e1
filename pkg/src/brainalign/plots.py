"""Deterministic SVG accuracy plots.

Hand-assembled markup instead of a plotting library: the output must be
byte-identical across runs and machines, so no timestamps, no library
version strings, no font metrics. Coordinates are rounded to two
decimals, which is plenty at this canvas size.
"""

# Okabe-Ito palette, color-blind safe, fixed order.
PALETTE = (
    "#0072B2",
    "#D55E00",
    "#009E73",
    "#CC79A7",
    "#E69F00",
    "#56B4E9",
    "#F0E442",
    "#000000",
    "#999999",
)

WIDTH = 640
HEIGHT = 400
MARGIN_L = 60
MARGIN_R = 150
MARGIN_T = 40
MARGIN_B = 50


def _fmt(v):
    return f"{v:.2f}"


def _x_pos(layer, lo, hi):
    span = max(hi - lo, 1)
    inner = WIDTH - MARGIN_L - MARGIN_R
    return MARGIN_L + inner * (layer - lo) / span


def _y_pos(acc, lo, hi):
    inner = HEIGHT - MARGIN_T - MARGIN_B
    return MARGIN_T + inner * (hi - acc) / (hi - lo)


def accuracy_plot_svg(series, title=""):
    """Render one line per sequence length: x=layer, y=mean accuracy.

    ``series`` maps a sequence length to a list of (layer, accuracy)
    points, already sorted. Returns the SVG document as a string.
    """
    if not series:
        raise ValueError("no series to plot")
    layers = sorted({l for pts in series.values() for l, _ in pts})
    accs = [a for pts in series.values() for _, a in pts]
    x_lo, x_hi = layers[0], layers[-1]
    # Pad the y range a little and keep chance level (0.5) in view.
    y_lo = min(min(accs), 0.5) - 0.05
    y_hi = max(max(accs), 0.5) + 0.05
    y_lo = max(0.0, y_lo)
    y_hi = min(1.0, y_hi) if y_hi <= 1.0 else y_hi

    parts = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    parts.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    if title:
        parts.append(
            f'<text x="{WIDTH // 2}" y="24" font-family="sans-serif" '
            f'font-size="16" text-anchor="middle">{title}</text>'
        )
    ax_y = HEIGHT - MARGIN_B
    parts.append(
        f'<line x1="{MARGIN_L}" y1="{ax_y}" x2="{WIDTH - MARGIN_R}" '
        f'y2="{ax_y}" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" '
        f'y2="{ax_y}" stroke="black"/>'
    )
    # Chance line at 0.5.
    cy = _fmt(_y_pos(0.5, y_lo, y_hi))
    parts.append(
        f'<line x1="{MARGIN_L}" y1="{cy}" x2="{WIDTH - MARGIN_R}" y2="{cy}" '
        f'stroke="#888888" stroke-dasharray="4,4"/>'
    )
    for layer in layers:
        x = _fmt(_x_pos(layer, x_lo, x_hi))
        parts.append(
            f'<line x1="{x}" y1="{ax_y}" x2="{x}" y2="{ax_y + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x}" y="{ax_y + 20}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle">{layer}</text>'
        )
    n_ticks = 5
    for i in range(n_ticks + 1):
        acc = y_lo + (y_hi - y_lo) * i / n_ticks
        y = _fmt(_y_pos(acc, y_lo, y_hi))
        parts.append(
            f'<line x1="{MARGIN_L - 5}" y1="{y}" x2="{MARGIN_L}" y2="{y}" '
            f'stroke="black"/>'
        )
        parts.append(
            f'<text x="{MARGIN_L - 9}" y="{y}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end" dominant-baseline="middle">'
            f"{acc:.2f}</text>"
        )
    parts.append(
        f'<text x="{(MARGIN_L + WIDTH - MARGIN_R) // 2}" y="{HEIGHT - 12}" '
        f'font-family="sans-serif" font-size="13" text-anchor="middle">layer</text>'
    )
    parts.append(
        f'<text x="16" y="{(MARGIN_T + ax_y) // 2}" font-family="sans-serif" '
        f'font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {(MARGIN_T + ax_y) // 2})">mean accuracy</text>'
    )
    for idx, (seq_length, pts) in enumerate(series.items()):
        color = PALETTE[idx % len(PALETTE)]
        coords = [
            (_fmt(_x_pos(l, x_lo, x_hi)), _fmt(_y_pos(a, y_lo, y_hi)))
            for l, a in pts
        ]
        poly = " ".join(f"{x},{y}" for x, y in coords)
        parts.append(
            f'<polyline points="{poly}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>'
        )
        for x, y in coords:
            parts.append(f'<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>')
        ly = MARGIN_T + 16 * idx
        lx = WIDTH - MARGIN_R + 12
        parts.append(
            f'<line x1="{lx}" y1="{ly}" x2="{lx + 18}" y2="{ly}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{lx + 24}" y="{ly}" font-family="sans-serif" '
            f'font-size="11" dominant-baseline="middle">S={seq_length}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
