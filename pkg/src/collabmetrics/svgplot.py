"""Minimal deterministic SVG output for log-log curves and histograms.

Everything here is a pure function of the CSV rows it is given; no
timestamps or random ids end up in the markup.
"""
import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 480, 360
LEFT, RIGHT, TOP, BOTTOM = 60, 20, 30, 45

MEAN_COLOR = "#d62728"
MEDIAN_COLOR = "#c030c0"
FIT_COLOR = "#1f3fbf"


def _decades(values):
    lo = math.floor(math.log10(min(values)))
    hi = math.ceil(math.log10(max(values)))
    if hi == lo:
        hi = lo + 1
    return lo, hi


class _LogAxes:
    def __init__(self, xs, ys):
        self.x0, self.x1 = _decades(xs)
        self.y0, self.y1 = _decades(ys)
        self.w = WIDTH - LEFT - RIGHT
        self.h = HEIGHT - TOP - BOTTOM

    def px(self, x):
        return LEFT + (math.log10(x) - self.x0) / (self.x1 - self.x0) * self.w

    def py(self, y):
        return TOP + self.h - (math.log10(y) - self.y0) / (self.y1 - self.y0) * self.h

    def frame(self, title, xlabel, ylabel):
        out = [
            f'<rect x="{LEFT}" y="{TOP}" width="{self.w}" height="{self.h}" '
            'fill="none" stroke="black"/>',
            f'<text x="{WIDTH / 2:.1f}" y="18" text-anchor="middle" '
            f'font-size="13">{escape(title)}</text>',
            f'<text x="{LEFT + self.w / 2:.1f}" y="{HEIGHT - 8}" text-anchor="middle" '
            f'font-size="12">{escape(xlabel)}</text>',
            f'<text x="14" y="{TOP + self.h / 2:.1f}" text-anchor="middle" font-size="12" '
            f'transform="rotate(-90 14 {TOP + self.h / 2:.1f})">{escape(ylabel)}</text>',
        ]
        for k in range(self.x0, self.x1 + 1):
            x = self.px(10.0 ** k)
            out.append(f'<line x1="{x:.2f}" y1="{TOP + self.h}" x2="{x:.2f}" '
                       f'y2="{TOP + self.h + 5}" stroke="black"/>')
            out.append(f'<text x="{x:.2f}" y="{TOP + self.h + 18}" text-anchor="middle" '
                       f'font-size="11">1e{k}</text>')
        for k in range(self.y0, self.y1 + 1):
            y = self.py(10.0 ** k)
            out.append(f'<line x1="{LEFT - 5}" y1="{y:.2f}" x2="{LEFT}" y2="{y:.2f}" '
                       'stroke="black"/>')
            out.append(f'<text x="{LEFT - 8}" y="{y + 4:.2f}" text-anchor="end" '
                       f'font-size="11">1e{k}</text>')
        return out


def _document(body):
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">')
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>',
                      *body, "</svg>"]) + "\n"


def _series(axes, points, color, label, slot):
    out = []
    if len(points) > 1:
        path = " ".join(f"{axes.px(x):.2f},{axes.py(y):.2f}" for x, y in points)
        out.append(f'<polyline points="{path}" fill="none" stroke="{color}" '
                   'stroke-width="1.5"/>')
    for x, y in points:
        out.append(f'<circle cx="{axes.px(x):.2f}" cy="{axes.py(y):.2f}" r="3" '
                   f'fill="{color}"/>')
    ly = TOP + 14 + 14 * slot
    out.append(f'<text x="{LEFT + 8}" y="{ly}" font-size="11" fill="{color}">'
               f'{escape(label)}</text>')
    return out


def curve_svg(rows, fit=None, title="", xlabel="N_aut", ylabel="index"):
    """Render curve rows ``(center, count, mean, median)`` with an optional fit.

    ``fit`` is the dict returned by :func:`collabmetrics.scaling.read_fit_csv`.
    Nonpositive values cannot sit on a log axis and are left out.
    """
    means = [(c, m) for c, _, m, _ in rows if c > 0 and m > 0]
    medians = [(c, md) for c, _, _, md in rows if c > 0 and md > 0]
    if not means and not medians:
        raise ValueError("nothing positive to plot")
    xs = [c for c, _ in means + medians]
    ys = [v for _, v in means + medians]
    axes = _LogAxes(xs, ys)
    body = axes.frame(title, xlabel, ylabel)
    body += _series(axes, means, MEAN_COLOR, "mean", 0)
    body += _series(axes, medians, MEDIAN_COLOR, "median", 1)
    if fit is not None:
        xa, xb = 10.0 ** axes.x0, 10.0 ** axes.x1
        ya = fit["amplitude"] * xa ** fit["exponent"]
        yb = fit["amplitude"] * xb ** fit["exponent"]
        # clip the line to the visible decades
        lo, hi = 10.0 ** axes.y0, 10.0 ** axes.y1
        if ya > 0 and yb > 0:
            pts = _clip_line(axes, (xa, ya), (xb, yb), lo, hi)
            if pts:
                (x1, y1), (x2, y2) = pts
                body.append(f'<line x1="{axes.px(x1):.2f}" y1="{axes.py(y1):.2f}" '
                            f'x2="{axes.px(x2):.2f}" y2="{axes.py(y2):.2f}" '
                            f'stroke="{FIT_COLOR}" stroke-dasharray="2,3" stroke-width="1.5"/>')
        label = f"fit: p = {fit['exponent']:.3f}"
        body.append(f'<text x="{LEFT + 8}" y="{TOP + 42}" font-size="11" '
                    f'fill="{FIT_COLOR}">{escape(label)}</text>')
    return _document(body)


def _clip_line(axes, a, b, lo, hi):
    lx = [math.log10(a[0]), math.log10(b[0])]
    ly = [math.log10(a[1]), math.log10(b[1])]
    slope = (ly[1] - ly[0]) / (lx[1] - lx[0])
    pts = []
    for x in lx:
        y = ly[0] + slope * (x - lx[0])
        pts.append((x, y))
    llo, lhi = math.log10(lo), math.log10(hi)
    clipped = []
    for x, y in pts:
        if y < llo and slope != 0:
            x = lx[0] + (llo - ly[0]) / slope
            y = llo
        elif y > lhi and slope != 0:
            x = lx[0] + (lhi - ly[0]) / slope
            y = lhi
        if not (llo - 1e-9 <= y <= lhi + 1e-9):
            return None
        clipped.append((10.0 ** x, 10.0 ** y))
    return clipped


def histogram_svg(rows, title="", xlabel="N_aut", ylabel="collaborations"):
    """Render histogram rows ``(bin_low, bin_high, count)`` on log-log axes."""
    rows = [(lo, hi, n) for lo, hi, n in rows if n > 0]
    if not rows:
        raise ValueError("empty histogram")
    axes = _LogAxes([lo for lo, _, _ in rows] + [hi for _, hi, _ in rows],
                    [n for _, _, n in rows])
    body = axes.frame(title, xlabel, ylabel)
    floor_y = TOP + axes.h
    for lo, hi, n in rows:
        x0, x1 = axes.px(lo), axes.px(hi)
        y = axes.py(n)
        body.append(f'<rect x="{x0:.2f}" y="{y:.2f}" width="{x1 - x0:.2f}" '
                    f'height="{floor_y - y:.2f}" fill="#7f7f7f" stroke="black"/>')
    return _document(body)
