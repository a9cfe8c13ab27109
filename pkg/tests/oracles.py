"""Independent reference computations used across the test suite.

Everything here deliberately avoids the code paths under test: wrapped
phase comes from modulo arithmetic instead of arctan2, fringe values
from math.cos per pixel, model arithmetic from fractions/Decimal, and
least squares from closed-form normal equations over exact rationals.
Expected values asserted in the tests are produced by these routines
(or frozen from them), never by the implementation itself.
"""

import math
from decimal import Decimal, getcontext
from fractions import Fraction

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_reference(phi):
    """Wrap radians into (-pi, pi] via modulo arithmetic."""
    phi = np.asarray(phi, dtype=np.float64)
    wrapped = np.mod(phi + np.pi, TWO_PI) - np.pi
    return np.where(wrapped == -np.pi, np.pi, wrapped)


def fringe_value_reference(x, f0, a, b, shift_index):
    """Scalar fringe intensity via math.cos (no numpy broadcasting)."""
    return a + b * math.cos(TWO_PI * f0 * x + shift_index * (math.pi / 2.0))


def line_fit_reference(u_values, y_values):
    """Exact-rational least-squares line through (u, y) pairs.

    Returns (slope, intercept) as Fractions; y values are converted via
    Fraction(float) so the float inputs are represented exactly.
    """
    u = [Fraction(v) for v in u_values]
    y = [Fraction(float(v)) for v in y_values]
    n = len(u)
    su = sum(u)
    sy = sum(y)
    suu = sum(v * v for v in u)
    suy = sum(uv * yv for uv, yv in zip(u, y))
    denom = n * suu - su * su
    slope = (n * suy - su * sy) / denom
    intercept = (sy - slope * su) / n
    return slope, intercept


def cubic_slope_bias_9pt():
    """Slope bias of a unit cubic c*(x-x0)^3 seen by a 9-point line fit.

    For the symmetric window u = -4..4 the least-squares slope of u^3
    is sum(u^4)/sum(u^2); exact rational.
    """
    u = range(-4, 5)
    return Fraction(sum(v**4 for v in u), sum(v**2 for v in u))


def division_forward_reference(lam, r_u):
    """r_u / (1 + lam*r_u^2) as an exact Fraction."""
    lam = Fraction(str(lam))
    r_u = Fraction(str(r_u))
    return r_u / (1 + lam * r_u * r_u)


def division_delta_r_reference(lam, r_d, digits=50):
    """Ground-truth displacement r_u(r_d) - r_d via Decimal sqrt.

    Uses the closed-form inverse of the division model evaluated at
    `digits` precision, far beyond float64.
    """
    getcontext().prec = digits
    lam_d = Decimal(str(lam))
    r_d_d = Decimal(str(r_d))
    disc = Decimal(1) - Decimal(4) * lam_d * r_d_d * r_d_d
    if disc < 0:
        raise ValueError("radius outside the invertible range")
    r_u = Decimal(2) * r_d_d / (Decimal(1) + disc.sqrt())
    return float(r_u - r_d_d)


def published_cubic_reference():
    """(coefficients, value at r=1000) of the published extension cubic.

    The coefficients are quoted high order first; the reference value
    is recomputed by exact rational arithmetic here, independently of
    any polynomial evaluator under test.
    """
    coeffs = (-5.8123e-9, 8.7184e-9, 7.5508e-8, -3.9207e-8)
    exact = sum(Fraction(str(c)) * Fraction(1000) ** p
                for c, p in zip(coeffs, (3, 2, 1, 0)))
    return coeffs, float(exact)


# ---------------------------------------------------------------------------
# edge straightness metrology for checkerboard round trips


def trace_vertical_edge(image, x_edge, rows, search=10, min_contrast=100.0):
    """Subpixel x of a vertical edge per row: mid-level crossing at the
    max-gradient step inside a window around x_edge.

    Returns an (n, 2) array of (row, x) samples; rows without enough
    local contrast are skipped.
    """
    image = np.asarray(image, dtype=np.float64)
    w = image.shape[1]
    points = []
    for y in rows:
        lo = max(0, int(round(x_edge)) - search)
        hi = min(w - 1, int(round(x_edge)) + search)
        segment = image[y, lo:hi + 1]
        if segment.max() - segment.min() < min_contrast:
            continue
        mid = 0.5 * (segment.max() + segment.min())
        steps = np.diff(segment)
        i = int(np.argmax(np.abs(steps)))
        if steps[i] == 0.0:
            continue
        points.append((y, lo + i + (mid - segment[i]) / steps[i]))
    return np.array(points)


def edge_straightness_rms(image, edge_columns, rows):
    """Pooled RMS of line-fit residuals over traced vertical edges."""
    residuals = []
    for x_edge in edge_columns:
        pts = trace_vertical_edge(image, x_edge, rows)
        if len(pts) < 30:
            raise ValueError(f"too few edge samples near column {x_edge}")
        coeffs = np.polyfit(pts[:, 0], pts[:, 1], 1)
        residuals.append(pts[:, 1] - np.polyval(coeffs, pts[:, 0]))
    residuals = np.concatenate(residuals)
    return float(np.sqrt(np.mean(residuals**2)))


def checkerboard_rows(square=64, height=512, margin=4, top=68, bottom=445):
    """Rows safe for vertical-edge tracing: away from horizontal edges."""
    banned = set()
    for boundary in range(0, height + square, square):
        for d in range(-margin, margin):
            banned.add(boundary + d)
    return [y for y in range(top, bottom) if y not in banned]
