"""
Closed forms and quadrature rules for the logarithmic kernel ln|x - y|^{-1}.

Piecewise-constant functions are passed around as ``(edges, values)``: ``values[k]``
is the value on ``[edges[k], edges[k+1]]`` and the function vanishes outside
``[edges[0], edges[-1]]``.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np


def second_antiderivative(t):
    """T(t) = t^2 (2 ln|t| - 3) / 4, so that T'' = ln|t| and T(0) = 0."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    nz = t != 0
    tz = t[nz]
    out[nz] = tz * tz * (2.0 * np.log(np.abs(tz)) - 3.0) / 4.0
    return out


def first_antiderivative(t):
    """G(t) = t ln|t| - t, the antiderivative of ln|t| with G(0) = 0."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    nz = t != 0
    tz = t[nz]
    out[nz] = tz * np.log(np.abs(tz)) - tz
    return out


def _jumps(values):
    v = np.concatenate(([0.0], np.asarray(values, dtype=float), [0.0]))
    return np.diff(v)


def pc_bilinear(edges_u, values_u, edges_v, values_v):
    """Exact ``int int u(x) v(y) ln|x - y|^{-1} dx dy`` for piecewise-constant u, v."""
    eu = np.asarray(edges_u, dtype=float)
    ev = np.asarray(edges_v, dtype=float)
    du = _jumps(values_u)
    dv = _jumps(values_v)
    tt = second_antiderivative(eu[:, None] - ev[None, :])
    return float(np.sum((du[:, None] * dv[None, :]) * tt))


def rectangle_log_integral(x0, x1, y0, y1):
    """``int_{x0}^{x1} int_{y0}^{y1} ln|x - y|^{-1} dy dx`` by the corner formula."""
    return pc_bilinear([x0, x1], [1.0], [y0, y1], [1.0])


def pc_log_potential(y, edges, values):
    """``Phi(y) = int v(x) ln|y - x|^{-1} dx`` for piecewise-constant v, vectorised in y."""
    y = np.asarray(y, dtype=float)
    e = np.asarray(edges, dtype=float)
    d = _jumps(values)
    g = first_antiderivative(y[..., None] - e)
    return -(g @ d)


@lru_cache(maxsize=None)
def graded_rule(levels: int = 24, order: int = 12, ratio: float = 0.25):
    """Gauss-Legendre rule on [0, 1] with geometric refinement toward both ends.

    Integrates functions with logarithmic or ``t ln t`` behaviour at the
    endpoints to near machine precision. The rule is mirror symmetric, and the
    innermost nodes next to 1 round to 1.0 in floating point: integrands that
    are singular at 1 should use the reversed nodes as distances to 1.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    half = [0.0] + [0.5 * ratio ** k for k in range(levels, 0, -1)] + [0.5]
    cuts = np.array(half + [1.0 - h for h in reversed(half[:-1])])
    lo, hi = cuts[:-1], cuts[1:]
    nodes = (lo[:, None] + (hi - lo)[:, None] * (x[None, :] + 1.0) / 2.0).ravel()
    weights = ((hi - lo)[:, None] * w[None, :] / 2.0).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def graded_quad(func, lo, hi, **rule):
    """Integrate a vectorised ``func`` over [lo, hi] with :func:`graded_rule`."""
    t, w = graded_rule(**rule)
    width = hi - lo
    return float(np.sum(w * func(lo + width * t)) * width)


def slobodeckij_integral(knots_x, knots_y):
    """``int int_{R^2} ((g(x) - g(y)) / (x - y))^2 dx dy`` for a compact piecewise-linear g.

    ``g`` interpolates ``(knots_x, knots_y)`` linearly and vanishes outside
    ``[knots_x[0], knots_x[-1]]``; its end values must be zero. The inner
    integral over each linear piece is done in closed form, the outer one by
    graded Gauss-Legendre, so no log-kernel identity is used.
    """
    xs = np.asarray(knots_x, dtype=float)
    ys = np.asarray(knots_y, dtype=float)
    if ys[0] != 0.0 or ys[-1] != 0.0:
        raise ValueError("piecewise-linear function must vanish at both ends")
    widths = np.diff(xs)
    slopes = np.diff(ys) / widths
    t, w = graded_rule()
    # the rule is mirror symmetric; reversed nodes give 1 - t without rounding to 0
    tc = t[::-1]
    total = float(np.sum(slopes ** 2 * widths ** 2))
    left, right = xs[0], xs[-1]
    for l in range(len(widths)):
        # distances from the ends of piece l, never rounded to zero
        dlo, dhi = widths[l] * t, widths[l] * tc
        wl = w * widths[l]
        g_lo = ys[l] + slopes[l] * dlo
        g_hi = ys[l + 1] - slopes[l] * dhi
        # both points in the support, different pieces
        for k in range(len(widths)):
            if k == l:
                continue
            s = slopes[k]
            if k > l:
                near = (xs[k] - xs[l + 1]) + dhi  # x_k - y
                far = (xs[k + 1] - xs[l + 1]) + dhi
                p = ys[k] - s * near - g_hi
                inv = 1.0 / near - 1.0 / far
            else:
                far = (xs[l] - xs[k]) + dlo  # y - x_k
                near = (xs[l] - xs[k + 1]) + dlo
                p = ys[k] + s * far - g_lo
                inv = 1.0 / near - 1.0 / far
            logs = np.log(far) - np.log(near)
            sign = 1.0 if k > l else -1.0
            integrand = s * s * widths[k] + 2.0 * s * p * sign * logs + p * p * inv
            total += float(np.sum(wl * integrand))
        # one point outside the support, counted in both orders
        to_left = (xs[l] - left) + dlo
        to_right = (right - xs[l + 1]) + dhi
        total += 2.0 * float(np.sum(wl * (g_lo * g_lo / to_left + g_hi * g_hi / to_right)))
    return total
