"""
Rotated and rescaled diagram boundaries ``f_n``.

Particle ``i`` sits at ``x_i = a_i / (2n)`` and carries a descending segment of
length ``1/n`` centred on it; the mirror particle at ``-x_i`` carries the mirror
segment. Elsewhere the boundary rises with slope +1, and ``f_n(0) = 1``.
Breakpoints and values are exact rationals.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .weights import ACoordinates, AlgebraConfig, as_acoords, check_config_match


@dataclass(frozen=True)
class DiagramBoundary:
    """Piecewise-linear boundary with slopes +-1 on ``[-h, h]``.

    ``h = c_n / 2`` except when ``a_1 = N + 2n - 1``: the outermost segment then
    reaches ``(a_1 + 1)/(2n)``, half a cell beyond ``c_n / 2``, and ``h`` is
    widened to contain it. Outside ``[-h, h]`` the slope is +1 on both sides.

    Attributes
    ----------
    breakpoints : tuple of Fraction
        ``-h = t_0 < t_1 < ... < t_m = h``.
    slopes : tuple of int
        Slope on ``[t_k, t_{k+1}]``; consecutive entries alternate.
    values : tuple of Fraction
        ``f_n(t_k)``.
    """

    config: AlgebraConfig
    a: ACoordinates
    breakpoints: tuple
    slopes: tuple
    values: tuple
    edges: np.ndarray = field(repr=False, compare=False)
    slope_array: np.ndarray = field(repr=False, compare=False)
    value_array: np.ndarray = field(repr=False, compare=False)

    @property
    def particles(self) -> tuple:
        """Positions ``a_i/(2n)`` and their mirrors, as exact rationals (descending)."""
        n2 = 2 * self.config.n
        pos = tuple(Fraction(v, n2) for v in self.a.a)
        return pos + tuple(-p for p in reversed(pos))

    @property
    def half_width(self) -> Fraction:
        return self.breakpoints[-1]

    @property
    def overflows(self) -> bool:
        """True when the outer segment pokes past ``c_n / 2``."""
        return self.half_width > self.config.c_n / 2

    def density_mass(self) -> Fraction:
        """``int rho_n`` with ``rho_n = (1 - f_n')/4``, exactly."""
        return sum(((1 - s) * (r - l) / 4 for s, l, r in self._pieces()), Fraction(0))

    def slope_integral(self) -> Fraction:
        """``int f_n'`` over ``[-h, h]``, exactly."""
        return sum((s * (r - l) for s, l, r in self._pieces()), Fraction(0))

    def _pieces(self):
        bp = self.breakpoints
        return zip(self.slopes, bp[:-1], bp[1:])

    def rho(self, x):
        """Particle density ``(1 - f_n')/4``; vectorised, right-continuous."""
        x = np.asarray(x, dtype=float)
        k = np.searchsorted(self.edges, x, side="right") - 1
        inside = (k >= 0) & (k < len(self.slope_array))
        out = np.zeros_like(x)
        out[inside] = (1.0 - self.slope_array[k[inside]]) / 4.0
        return out

    def __call__(self, x):
        """Evaluate ``f_n`` (floats), extended with slope +1 outside ``[-h, h]``."""
        x = np.asarray(x, dtype=float)
        e, v = self.edges, self.value_array
        y = np.interp(x, e, v)
        y = np.where(x > e[-1], v[-1] + (x - e[-1]), y)
        return np.where(x < e[0], v[0] + (x - e[0]), y)

    def value_at(self, x: Fraction) -> Fraction:
        """Exact value of ``f_n`` at a rational point."""
        x = Fraction(x)
        bp = self.breakpoints
        if x <= bp[0]:
            return self.values[0] + (x - bp[0])
        if x >= bp[-1]:
            return self.values[-1] + (x - bp[-1])
        for s, l, r, fl in zip(self.slopes, bp[:-1], bp[1:], self.values):
            if l <= x <= r:
                return fl + s * (x - l)
        raise AssertionError("unreachable")


def boundary_from_acoords(a, config: AlgebraConfig) -> DiagramBoundary:
    """Build ``f_n`` for the weight with a-coordinates ``a``.

    Raises
    ------
    WeightError
        For rank or parity mismatch.
    ValueError
        If ``a_1`` exceeds the cone ``N + 2n - 1``.
    """
    a = as_acoords(a)
    check_config_match(a, config)
    if a.a[0] > config.cone:
        raise ValueError(f"a_1 = {a.a[0]} exceeds the cone bound {config.cone}")
    n2 = 2 * config.n
    h = max(config.c_n / 2, Fraction(a.a[0] + 1, n2))
    segments = []
    for v in a.a:
        segments.append((Fraction(v - 1, n2), Fraction(v + 1, n2)))
        segments.append((Fraction(-v - 1, n2), Fraction(-v + 1, n2)))
    segments.sort()
    for (l0, r0), (l1, r1) in zip(segments, segments[1:]):
        # same-parity coordinates at distance >= 2 give touching segments at most
        assert r0 <= l1, f"descending segments overlap: {(l0, r0)} and {(l1, r1)}"

    breaks = [-h]
    slopes = []
    for l, r in segments:
        if l > breaks[-1]:
            slopes.append(1)
            breaks.append(l)
        slopes.append(-1)
        breaks.append(r)
    if h > breaks[-1]:
        slopes.append(1)
        breaks.append(h)
    # merge touching segments so that slopes alternate
    mb, ms = [breaks[0]], []
    for s, r in zip(slopes, breaks[1:]):
        if ms and ms[-1] == s:
            mb[-1] = r
        else:
            ms.append(s)
            mb.append(r)

    # anchor f_n(0) = 1; 0 is a breakpoint or interior to a piece
    vals = [Fraction(0)]
    for s, l, r in zip(ms, mb[:-1], mb[1:]):
        vals.append(vals[-1] + s * (r - l))
    zero_shift = None
    for s, l, r, fl in zip(ms, mb[:-1], mb[1:], vals):
        if l <= 0 <= r:
            zero_shift = fl + s * (0 - l)
            break
    vals = tuple(v - zero_shift + 1 for v in vals)

    arrays = [np.array([float(t) for t in mb]), np.array(ms, dtype=float),
              np.array([float(v) for v in vals])]
    for arr in arrays:
        arr.setflags(write=False)
    b = DiagramBoundary(config, a, tuple(mb), tuple(ms), vals, *arrays)
    if b.density_mass() != 1:
        raise ArithmeticError(f"boundary mass {b.density_mass()} != 1 for a = {a.a}")
    return b


def sup_distance(b: DiagramBoundary, shape, grid: int = 2001) -> float:
    """``sup_x |f_n(x) - f(x)|`` over the real line.

    On each linear piece of ``f_n`` the difference is monotone (``|f'| <= 1``),
    so the supremum is attained at a breakpoint of ``f_n``; beyond both supports
    the difference is constant. Both functions satisfy ``g(-x) = 2 - g(x)``, so
    only ``x >= 0`` is scanned. A uniform grid is added as a safeguard.
    """
    e = b.edges
    far = max(float(e[-1]), shape.half_width)
    pts = np.concatenate((
        e[e >= 0.0],
        [0.0, shape.half_width, shape.endpoint_a, far],
        np.linspace(0.0, far, grid),
    ))
    return float(np.max(np.abs(b(pts) - shape.shape(pts))))
