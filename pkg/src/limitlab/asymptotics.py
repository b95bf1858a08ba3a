"""
Exponential form of the measure and the quadratic functional of the boundary.

For a boundary ``f`` with slope density ``f'`` on ``[-c/2, c/2]``::

    Q[f] = (1/32) int int f'(x) f'(y) ln|x - y|^{-1} dx dy,
    J[f] = Q[f] + C(c).

Slope densities are represented as ``pc + beta * rho_sm`` with ``pc`` a step
function and ``rho_sm`` the smooth part of a limit density, which covers
diagram boundaries (``beta = 0``), limit shapes and their differences. The
bilinear form of two such densities is assembled from exact corner formulas
for the step parts and graded quadrature for the smooth parts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import DiagramBoundary
from .kernel import pc_bilinear
from .limitshape import LimitShape, potential_v0
from .measure import log_probability
from .weights import AlgebraConfig, as_acoords, check_config_match

LOG2 = math.log(2.0)


def _check_c(c: float) -> float:
    c = float(c)
    if not c > 2.0:
        raise ValueError(f"c must exceed 2, got {c}")
    return c


def constant_C(c: float) -> float:
    """``-(c^2/32) ln c + ((c-2)^2/16) ln(c-2) + ((c-1)/4) ln 2 - (3/64)(c-4)^2``."""
    c = _check_c(c)
    return (-c * c * math.log(c) / 32.0
            + (c - 2.0) ** 2 * math.log(c - 2.0) / 16.0
            + (c - 1.0) * LOG2 / 4.0
            - 3.0 * (c - 4.0) ** 2 / 64.0)


# -- slope densities -------------------------------------------------------


@dataclass(frozen=True)
class SlopeDensity:
    """``g' = pc + beta * rho_sm`` restricted to ``[edges[0], edges[-1]]``."""

    edges: np.ndarray
    values: np.ndarray
    beta: float = 0.0
    shape: LimitShape | None = None

    def __post_init__(self):
        if self.beta and self.shape is None:
            raise ValueError("a smooth part needs a limit shape")

    def scaled(self, k: float) -> "SlopeDensity":
        return SlopeDensity(self.edges, k * self.values, k * self.beta, self.shape)

    def __sub__(self, other: "SlopeDensity") -> "SlopeDensity":
        return combine([(1.0, self), (-1.0, other)])

    def __add__(self, other: "SlopeDensity") -> "SlopeDensity":
        return combine([(1.0, self), (1.0, other)])

    def pc_value(self, x):
        x = np.asarray(x, dtype=float)
        k = np.searchsorted(self.edges, x, side="right") - 1
        ok = (k >= 0) & (k < len(self.values))
        out = np.zeros_like(x)
        out[ok] = self.values[k[ok]]
        return out

    def __call__(self, x):
        out = self.pc_value(x)
        if self.beta:
            out = out + self.beta * self.shape.rho_smooth(x)
        return out

    def total(self) -> float:
        """``int g'``; for a compactly supported ``g`` this vanishes."""
        s = float(np.sum(np.diff(self.edges) * self.values))
        if self.beta:
            s += self.beta * 2.0 * float(self.shape.smooth_mass_to(self.shape.endpoint_a))
        return s


def combine(terms) -> SlopeDensity:
    """Linear combination of slope densities on the common refinement of their steps."""
    shape = None
    beta = 0.0
    for k, s in terms:
        if s.beta:
            if shape is not None and shape.c != s.shape.c:
                raise ValueError(f"smooth parts with different c: {shape.c} and {s.shape.c}")
            shape = s.shape
            beta += k * s.beta
    edges = np.unique(np.concatenate([s.edges for _, s in terms]))
    mids = 0.5 * (edges[:-1] + edges[1:])
    values = np.zeros_like(mids)
    for k, s in terms:
        values = values + k * s.pc_value(mids)
    return SlopeDensity(edges, values, beta, shape if beta else None)


def slope_density(f) -> SlopeDensity:
    """Slope density of a boundary, a limit shape, a deviation or a SlopeDensity."""
    if isinstance(f, SlopeDensity):
        return f
    if isinstance(f, DiagramBoundary):
        return SlopeDensity(f.edges, f.slope_array)
    if isinstance(f, LimitShape):
        e, v, beta = f.slope_decomposition()
        return SlopeDensity(e, v, beta, f if beta else None)
    if isinstance(f, DeviationFunction):
        return f.slope
    raise TypeError(f"no slope density for {type(f).__name__}")


def bilinear(u, v) -> float:
    """``int int u(x) v(y) ln|x - y|^{-1} dx dy`` for two slope densities."""
    u, v = slope_density(u), slope_density(v)
    total = pc_bilinear(u.edges, u.values, v.edges, v.values)
    if v.beta:
        total += v.beta * v.shape.smooth_pc_cross(u.edges, u.values)
    if u.beta:
        total += u.beta * u.shape.smooth_pc_cross(v.edges, v.values)
    if u.beta and v.beta:
        if u.shape.c != v.shape.c:
            raise ValueError("smooth parts with different c")
        total += u.beta * v.beta * u.shape.smooth_energy()
    return total


def quadratic_Q(f) -> float:
    """``Q[f] = (1/32) B(f', f')`` over the domain of ``f'``."""
    s = slope_density(f)
    return float(bilinear(s, s)) / 32.0


def _shape_c(f) -> float:
    if isinstance(f, DiagramBoundary):
        return f.config.c
    if isinstance(f, LimitShape):
        return f.c
    raise TypeError("J needs a DiagramBoundary or a LimitShape")


@dataclass(frozen=True)
class FunctionalBreakdown:
    """``J = Q_part + C_part``; ``L_part`` is filled when a reference shape is used.

    For :func:`decompose` the reference quantities are kept as well:
    ``J_shape = J[f]``, ``Q_delta = Q[f_n - f]`` and the relative residual of
    ``J[f_n] = J[f] + Q[delta] + L[delta]``.
    """

    J: float
    Q_part: float
    C_part: float
    L_part: float | None = None
    J_shape: float | None = None
    Q_delta: float | None = None
    residual: float | None = None


def functional_J(f, c: float | None = None) -> FunctionalBreakdown:
    c = _shape_c(f) if c is None else float(c)
    q = quadratic_Q(f)
    k = constant_C(c)
    return FunctionalBreakdown(q + k, q, k)


# -- deviations --------------------------------------------------------------


@dataclass(frozen=True)
class DeviationFunction:
    """A compactly supported Lipschitz function described by its slope density.

    ``evaluate`` integrates the slope from the left end of the support.
    """

    slope: SlopeDensity
    lipschitz: float
    support: tuple

    @classmethod
    def from_knots(cls, knots_x, knots_y) -> "DeviationFunction":
        """Piecewise-linear interpolant of knots with zero end values."""
        x = np.asarray(knots_x, dtype=float)
        y = np.asarray(knots_y, dtype=float)
        if y[0] != 0.0 or y[-1] != 0.0:
            raise ValueError("a compactly supported function must vanish at both ends")
        slopes = np.diff(y) / np.diff(x)
        return cls(SlopeDensity(x, slopes), float(np.max(np.abs(slopes))), (x[0], x[-1]))

    @classmethod
    def between(cls, fn, shape, tol: float = 1e-9) -> "DeviationFunction":
        """``f_n - f`` on ``[-c/2, c/2]``; both slopes are bounded by 1."""
        if isinstance(fn, DiagramBoundary) and isinstance(shape, LimitShape):
            _check_fit(fn, shape)
        d = slope_density(fn) - slope_density(shape)
        left, right = float(d.edges[0]), float(d.edges[-1])
        gap = float(fn(left)) - float(shape.shape(left))
        if abs(gap) > tol or abs(d.total()) > tol:
            raise ValueError("difference is not compactly supported (end values differ)")
        return cls(d, 2.0, (left, right))

    def evaluate(self, x):
        """Value at ``x`` by exact integration of the step part plus the smooth mass."""
        x = np.asarray(x, dtype=float)
        s = self.slope
        e = s.edges
        xc = np.clip(x, e[0], e[-1])
        cum = np.concatenate(([0.0], np.cumsum(np.diff(e) * s.values)))
        k = np.clip(np.searchsorted(e, xc, side="right") - 1, 0, len(s.values) - 1)
        out = cum[k] + s.values[k] * (xc - e[k])
        if s.beta:
            m = s.shape.smooth_mass_signed(xc) - s.shape.smooth_mass_signed(e[0])
            out = out + s.beta * m
        return out

    def sup_norm(self, grid: int = 4001) -> float:
        e = self.slope.edges
        pts = np.concatenate((e, np.linspace(e[0], e[-1], grid)))
        return float(np.max(np.abs(self.evaluate(pts))))


def _check_fit(fn: DiagramBoundary, shape: LimitShape, tol: float = 1e-12):
    if abs(fn.config.c - shape.c) > tol * max(1.0, shape.c):
        raise ValueError(f"boundary has c_n = {fn.config.c} but the shape has c = {shape.c}")
    if fn.edges[-1] > shape.half_width * (1.0 + tol):
        raise ValueError(
            "diagram reaches the wall: its last segment extends beyond c/2, so the "
            "difference is not supported in [-c/2, c/2]"
        )


def distance_dQ(f1, f2) -> float:
    """``d_Q(f1, f2) = Q[f1 - f2]^{1/2}``; the difference must be compactly supported."""
    d = slope_density(f1) - slope_density(f2)
    if abs(d.total()) > 1e-9:
        raise ValueError("difference is not compactly supported (slopes differ at the ends)")
    return math.sqrt(max(quadratic_Q(d), 0.0))


def linear_term_L(delta, shape: LimitShape) -> float:
    """``L[delta] = (1/16) B(f', delta')`` for the limit shape ``f``."""
    return float(bilinear(slope_density(shape), slope_density(delta))) / 16.0


def decompose(fn: DiagramBoundary, shape: LimitShape) -> FunctionalBreakdown:
    """Evaluate both sides of ``J[f_n] = J[f] + Q[delta] + L[delta]``.

    ``J[f_n]`` uses only corner formulas; the right-hand side uses the mixed
    quadratures, so the residual measures quadrature error.
    """
    _check_fit(fn, shape)
    jn = functional_J(fn, shape.c)
    jf = functional_J(shape)
    delta = slope_density(fn) - slope_density(shape)
    qd = quadratic_Q(delta)
    ld = linear_term_L(delta, shape)
    rhs = jf.J + qd + ld
    resid = abs(jn.J - rhs) / max(abs(jn.J), 1e-300)
    return FunctionalBreakdown(jn.J, jn.Q_part, jn.C_part, ld, jf.J, qd, resid)


def sup_norm_constant(lipschitz: float, radius: float) -> float:
    """A constant ``C1`` with ``||g||_inf <= C1 Q[g]^{1/4}``.

    For ``g`` supported in ``[-R, R]`` with Lipschitz constant ``L``, pairs
    with one point outside the support give ``Q[g] >= M^3 / (24 L R)`` where
    ``M = ||g||_inf``; with ``M <= L R`` this yields ``C1 = (24)^{1/4} sqrt(L R)``.
    """
    return 24.0 ** 0.25 * math.sqrt(lipschitz * radius)


# -- exponential form of the measure ------------------------------------------


def potential_V0(c: float, u):
    """External potential ``V0(u)``; see :func:`limitlab.limitshape.potential_v0`."""
    out = potential_v0(c, u)
    return float(out) if np.ndim(out) == 0 else out


def _log_cn(n: int, N: int) -> float:
    terms = [(-n * n + 2 * n - n * N) * LOG2, math.lgamma(n + 1)]
    terms += [-math.lgamma(2 * k + 1) for k in range(1, n + 1)]
    terms += [math.lgamma(N + 2 * k + 1) - 2 * k * LOG2 for k in range(n)]
    return math.fsum(terms)


def log_weight_asymptotic(config: AlgebraConfig, a) -> float:
    """Stirling form of the log probability over the mirrored particle system.

    ``sum_{i<j} ln|a_i - a_j| - sum_l [2n V0(a_l/2n) + e_n(a_l)] - ln Z_n`` with
    ``e_n(u) = (1/4) ln((cn)^2 - u^2) - (1/2) ln|u|`` over the ``2n`` mirrored
    coordinates, and ``ln Z_n`` built from the exact ``C_n`` and
    ``C~_n = pi exp(cn ln n - cn)``.

    Raises
    ------
    ValueError
        At ``a_1 = cn``, where ``e_n`` is singular.
    """
    a = as_acoords(a)
    check_config_match(a, config)
    n, N, cn = config.n, config.N, config.cone
    if a.a[0] >= cn:
        raise ValueError(f"asymptotic form undefined for a_1 = {a.a[0]} >= cn = {cn}")
    c = cn / n
    al = a.mirrored()
    terms = []
    for i in range(2 * n):
        for j in range(i + 1, 2 * n):
            terms.append(math.log(abs(al[i] - al[j])))
    for v in al:
        terms.append(-2.0 * n * float(potential_v0(c, v / (2.0 * n))))
        terms.append(-0.25 * math.log(cn * cn - v * v) + 0.5 * math.log(abs(v)))
    log_ct = math.log(math.pi) + cn * math.log(n) - cn
    terms += [_log_cn(n, N), -n * log_ct, -n * LOG2]
    return math.fsum(terms)


def stirling_remainder_bound(config: AlgebraConfig, a) -> float:
    """``sum 1/(12 m)`` over the a-dependent factorial arguments ``m``.

    The asymptotic form exceeds the exact log probability by a positive
    amount no larger than this.
    """
    a = as_acoords(a)
    cn = config.cone
    return math.fsum(1.0 / (12.0 * m) for v in a.a for m in ((cn + v) // 2, (cn - v) // 2) if m > 0)


def measure_functional_gap(config: AlgebraConfig, a, log_prob: float | None = None) -> float:
    """``| -log mu(a)/(2n)^2 - J[f_n] |`` at the finite-size ``c_n``."""
    from .boundary import boundary_from_acoords

    b = boundary_from_acoords(a, config)
    lp = log_probability(config, a) if log_prob is None else log_prob
    return abs(-lp / (2 * config.n) ** 2 - functional_J(b).J)
