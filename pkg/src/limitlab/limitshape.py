"""
Closed-form limit density and limit shape of the rescaled diagram boundaries.

For a parameter ``c >= 2`` the limit density is supported in ``[-c/2, c/2]``
and has a soft part on ``(-a, a)`` with ``a = sqrt(2c - 4)``:

* ``c > 4``: density equals the smooth arctan expression ``rho_sm`` on ``(-a, a)``
  and vanishes elsewhere,
* ``c < 4``: density equals ``1/2 - rho_sm`` on ``(-a, a)`` and saturates at
  ``1/2`` on the frozen zone ``a <= |x| <= c/2``,
* ``c = 4``: constant density ``1/4`` on ``(-2, 2)``.

The shape is ``f(x) = 1 + int_0^x (1 - 4 rho)``.
"""
from __future__ import annotations

import csv
import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .kernel import graded_rule, pc_log_potential

SUPERCRITICAL = "supercritical"
CRITICAL = "critical"
SUBCRITICAL = "subcritical"

_CUMULATIVE_PANELS = 64
_GL_ORDER = 16


def _check_c(c: float) -> float:
    c = float(c)
    if not math.isfinite(c) or c < 2.0:
        raise ValueError(f"c must be a finite number >= 2, got {c}")
    return c


def endpoint_residual(c: float) -> float:
    """Residual of ``(c/4)(1 - sqrt(1 - (2a/c)^2)) = rhs`` at ``a = sqrt(2c - 4)``.

    The right-hand side is 1 for ``c >= 4`` and ``(c - 2)/2`` below.
    """
    c = _check_c(c)
    a = math.sqrt(2.0 * c - 4.0)
    inner = max(1.0 - (2.0 * a / c) ** 2, 0.0)
    lhs = c / 4.0 * (1.0 - math.sqrt(inner))
    rhs = 1.0 if c >= 4.0 else (c - 2.0) / 2.0
    return lhs - rhs


def endpoint(c: float, tol: float = 1e-12) -> float:
    """Support endpoint ``a = sqrt(2c - 4)`` of the soft part of the density."""
    c = _check_c(c)
    res = endpoint_residual(c)
    if abs(res) >= tol * max(1.0, c):
        raise ArithmeticError(f"endpoint equation residual {res:.3e} at c = {c}")
    return math.sqrt(2.0 * c - 4.0)


@dataclass(frozen=True)
class EquilibriumReport:
    """Effective-potential check of an equilibrium measure.

    Attributes
    ----------
    ell_estimate : float
        Value of the effective potential at 0 (the Lagrange constant).
    max_residual_on_support : float
        ``max |U(x) - ell|`` over grid points in ``(-a, a)``.
    min_slack_off_support : float
        ``min U(x) - ell`` over grid points in ``a < |x| < c/2``; ``inf`` when empty.
    grid : str
        Description of the evaluation points.
    """

    ell_estimate: float
    max_residual_on_support: float
    min_slack_off_support: float
    grid: str
    points_on_support: int = 0
    points_off_support: int = 0


class LimitShape:
    """Limit density, shape and potentials for a fixed ``c >= 2``.

    The cumulative integral of the soft density is built lazily under a lock,
    after which every method is read-only.
    """

    def __init__(self, c: float):
        self.c = _check_c(c)
        self.endpoint_a = math.sqrt(2.0 * self.c - 4.0)
        self.half_width = self.c / 2.0
        if self.c > 4.0:
            self.regime = SUPERCRITICAL
        elif self.c == 4.0:
            self.regime = CRITICAL
        else:
            self.regime = SUBCRITICAL
        self._lock = threading.Lock()
        self._cumulative = None
        self._energy = None

    def __repr__(self):
        return f"LimitShape(c={self.c!r})"

    @property
    def has_soft_part(self) -> bool:
        return self.regime != CRITICAL and self.endpoint_a > 0.0

    # -- densities ---------------------------------------------------------

    def rho_smooth(self, x):
        """The arctan expression on ``(-a, a)``, zero outside; vectorised."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        if not self.has_soft_part:
            return out
        c, a = self.c, self.endpoint_a
        inside = np.abs(x) < a
        xi = x[inside]
        s = np.abs(c - 4.0) * np.sqrt(np.maximum(a * a - xi * xi, 0.0))
        # numerator signs at s = 0 are fixed (second > 0, first < 0 for c != 4),
        # so atan2 returns the correct endpoint limits without special cases
        out[inside] = (np.arctan2(-c * (xi - 4.0) - 8.0, s)
                       + np.arctan2(c * (xi + 4.0) - 8.0, s)) / (4.0 * np.pi)
        return out

    def density(self, x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        if self.regime == CRITICAL:
            return np.where(ax < 2.0, 0.25, 0.0)
        sm = self.rho_smooth(x)
        if self.regime == SUPERCRITICAL:
            return sm
        return np.where(ax <= self.half_width, 0.5 - sm, 0.0)

    def slope(self, x):
        """``f'(x) = 1 - 4 rho(x)``."""
        return 1.0 - 4.0 * self.density(x)

    def slope_decomposition(self):
        """``f' = pc + beta * rho_sm`` on ``[-c/2, c/2]`` with ``pc`` piecewise constant.

        Returns ``(edges, values, beta)``.
        """
        h = self.half_width
        if self.regime == SUPERCRITICAL:
            return np.array([-h, h]), np.array([1.0]), -4.0
        if self.regime == CRITICAL:
            return np.array([-h, h]), np.array([0.0]), 0.0
        return np.array([-h, h]), np.array([-1.0]), 4.0 if self.has_soft_part else 0.0

    # -- cumulative integral and shape -------------------------------------

    def _build_cumulative(self):
        theta = np.linspace(0.0, np.pi / 2.0, _CUMULATIVE_PANELS + 1)
        gx, gw = np.polynomial.legendre.leggauss(_GL_ORDER)
        lo, hi = theta[:-1], theta[1:]
        nodes = lo[:, None] + (hi - lo)[:, None] * (gx[None, :] + 1.0) / 2.0
        vals = self._theta_integrand(nodes) * ((hi - lo)[:, None] * gw[None, :] / 2.0)
        cum = np.concatenate(([0.0], np.cumsum(vals.sum(axis=1))))
        return theta, cum, gx, gw

    def _theta_integrand(self, theta):
        a = self.endpoint_a
        return self.rho_smooth(a * np.sin(theta)) * a * np.cos(theta)

    def _cumulative_tables(self):
        if self._cumulative is None:
            with self._lock:
                if self._cumulative is None:
                    self._cumulative = self._build_cumulative()
        return self._cumulative

    def smooth_mass_to(self, x):
        """``int_0^x rho_sm`` for ``x >= 0`` (clamped at ``a``); vectorised."""
        x = np.asarray(x, dtype=float)
        if not self.has_soft_part:
            return np.zeros_like(x)
        a = self.endpoint_a
        theta_grid, cum, gx, gw = self._cumulative_tables()
        th = np.arcsin(np.clip(x / a, 0.0, 1.0))
        k = np.minimum(np.searchsorted(theta_grid, th, side="right") - 1, _CUMULATIVE_PANELS - 1)
        lo = theta_grid[k]
        width = th - lo
        nodes = lo[..., None] + width[..., None] * (gx + 1.0) / 2.0
        part = np.sum(self._theta_integrand(nodes) * gw, axis=-1) * width / 2.0
        return cum[k] + part

    def smooth_mass_signed(self, x):
        """``int_0^x rho_sm`` for any real ``x``."""
        x = np.asarray(x, dtype=float)
        return np.sign(x) * self.smooth_mass_to(np.abs(x))

    def mass_to(self, x):
        """``int_0^x rho`` for any real ``x`` (odd in ``x``)."""
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        if self.regime == CRITICAL:
            m = 0.25 * np.minimum(ax, 2.0)
        elif self.regime == SUPERCRITICAL:
            m = self.smooth_mass_to(ax)
        else:
            m = 0.5 * np.minimum(ax, self.half_width) - self.smooth_mass_to(ax)
        return np.sign(x) * m

    def shape(self, x):
        """Limit shape ``f(x) = 1 + x - 4 int_0^x rho``; satisfies ``f(-x) = 2 - f(x)``."""
        x = np.asarray(x, dtype=float)
        return 1.0 + x - 4.0 * self.mass_to(x)

    # -- log potentials ------------------------------------------------------

    def smooth_log_potential(self, x):
        """``P(x) = int rho_sm(y) ln|x - y|^{-1} dy``, vectorised over ``x``.

        In ``y = a sin(theta)`` the integral is split at the singular angle and
        distances are formed from angle offsets, ``sin u - sin v =
        2 cos((u + v)/2) sin((u - v)/2)``, so they never round to zero.
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros_like(x)
        if not self.has_soft_part:
            return out
        a = self.endpoint_a
        t, w = graded_rule()
        for idx, xv in np.ndenumerate(x):
            if abs(xv) < a:
                anchor = math.asin(xv / a)
                base = 0.0
            else:
                anchor = math.copysign(np.pi / 2.0, xv)
                base = xv - math.copysign(a, xv)
            total = 0.0
            for span in (anchor + np.pi / 2.0, np.pi / 2.0 - anchor):
                if span <= 0.0:
                    continue
                sign = -1.0 if span == anchor + np.pi / 2.0 else 1.0
                delta = sign * span * t
                th = anchor + delta
                dist = np.abs(base + 2.0 * a * np.cos(anchor + delta / 2.0) * np.sin(-delta / 2.0))
                total -= span * float(np.sum(w * self._theta_integrand(th) * np.log(dist)))
            out[idx] = total
        return out

    def smooth_energy(self) -> float:
        """``int int rho_sm(x) rho_sm(y) ln|x - y|^{-1} dx dy``, cached."""
        if self._energy is None:
            if not self.has_soft_part:
                value = 0.0
            else:
                t, w = graded_rule(levels=6, order=16)
                th = -np.pi / 2.0 + np.pi * t
                xs = self.endpoint_a * np.sin(th)
                value = float(np.pi * np.sum(w * self._theta_integrand(th)
                                             * self.smooth_log_potential(xs)))
            with self._lock:
                self._energy = value
        return self._energy

    def smooth_pc_cross(self, edges, values) -> float:
        """``int rho_sm(y) Phi(y) dy`` with ``Phi`` the log potential of a step function."""
        if not self.has_soft_part:
            return 0.0
        a = self.endpoint_a
        e = np.asarray(edges, dtype=float)
        inner = e[(e > -a) & (e < a)]
        cuts = np.unique(np.concatenate(([-np.pi / 2.0, np.pi / 2.0], np.arcsin(inner / a))))
        t, w = graded_rule()
        total = 0.0
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            th = lo + (hi - lo) * t
            phi = pc_log_potential(a * np.sin(th), e, values)
            total += (hi - lo) * float(np.sum(w * self._theta_integrand(th) * phi))
        return total

    def external_potential(self, x):
        """``V0(x) = (1/4)[(c/2 + x) ln(c/2 + x) + (c/2 - x) ln(c/2 - x)]``."""
        return potential_v0(self.c, x)

    # -- integral checks -----------------------------------------------------

    def check_normalization(self):
        """Total mass by adaptive quadrature, and the mass of ``rho_sm`` when ``c < 4``."""
        h, a = self.half_width, self.endpoint_a
        pts = [p for p in (-a, a) if -h < p < h]
        f = lambda x: float(self.density(x))
        total = quad(f, -h, h, points=pts or None, epsabs=1e-13, epsrel=1e-13, limit=400)[0]
        rho1 = None
        if self.regime == SUBCRITICAL:
            if self.has_soft_part:
                g = lambda x: 0.5 - f(x)
                rho1 = quad(g, -h, h, points=pts or None, epsabs=1e-13, epsrel=1e-13, limit=400)[0]
            else:
                rho1 = 0.0
        return total, rho1

    def equilibrium_residuals(self, grid_size: int = 256) -> EquilibriumReport:
        """Check the effective potential ``U = P + V0`` on a symmetric open grid.

        ``P`` is the log potential of ``rho`` for ``c > 4`` and of ``rho_sm``
        (the deficit ``1/2 - rho``) for ``c < 4``; in both cases ``U`` must be
        constant on ``(-a, a)`` and not smaller than that constant beyond.
        """
        if not self.has_soft_part:
            raise ValueError("equilibrium check needs c > 2 and c != 4")
        if grid_size < 64:
            raise ValueError("grid_size must be at least 64")
        c, a = self.c, self.endpoint_a
        xs = -c / 2.0 + (np.arange(grid_size) + 0.5) * c / grid_size
        u = self.smooth_log_potential(xs) + potential_v0(c, xs)
        ell = float(self.smooth_log_potential(0.0)[0] + potential_v0(c, 0.0))
        on = np.abs(xs) < a
        off = ~on
        resid = float(np.max(np.abs(u[on] - ell))) if on.any() else 0.0
        slack = float(np.min(u[off] - ell)) if off.any() else math.inf
        desc = f"{grid_size} midpoints of [-{c / 2:g}, {c / 2:g}]"
        return EquilibriumReport(ell, resid, slack, desc, int(on.sum()), int(off.sum()))

    def density_integral_form(self, x: float) -> float:
        """Density from its singular-integral representation.

        With ``h(s) = (1/4) ln((c/2 + s)/(c/2 - s))`` and ``s = a sin(phi)``::

            r(x) = sqrt(a^2 - x^2) / pi^2 * int (h(s) - h(x)) / (s - x) dphi

        over ``phi`` in ``(-pi/2, pi/2)``. Subtracting ``h(x)`` removes the
        principal value, since ``PV int dphi / (a sin(phi) - x) = 0`` inside
        the support. The density is ``r`` for ``c > 4`` and ``1/2 - r`` for
        ``c < 4``.
        """
        if self.c <= 2.0 or self.regime == CRITICAL:
            raise ValueError("integral form needs c > 2 and c != 4")
        x = float(x)
        a = self.endpoint_a
        if abs(x) >= a - 1e-9:
            raise ValueError(f"x = {x} is within 1e-9 of the endpoint or outside (-a, a)")
        hc = self.half_width

        def h(s):
            return 0.25 * math.log((hc + s) / (hc - s))

        hx = h(x)

        def integrand(p):
            s = a * math.sin(p)
            d = s - x
            if d == 0.0:
                return 0.0
            return (h(s) - hx) / d

        p0 = math.asin(x / a)
        total = 0.0
        for lo, hi in ((-np.pi / 2.0, p0), (p0, np.pi / 2.0)):
            total += quad(integrand, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        r = math.sqrt(a * a - x * x) * total / np.pi ** 2
        return r if self.regime == SUPERCRITICAL else 0.5 - r

    def write_csv(self, stream, grid: int, lo: float | None = None, hi: float | None = None):
        """CSV with columns x, rho, f on ``grid`` equally spaced points."""
        if grid < 2:
            raise ValueError("grid must be at least 2")
        lo = -self.half_width if lo is None else lo
        hi = self.half_width if hi is None else hi
        xs = np.linspace(lo, hi, grid)
        rho = self.density(xs)
        f = self.shape(xs)
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["x", "rho", "f"])
        for row in zip(xs, rho, f):
            writer.writerow([f"{v:.9g}" for v in row])


def potential_v0(c: float, u):
    """External potential ``V0``; defined for ``|u| <= c/2`` with ``0 ln 0 = 0``."""
    u = np.asarray(u, dtype=float)
    h = float(c) / 2.0
    if np.any(np.abs(u) > h * (1.0 + 1e-15)):
        raise ValueError(f"V0 is defined only for |u| <= c/2 = {h}")
    p = np.maximum(h + u, 0.0)
    m = np.maximum(h - u, 0.0)
    xlogx = lambda z: np.where(z > 0.0, z * np.log(np.where(z > 0.0, z, 1.0)), 0.0)
    return 0.25 * (xlogx(p) + xlogx(m))


@lru_cache(maxsize=64)
def limit_shape(c: float) -> LimitShape:
    """Shared :class:`LimitShape` instance for ``c``."""
    return LimitShape(c)


def density(c: float, x):
    out = limit_shape(_check_c(c)).density(x)
    return float(out) if np.ndim(out) == 0 else out


def shape(c: float, x):
    out = limit_shape(_check_c(c)).shape(x)
    return float(out) if np.ndim(out) == 0 else out


def density_integral_form(c: float, x: float) -> float:
    return limit_shape(_check_c(c)).density_integral_form(x)


def check_normalization(c: float):
    return limit_shape(_check_c(c)).check_normalization()


def equilibrium_residuals(c: float, grid_size: int = 256) -> EquilibriumReport:
    return limit_shape(_check_c(c)).equilibrium_residuals(grid_size)
