"""
Exact multiplicities, dimensions and probabilities of the spinor tensor-power measure.

The probability of the irreducible component with a-coordinates ``a`` in the
N-th tensor power of the spinor representation of so(2n+1) is

    mu(a) = M(a) dim(a) / 2^{nN},

with M the multiplicity and dim the Weyl dimension. Everything here is exact
(Python ints and :class:`fractions.Fraction`) apart from the log-space fast
path :func:`log_probability`.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .weights import (
    ACoordinates,
    AlgebraConfig,
    DEFAULT_ENUMERATION_CAP,
    DynkinLabels,
    EnumerationCapError,
    WeightError,
    acoords_to_orthogonal,
    as_acoords,
    check_config_match,
    dynkin_to_orthogonal,
    enumerate_candidates,
    enumerate_support,
    orthogonal_to_acoords,
    OrthogonalWeight,
)

ORACLE_MAX_N = 6
ORACLE_MAX_POWER = 14
LOG2 = math.log(2.0)


@dataclass(frozen=True)
class MeasureValue:
    """A probability as an exact rational (when available) and its natural log."""

    exact: Fraction | None
    log_value: float

    def __post_init__(self):
        if self.exact is not None and not (0 <= self.exact <= 1):
            raise ValueError(f"probability outside [0, 1]: {self.exact}")


def _vandermonde(a: tuple) -> int:
    p = 1
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            p *= a[i] * a[i] - a[j] * a[j]
    return p


def _half_sums(config: AlgebraConfig, v: int) -> tuple:
    cone = config.cone
    return (cone + v) // 2, (cone - v) // 2


def _rank(config) -> int:
    return config if isinstance(config, int) else config.n


def _checked(config: AlgebraConfig, a) -> ACoordinates:
    a = as_acoords(a)
    check_config_match(a, config)
    return a


def _to_integer(q: Fraction, what: str) -> int:
    if q.denominator != 1:
        raise ArithmeticError(f"{what} did not simplify to an integer: {q}")
    return q.numerator


def multiplicity(config: AlgebraConfig, a) -> int:
    """Multiplicity of the component ``a`` in the N-th spinor tensor power.

    Evaluates the product formula over ``k = 0..n-1``: each ``(N+2k)!`` is
    paired with its two half-sum factorials before multiplying. Weights with
    ``a_1`` beyond the cone give 0.

    Raises
    ------
    WeightError
        If the parity of ``a`` does not match ``N``.
    """
    a = _checked(config, a)
    if a.a[0] > config.cone:
        return 0
    n, N = config.n, config.N
    q = Fraction(1)
    for k in range(n):
        mp, mm = _half_sums(config, a.a[k])
        q *= Fraction(math.factorial(N + 2 * k), 4 ** k * math.factorial(mp) * math.factorial(mm))
    q *= math.prod(a.a) * _vandermonde(a.a)
    return _to_integer(q, "multiplicity")


@lru_cache(maxsize=64)
def _oracle_table(n: int, N: int) -> dict:
    signs = list(itertools.product((1, -1), repeat=n))
    table = {(0,) * n: 1}
    for _ in range(N):
        nxt: dict = {}
        for mu, m in table.items():
            for eps in signs:
                nu = tuple(x + e for x, e in zip(mu, eps))
                if nu[-1] < 0 or any(nu[i] < nu[i + 1] for i in range(n - 1)):
                    continue
                nxt[nu] = nxt.get(nu, 0) + m
        table = nxt
    return table


def oracle_table(config: AlgebraConfig, max_n: int = ORACLE_MAX_N, max_power: int = ORACLE_MAX_POWER) -> dict:
    """All multiplicities by repeated tensoring with the spinor representation.

    The spinor representation is minuscule: tensoring with it adds one of the
    2^n weights ``(+-1/2, ..., +-1/2)`` and keeps the dominant results, each
    exactly once. Keys are doubled orthogonal coordinates.
    """
    if config.n > max_n or config.N > max_power:
        raise EnumerationCapError(
            f"oracle limited to n <= {max_n}, N <= {max_power}; got n={config.n}, N={config.N}"
        )
    return dict(_oracle_table(config.n, config.N))


def oracle_multiplicity(config: AlgebraConfig, a, **caps) -> int:
    a = _checked(config, a)
    x2 = tuple(v - 2 * (config.n - i) + 1 for i, v in enumerate(a.a))
    return oracle_table(config, **caps).get(x2, 0)


def _dimension_prefactor(n: int) -> Fraction:
    den = math.prod(math.factorial(2 * k) for k in range(1, n + 1))
    return Fraction(math.factorial(n), den) * Fraction(2) ** (-n * n + 2 * n)


def dimension(config, a) -> int:
    """Weyl dimension in a-coordinates; ``config`` may be an AlgebraConfig or the rank."""
    a = as_acoords(a)
    n = _rank(config)
    if a.n != n:
        raise WeightError(f"rank mismatch: {a.n} coordinates for n = {n}")
    q = _dimension_prefactor(n) * (_vandermonde(a.a) * math.prod(a.a))
    return _to_integer(q, "dimension")


def dimension_by_roots(config, labels: DynkinLabels) -> int:
    """Weyl dimension as a product over the positive roots ``e_i - e_j, e_i + e_j, e_i``.

    Uses doubled coordinates: ``2(lambda + rho)_i = 2 lambda_i + 2(n - i) + 1``.
    """
    n = _rank(config)
    if labels.n != n:
        raise WeightError(f"rank mismatch: {labels.n} labels for n = {n}")
    lam = dynkin_to_orthogonal(labels).x2
    rho = [2 * (n - i) - 1 for i in range(n)]
    shifted = [lam[i] + rho[i] for i in range(n)]
    q = Fraction(1)
    for i in range(n):
        q *= Fraction(shifted[i], rho[i])
        for j in range(i + 1, n):
            q *= Fraction(shifted[i] - shifted[j], rho[i] - rho[j])
            q *= Fraction(shifted[i] + shifted[j], rho[i] + rho[j])
    return _to_integer(q, "dimension")


def _direct_probability(config: AlgebraConfig, a: ACoordinates) -> Fraction:
    # the single-product form: multiplicity and dimension merged before division
    n, N = config.n, config.N
    q = Fraction(1)
    for k in range(n):
        mp, mm = _half_sums(config, a.a[k])
        q *= Fraction(math.factorial(N + 2 * k), 4 ** k * math.factorial(mp) * math.factorial(mm))
    vd = _vandermonde(a.a)
    q *= vd * vd * math.prod(v * v for v in a.a)
    den = math.prod(math.factorial(2 * k) for k in range(1, n + 1))
    q *= Fraction(math.factorial(n), den) * Fraction(2) ** (-n * n + 2 * n - n * N)
    return q


def _log_fraction(q: Fraction) -> float:
    if q == 0:
        return -math.inf
    return math.log(q.numerator) - math.log(q.denominator)


def plancherel_probability(config: AlgebraConfig, a) -> MeasureValue:
    """Exact probability, computed two ways which must agree exactly."""
    a = _checked(config, a)
    m = multiplicity(config, a)
    p = Fraction(m * dimension(config, a), 2 ** (config.n * config.N))
    if m:
        direct = _direct_probability(config, a)
        if direct != p:
            raise ArithmeticError(f"probability routes disagree at {a.a}: {p} vs {direct}")
    return MeasureValue(p, _log_fraction(p))


@lru_cache(maxsize=256)
def _log_constant(n: int, N: int) -> float:
    terms = [(-n * n + 2 * n - n * N) * LOG2, math.lgamma(n + 1)]
    terms += [-math.lgamma(2 * k + 1) for k in range(1, n + 1)]
    terms += [math.lgamma(N + 2 * k + 1) - 2 * k * LOG2 for k in range(n)]
    return math.fsum(terms)


def log_probability(config: AlgebraConfig, a) -> float:
    """Natural log of the probability via log-gamma; ``-inf`` outside the cone."""
    a = _checked(config, a)
    if a.a[0] > config.cone:
        return -math.inf
    return log_weight(config, a.a) + _log_constant(config.n, config.N)


def log_weight(config: AlgebraConfig, a: tuple) -> float:
    """The a-dependent part of :func:`log_probability` (no validation)."""
    cone = config.cone
    terms = []
    for i, v in enumerate(a):
        terms.append(-math.lgamma((cone + v) // 2 + 1) - math.lgamma((cone - v) // 2 + 1))
        terms.append(2.0 * math.log(v))
        for w in a[i + 1:]:
            terms.append(2.0 * math.log(v * v - w * w))
    return math.fsum(terms)


def normalization_check(config: AlgebraConfig, cap: int = DEFAULT_ENUMERATION_CAP) -> Fraction:
    """``sum M dim / 2^{nN}`` over the support; equals 1 exactly."""
    total = 0
    for a in enumerate_support(config, cap):
        total += multiplicity(config, a) * dimension(config, a)
    return Fraction(total, 2 ** (config.n * config.N))


def support_holes(config: AlgebraConfig, cap: int = DEFAULT_ENUMERATION_CAP) -> list:
    """In-cone, parity-consistent tuples with vanishing multiplicity."""
    return [a for a in enumerate_candidates(config, cap) if multiplicity(config, a) == 0]


def oracle_mismatches(config: AlgebraConfig, cap: int = DEFAULT_ENUMERATION_CAP) -> list:
    """Compare the product formula with the tensoring oracle on every weight.

    Weights reached by the oracle but not enumerated also count as mismatches.
    """
    table = oracle_table(config)
    bad = []
    seen = set()
    for a in enumerate_support(config, cap):
        x2 = acoords_to_orthogonal(a).x2
        seen.add(x2)
        m = multiplicity(config, a)
        if m != table.get(x2, 0):
            bad.append((a.a, m, table.get(x2, 0)))
    for x2, m in table.items():
        if x2 not in seen:
            bad.append((orthogonal_to_acoords(OrthogonalWeight(x2)).a, 0, m))
    return bad


def measure_rows(config: AlgebraConfig, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterable[tuple]:
    for a in enumerate_support(config, cap):
        m = multiplicity(config, a)
        d = dimension(config, a)
        p = Fraction(m * d, 2 ** (config.n * config.N))
        yield a, m, d, p


def format_float(x: float) -> str:
    return f"{x:.9g}"


def write_measure_csv(config: AlgebraConfig, stream, cap: int = DEFAULT_ENUMERATION_CAP):
    """CSV of the full support: a_1..a_n, multiplicity, dimension, probability, log."""
    writer = csv.writer(stream, lineterminator="\n")
    header = [f"a_{i}" for i in range(1, config.n + 1)]
    writer.writerow(header + ["multiplicity", "dimension", "probability_num",
                              "probability_den", "log_probability"])
    for a, m, d, p in measure_rows(config, cap):
        writer.writerow(list(a.a) + [m, d, p.numerator, p.denominator,
                                     format_float(_log_fraction(p))])
