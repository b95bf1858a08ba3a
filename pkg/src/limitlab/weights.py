"""
Coordinate systems for dominant integral weights of so(2n+1).

Three equivalent descriptions of a dominant weight are used:

* Dynkin labels ``l_1, ..., l_n`` (coefficients on the fundamental weights),
* orthogonal coordinates ``lambda_i``, stored doubled (``2 lambda_i``) so that
  spin weights stay integral,
* the shifted coordinates ``a_i = 2 lambda_i + 2(n - i) + 1`` in which the
  tensor-power measure factorises.

All types are frozen dataclasses holding tuples of Python ints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

DEFAULT_ENUMERATION_CAP = 2_000_000


class WeightError(ValueError):
    """Raised for tuples that violate the invariants of a weight type."""


class EnumerationCapError(RuntimeError):
    """Raised when an exhaustive computation would exceed its size cap."""


def _int_tuple(values, name: str) -> tuple:
    out = []
    for v in values:
        if isinstance(v, bool) or int(v) != v:
            raise WeightError(f"{name}: entries must be integers, got {v!r}")
        out.append(int(v))
    return tuple(out)


@dataclass(frozen=True)
class AlgebraConfig:
    """Rank ``n`` of so(2n+1) together with the tensor power ``N``.

    Attributes
    ----------
    n, N : int
        Rank and tensor power, both at least 1.
    """

    n: int
    N: int

    def __post_init__(self):
        for name in ("n", "N"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise WeightError(f"{name} must be a positive integer, got {v!r}")

    @property
    def cone(self) -> int:
        """Largest admissible coordinate, ``N + 2n - 1`` (also written ``c_n n``)."""
        return self.N + 2 * self.n - 1

    @property
    def c_n(self) -> Fraction:
        """Finite-size ratio ``(N + 2n - 1) / n`` as an exact rational."""
        return Fraction(self.cone, self.n)

    @property
    def c(self) -> float:
        return float(self.c_n)

    @property
    def c_caption(self) -> Fraction:
        """The alternative normalisation ``N/n + 2``; exceeds ``c_n`` by ``1/n``."""
        return Fraction(self.N, self.n) + 2

    @property
    def parity(self) -> int:
        """Parity shared by all a-coordinates: odd for even ``N`` and vice versa."""
        return (self.N + 1) % 2

    def empty_acoords(self) -> "ACoordinates":
        """a-coordinates of the smallest weight in the support (0 or ``omega_n``)."""
        shift = self.N % 2
        return ACoordinates(tuple(2 * (self.n - i) + 1 + shift for i in range(1, self.n + 1)))


@dataclass(frozen=True)
class DynkinLabels:
    l: tuple

    def __post_init__(self):
        object.__setattr__(self, "l", _int_tuple(self.l, "Dynkin labels"))
        if not self.l:
            raise WeightError("Dynkin labels must be non-empty")
        if any(v < 0 for v in self.l):
            raise WeightError(f"Dynkin labels must be nonnegative, got {self.l}")

    @property
    def n(self) -> int:
        return len(self.l)


@dataclass(frozen=True)
class OrthogonalWeight:
    """Orthogonal coordinates stored doubled: ``x2[i] = 2 lambda_{i+1}``."""

    x2: tuple

    def __post_init__(self):
        object.__setattr__(self, "x2", _int_tuple(self.x2, "orthogonal weight"))
        x2 = self.x2
        if not x2:
            raise WeightError("orthogonal weight must be non-empty")
        if x2[-1] < 0 or any(x2[i] < x2[i + 1] for i in range(len(x2) - 1)):
            raise WeightError(f"weight is not dominant: 2*lambda = {x2}")
        if len({v % 2 for v in x2}) > 1:
            raise WeightError(f"mixed integral and half-integral entries: 2*lambda = {x2}")

    @property
    def n(self) -> int:
        return len(self.x2)

    @property
    def values(self) -> tuple:
        """The coordinates ``lambda_i`` as exact rationals."""
        return tuple(Fraction(v, 2) for v in self.x2)


@dataclass(frozen=True)
class ACoordinates:
    """Strictly decreasing positive integers of a single parity."""

    a: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", _int_tuple(self.a, "a-coordinates"))
        a = self.a
        if not a:
            raise WeightError("a-coordinates must be non-empty")
        if a[-1] < 1:
            raise WeightError(f"a-coordinates must be positive, got {a}")
        if any(a[i] <= a[i + 1] for i in range(len(a) - 1)):
            raise WeightError(f"a-coordinates must be strictly decreasing, got {a}")
        if len({v % 2 for v in a}) > 1:
            raise WeightError(f"a-coordinates must share one parity, got {a}")

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def parity(self) -> int:
        return self.a[0] % 2

    def mirrored(self) -> tuple:
        """``(a_1, ..., a_n, -a_1, ..., -a_n)``."""
        return self.a + tuple(-v for v in self.a)


def as_acoords(a) -> ACoordinates:
    return a if isinstance(a, ACoordinates) else ACoordinates(tuple(a))


def check_config_match(a: ACoordinates, config: AlgebraConfig, *, parity: bool = True):
    """Raise :class:`WeightError` if ``a`` does not belong to ``config``'s lattice."""
    if a.n != config.n:
        raise WeightError(f"rank mismatch: {a.n} coordinates for n = {config.n}")
    if parity and a.parity != config.parity:
        raise WeightError(
            f"parity of a = {a.a} must be opposite to that of N = {config.N}"
        )


def dynkin_to_orthogonal(labels: DynkinLabels) -> OrthogonalWeight:
    l = labels.l
    n = len(l)
    x2 = [0] * n
    acc = l[-1]
    x2[-1] = acc
    for i in range(n - 2, -1, -1):
        acc += 2 * l[i]
        x2[i] = acc
    return OrthogonalWeight(tuple(x2))


def orthogonal_to_dynkin(w: OrthogonalWeight) -> DynkinLabels:
    x2 = w.x2
    l = [(x2[i] - x2[i + 1]) // 2 for i in range(len(x2) - 1)] + [x2[-1]]
    return DynkinLabels(tuple(l))


def orthogonal_to_acoords(w: OrthogonalWeight) -> ACoordinates:
    n = w.n
    return ACoordinates(tuple(v + 2 * (n - i) - 1 for i, v in enumerate(w.x2)))


def acoords_to_orthogonal(a: ACoordinates) -> OrthogonalWeight:
    n = a.n
    x2 = tuple(v - 2 * (n - i) + 1 for i, v in enumerate(a.a))
    # strict decrease with step >= 2 is exactly dominance of x2
    return OrthogonalWeight(x2)


def dynkin_to_acoords(labels: DynkinLabels, config: AlgebraConfig) -> ACoordinates:
    if labels.n != config.n:
        raise WeightError(f"rank mismatch: {labels.n} labels for n = {config.n}")
    return orthogonal_to_acoords(dynkin_to_orthogonal(labels))


def acoords_to_dynkin(a: ACoordinates, config: AlgebraConfig) -> DynkinLabels:
    a = as_acoords(a)
    check_config_match(a, config, parity=False)
    return orthogonal_to_dynkin(acoords_to_orthogonal(a))


def candidate_count(config: AlgebraConfig) -> int:
    """Number of parity-consistent strictly decreasing tuples inside the cone."""
    values = (config.cone - config.parity) // 2 + config.parity
    return math.comb(values, config.n)


def _decreasing_tuples(n: int, top: int, low: int) -> Iterator[tuple]:
    # lexicographic order on (a_1, ..., a_n), entries stepping by 2 down to ``low``
    if n == 0:
        yield ()
        return
    for first in range(low + 2 * (n - 1), top + 1, 2):
        for rest in _decreasing_tuples(n - 1, first - 2, low):
            yield (first,) + rest


def enumerate_candidates(config: AlgebraConfig, cap: int = DEFAULT_ENUMERATION_CAP):
    count = candidate_count(config)
    if count > cap:
        raise EnumerationCapError(
            f"n={config.n}, N={config.N}: {count} candidates exceed the cap {cap}"
        )
    low = 2 - config.parity
    top = config.cone
    for t in _decreasing_tuples(config.n, top, low):
        yield ACoordinates(t)


def enumerate_support(
    config: AlgebraConfig,
    cap: int = DEFAULT_ENUMERATION_CAP,
    holes: list | None = None,
) -> Iterator[ACoordinates]:
    """Yield the support of the tensor-power measure in lexicographic order.

    Candidates are generated from the parity class and the cone bound, then
    filtered by a nonzero multiplicity.

    Parameters
    ----------
    cap : int
        Maximum number of candidates; :class:`EnumerationCapError` otherwise.
    holes : list, optional
        Receives in-cone candidates whose multiplicity vanishes.
    """
    from .measure import multiplicity

    for a in enumerate_candidates(config, cap):
        if multiplicity(config, a) > 0:
            yield a
        elif holes is not None:
            holes.append(a)


def weight_to_json(a: ACoordinates, config: AlgebraConfig) -> dict:
    a = as_acoords(a)
    w = acoords_to_orthogonal(a)
    return {
        "n": config.n,
        "N": config.N,
        "dynkin": list(orthogonal_to_dynkin(w).l),
        "orthogonal_x2": list(w.x2),
        "a": list(a.a),
    }


def weight_from_json(obj: dict) -> tuple:
    """Inverse of :func:`weight_to_json`; checks that the three views agree."""
    config = AlgebraConfig(int(obj["n"]), int(obj["N"]))
    a = ACoordinates(tuple(obj["a"]))
    w = acoords_to_orthogonal(a)
    if "orthogonal_x2" in obj and tuple(obj["orthogonal_x2"]) != w.x2:
        raise WeightError("orthogonal_x2 inconsistent with a")
    if "dynkin" in obj and tuple(obj["dynkin"]) != orthogonal_to_dynkin(w).l:
        raise WeightError("dynkin inconsistent with a")
    check_config_match(a, config)
    return config, a


def parse_int_list(text: str | Sequence[int]) -> tuple:
    if isinstance(text, str):
        parts = [p for p in text.replace(" ", "").split(",") if p]
        try:
            return tuple(int(p) for p in parts)
        except ValueError as exc:
            raise WeightError(f"cannot parse integer list {text!r}") from exc
    return tuple(int(v) for v in text)
