"""
Exact and Metropolis sampling from the tensor-power measure, mode search and
the convergence experiment.

Random streams: a run with seed ``s`` and ``k`` chains gives chain ``j`` the
counter-based generator ``Philox(SeedSequence(s).spawn(k)[j])``. Each chain
draws its move indices and uniforms in fixed-size blocks from its own stream,
so outputs do not depend on how chains are grouped across threads.
"""
from __future__ import annotations

import bisect
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .boundary import boundary_from_acoords, sup_distance
from .limitshape import limit_shape
from .measure import log_weight, multiplicity, dimension
from .weights import (
    ACoordinates,
    AlgebraConfig,
    DEFAULT_ENUMERATION_CAP,
    as_acoords,
    candidate_count,
    check_config_match,
    enumerate_support,
)

RECOMPUTE_EVERY = 10_000
DRIFT_TOL = 1e-9
_BLOCK = 4096


@dataclass
class ChainState:
    """State of one Metropolis chain.

    ``log_weight`` is the a-dependent part of the log probability, updated
    incrementally with compensated summation (``compensation`` holds the
    running Kahan correction).
    """

    a: np.ndarray
    log_weight: float
    rng: np.random.Generator = field(repr=False)
    compensation: float = 0.0
    steps: int = 0
    accepted: int = 0
    max_drift: float = 0.0

    @property
    def rng_state(self) -> dict:
        return self.rng.bit_generator.state

    def acoords(self) -> ACoordinates:
        return ACoordinates(tuple(int(v) for v in self.a))


@dataclass
class SampleReport:
    """Samples with summary statistics.

    Attributes
    ----------
    samples : list of ACoordinates
    acceptance_rate : float
        Accepted over proposed moves (NaN for exact sampling).
    mean_boundary : tuple of ndarray
        Grid ``x`` and the sample mean of ``f_n(x)``.
    mean_density : tuple of ndarray
        Lattice cell edges and the sample mean of ``rho_n`` on each cell.
    sup_distances : list of float
        ``sup |f_n - f|`` per sample, when a reference shape was given.
    """

    config: AlgebraConfig
    samples: list
    acceptance_rate: float
    mean_boundary: tuple | None = None
    mean_density: tuple | None = None
    sup_distances: list = field(default_factory=list)
    log_probs: list = field(default_factory=list)
    max_drift: float = 0.0

    def __post_init__(self):
        if not (math.isnan(self.acceptance_rate) or 0.0 <= self.acceptance_rate <= 1.0):
            raise ValueError(f"acceptance rate {self.acceptance_rate} outside [0, 1]")


def spawn_generators(seed, count: int) -> list:
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.Philox(s)) for s in ss.spawn(count)]


def resolve_threads(threads: int | None = None) -> int:
    env = os.environ.get("LIMITLAB_THREADS")
    if env:
        threads = int(env)
    return max(1, int(threads or 1))


# -- exact sampling -----------------------------------------------------------


def exact_table(config: AlgebraConfig, cap: int = DEFAULT_ENUMERATION_CAP):
    """Support in lexicographic order with integer weights ``M dim`` summing to ``2^{nN}``."""
    support = list(enumerate_support(config, cap))
    weights = [multiplicity(config, a) * dimension(config, a) for a in support]
    return support, weights


def _uniform_bigint(rng: np.random.Generator, bits: int) -> int:
    words = (bits + 31) // 32
    raw = rng.integers(0, 2 ** 32, size=words, dtype=np.uint64)
    value = 0
    for w in raw:
        value = (value << 32) | int(w)
    return value >> (32 * words - bits)


def exact_sample(config: AlgebraConfig, seed, count: int,
                 cap: int = DEFAULT_ENUMERATION_CAP) -> SampleReport:
    """Inverse-CDF sampling from the exact integer weights.

    A uniform integer ``u`` in ``[0, 2^{nN})`` selects the first support element
    whose cumulative weight exceeds ``u``.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    support, weights = exact_table(config, cap)
    cum = []
    acc = 0
    for w in weights:
        acc += w
        cum.append(acc)
    bits = config.n * config.N
    if acc != 2 ** bits:
        raise ArithmeticError("support weights do not sum to 2^{nN}")
    rng = spawn_generators(seed, 1)[0]
    if bits <= 62:
        u = rng.integers(0, 2 ** bits, size=count, dtype=np.int64)
        idx = np.searchsorted(np.array(cum, dtype=np.int64), u, side="right")
    else:
        idx = [bisect.bisect_right(cum, _uniform_bigint(rng, bits)) for _ in range(count)]
    samples = [support[int(k)] for k in idx]
    logs = [math.log(weights[int(k)]) - bits * math.log(2.0) for k in idx]
    return SampleReport(config, samples, float("nan"), log_probs=logs)


# -- Metropolis chain -----------------------------------------------------------


def move_log_ratio(config: AlgebraConfig, a, i: int, s: int) -> float:
    """Log of ``mu(a') / mu(a)`` for ``a_i -> a_i + 2s``; ``-inf`` if ``a'`` is invalid."""
    a = tuple(int(v) for v in a)
    n, cone = len(a), config.cone
    old = a[i]
    new = old + 2 * s
    if new < 1 or new > cone or (i > 0 and new >= a[i - 1]) or (i < n - 1 and new <= a[i + 1]):
        return -math.inf
    terms = [2.0 * (math.log(new) - math.log(old))]
    for j, v in enumerate(a):
        if j != i:
            terms.append(2.0 * (math.log(abs(new * new - v * v)) - math.log(abs(old * old - v * v))))
    mp, mm = (cone + old) // 2, (cone - old) // 2
    terms.append(math.log(mm) - math.log(mp + 1) if s > 0 else math.log(mp) - math.log(mm + 1))
    return math.fsum(terms)


def move_ratio_exact(config: AlgebraConfig, a, i: int, s: int) -> Fraction:
    """Exact ``mu(a') / mu(a)`` for the same move (0 for invalid targets)."""
    a = tuple(int(v) for v in a)
    n, cone = len(a), config.cone
    old = a[i]
    new = old + 2 * s
    if new < 1 or new > cone or (i > 0 and new >= a[i - 1]) or (i < n - 1 and new <= a[i + 1]):
        return Fraction(0)
    q = Fraction(new * new, old * old)
    for j, v in enumerate(a):
        if j != i:
            q *= Fraction((new * new - v * v) ** 2, (old * old - v * v) ** 2)
    mp, mm = (cone + old) // 2, (cone - old) // 2
    q *= Fraction(mm, mp + 1) if s > 0 else Fraction(mp, mm + 1)
    return q


def transition_probability(config: AlgebraConfig, a, b) -> Fraction:
    """Exact one-step probability ``P(a -> b)`` for ``a != b``.

    A move picks one of the ``2n`` (index, sign) pairs uniformly and is
    accepted with probability ``min(1, mu(b)/mu(a))``.
    """
    a, b = tuple(a), tuple(b)
    n = len(a)
    diff = [k for k in range(n) if a[k] != b[k]]
    if len(diff) != 1 or abs(b[diff[0]] - a[diff[0]]) != 2:
        return Fraction(0)
    i = diff[0]
    s = (b[i] - a[i]) // 2
    r = move_ratio_exact(config, a, i, s)
    return Fraction(1, 2 * n) * min(Fraction(1), r)


def _run_chain(config: AlgebraConfig, state: ChainState, sweeps: int, record_every: int,
               record: list):
    """Advance ``state`` by ``sweeps`` sweeps of ``n`` proposals; append snapshots."""
    n, cone = config.n, config.cone
    a = [int(v) for v in state.a]
    lw, comp = state.log_weight, state.compensation
    log = math.log
    steps_total = sweeps * n
    done = 0
    since = state.steps % RECOMPUTE_EVERY
    while done < steps_total:
        moves = state.rng.integers(0, 2 * n, size=_BLOCK)
        us = state.rng.random(_BLOCK)
        for t in range(_BLOCK):
            if done >= steps_total:
                break
            m = int(moves[t])
            i, s = m >> 1, (1 if m & 1 else -1)
            old = a[i]
            new = old + 2 * s
            done += 1
            state.steps += 1
            since += 1
            ok = 1 <= new <= cone and (i == 0 or new < a[i - 1]) and (i == n - 1 or new > a[i + 1])
            if ok:
                n2, o2 = new * new, old * old
                d = 2.0 * (log(new) - log(old))
                for j in range(n):
                    if j != i:
                        v2 = a[j] * a[j]
                        d += 2.0 * (log(abs(n2 - v2)) - log(abs(o2 - v2)))
                mp, mm = (cone + old) >> 1, (cone - old) >> 1
                d += log(mm) - log(mp + 1) if s > 0 else log(mp) - log(mm + 1)
                if d >= 0.0 or us[t] < math.exp(d):
                    a[i] = new
                    state.accepted += 1
                    # Kahan update of the cached log weight
                    y = d - comp
                    tsum = lw + y
                    comp = (tsum - lw) - y
                    lw = tsum
            if since >= RECOMPUTE_EVERY:
                fresh = log_weight(config, tuple(a))
                state.max_drift = max(state.max_drift, abs(fresh - lw))
                lw, comp, since = fresh, 0.0, 0
            if record_every and done % (record_every * n) == 0:
                record.append(tuple(a))
    state.a = np.array(a, dtype=np.int64)
    state.log_weight, state.compensation = lw, comp


def init_chain(config: AlgebraConfig, rng: np.random.Generator, start=None) -> ChainState:
    a = config.empty_acoords() if start is None else as_acoords(start)
    check_config_match(a, config)
    return ChainState(np.array(a.a, dtype=np.int64), log_weight(config, a.a), rng)


def mcmc_sample(
    config: AlgebraConfig,
    seed,
    chains: int = 4,
    burnin: int = 1000,
    sweeps: int = 1000,
    thin: int = 1,
    shape_c: float | None = None,
    threads: int | None = None,
    boundary_grid: int = 201,
    start=None,
) -> SampleReport:
    """Metropolis sampling with single-coordinate moves ``a_i -> a_i +- 2``.

    Each chain starts from the empty diagram (or ``start``), runs ``burnin``
    sweeps, then records a sample every ``thin`` sweeps for ``sweeps`` sweeps.
    A sweep is ``n`` proposals. Samples are ordered by chain.

    Parameters
    ----------
    shape_c : float, optional
        If given, sup-distances to the limit shape at this ``c`` are computed.
    """
    if chains < 1 or burnin < 0 or sweeps < 0 or thin < 1:
        raise ValueError("need chains >= 1, burnin >= 0, sweeps >= 0, thin >= 1")
    rngs = spawn_generators(seed, chains)
    states = [init_chain(config, r, start) for r in rngs]
    records = [[] for _ in range(chains)]

    def work(k):
        _run_chain(config, states[k], burnin, 0, [])
        _run_chain(config, states[k], sweeps, thin, records[k])

    nthreads = min(resolve_threads(threads), chains)
    if nthreads > 1:
        with ThreadPoolExecutor(nthreads) as pool:
            list(pool.map(work, range(chains)))
    else:
        for k in range(chains):
            work(k)

    samples = [ACoordinates(t) for rec in records for t in rec]
    proposed = sum(s.steps for s in states)
    accepted = sum(s.accepted for s in states)
    rate = accepted / proposed if proposed else 0.0
    report = SampleReport(config, samples, rate, max_drift=max(s.max_drift for s in states))
    summarize(report, shape_c, boundary_grid)
    return report


def summarize(report: SampleReport, shape_c: float | None = None, grid: int = 201):
    """Fill mean boundary, mean density, log probabilities and sup-distances."""
    config = report.config
    from .measure import log_probability

    if not report.samples:
        return report
    n = config.n
    h = (config.cone + 1) / (2 * n)
    xs = np.linspace(-h, h, grid)
    # rho_n is constant on cells of width 1/n offset by the parity class
    off = 0.0 if config.parity == 1 else 1.0 / (2 * n)
    k = int(math.ceil((h - off) * n - 1e-9))
    cells = off + np.arange(-k - (1 if off else 0), k + 1) / n
    cells = cells[(cells >= -h - 1e-12) & (cells <= h + 1e-12)]
    mids = 0.5 * (cells[:-1] + cells[1:])
    fsum = np.zeros_like(xs)
    occ = np.zeros_like(mids)
    shape = limit_shape(float(shape_c)) if shape_c is not None else None
    counts: dict = {}
    for a in report.samples:
        counts[a.a] = counts.get(a.a, 0) + 1
    per_state = {}
    for t, cnt in counts.items():
        b = boundary_from_acoords(t, config)
        d = sup_distance(b, shape) if shape is not None else None
        per_state[t] = (d, log_probability(config, t))
        fsum += cnt * b(xs)
        occ += cnt * b.rho(mids)
    for a in report.samples:
        d, lp = per_state[a.a]
        if d is not None:
            report.sup_distances.append(d)
        report.log_probs.append(lp)
    m = len(report.samples)
    report.mean_boundary = (xs, fsum / m)
    report.mean_density = (cells, occ / m)
    return report


# -- mode search ---------------------------------------------------------------------


def _best_move(config: AlgebraConfig, a: list, indices) -> tuple | None:
    best = None
    for i in indices:
        for s in (-1, 1):
            d = move_log_ratio(config, a, i, s)
            if d > 1e-12:
                cand = a.copy()
                cand[i] += 2 * s
                key = (d, [-v for v in cand])
                if best is None or key > best[0]:
                    best = (key, cand)
    return None if best is None else best[1]


def mode_search(config: AlgebraConfig, order: str = "steepest", visit=None,
                start=None, max_steps: int = 10_000_000) -> ACoordinates:
    """Greedy ascent of the log probability with moves ``a_i -> a_i +- 2``.

    ``order="steepest"`` applies the best improving move each step (ties go to
    the lexicographically smaller tuple). ``order="sweep"`` visits the indices
    in ``visit`` order (default ``0..n-1``) and applies any improving move.
    The result is a local maximiser: no single move raises the probability.
    """
    a = list((config.empty_acoords() if start is None else as_acoords(start)).a)
    n = config.n
    if order == "steepest":
        for _ in range(max_steps):
            nxt = _best_move(config, a, range(n))
            if nxt is None:
                return ACoordinates(tuple(a))
            a = nxt
    elif order == "sweep":
        visit = list(range(n)) if visit is None else list(visit)
        for _ in range(max_steps):
            moved = False
            for i in visit:
                while True:
                    ups = [(move_log_ratio(config, a, i, s), s) for s in (-1, 1)]
                    d, s = max(ups, key=lambda t: (t[0], -t[1]))
                    if d <= 1e-12:
                        break
                    a[i] += 2 * s
                    moved = True
            if not moved:
                return ACoordinates(tuple(a))
    else:
        raise ValueError(f"unknown order {order!r}")
    raise RuntimeError("mode search did not converge")


def exhaustive_mode(config: AlgebraConfig, cap: int = DEFAULT_ENUMERATION_CAP):
    """Global maximiser by enumeration; returns ``(argmax list, max weight)``."""
    support, weights = exact_table(config, cap)
    top = max(weights)
    return [a for a, w in zip(support, weights) if w == top], Fraction(top, 2 ** (config.n * config.N))


def is_local_max(config: AlgebraConfig, a) -> bool:
    a = list(as_acoords(a).a)
    return all(move_log_ratio(config, a, i, s) <= 1e-12 for i in range(config.n) for s in (-1, 1))


EXHAUSTIVE_CHECK_CAP = 200_000


def mode_uniqueness(config: AlgebraConfig, a, cap: int = EXHAUSTIVE_CHECK_CAP) -> dict:
    """Flags on the mode-search result ``a``.

    ``tied_neighbours`` lists single moves with probability ratio exactly 1.
    When the support has at most ``cap`` candidates it is also scanned:
    ``global`` tells whether ``a`` is a global maximiser and ``unique``
    whether it is the only one. Both are ``None`` when the scan is skipped.
    """
    a = as_acoords(a)
    ties = []
    for i in range(config.n):
        for s in (-1, 1):
            if move_ratio_exact(config, a.a, i, s) == 1:
                b = list(a.a)
                b[i] += 2 * s
                ties.append(tuple(b))
    out = {"local_max": is_local_max(config, a), "tied_neighbours": ties,
           "global": None, "unique": None}
    if candidate_count(config) <= cap:
        argmax, _ = exhaustive_mode(config)
        out["global"] = a in argmax
        out["unique"] = argmax == [a]
    return out


# -- convergence experiment ---------------------------------------------------------


def config_for_c(c: float, n: int) -> AlgebraConfig:
    """``N = round((c - 2) n) + 1``, so that ``c_n = 2 + (N - 1)/n`` is nearest to ``c``."""
    N = int(round((float(c) - 2.0) * n)) + 1
    return AlgebraConfig(n, max(N, 1))


def validate_n_list(n_list) -> list:
    try:
        ns = [int(v) for v in n_list]
    except (TypeError, ValueError) as exc:
        raise ValueError(f"invalid n list {n_list!r}") from exc
    if not ns or any(v < 1 for v in ns) or any(int(v) != v for v in n_list):
        raise ValueError(f"invalid n list {n_list!r}")
    return ns


def default_burnin(config: AlgebraConfig) -> int:
    """Burn-in sweeps: the particles must spread over a range of order ``c n``."""
    return 5 * config.cone


def convergence_experiment(c: float, n_list, seed, sweeps: int = 200, chains: int = 4,
                           burnin: int | None = None, thin: int | None = None,
                           threads: int | None = None) -> list:
    """Mean and 0.9-quantile of ``sup |f_n - f|`` per ``n`` at fixed ``c``.

    Returns rows with keys n, N, c_n, mean_sup_dist, q90_sup_dist,
    acceptance_rate. Chain seeds for each ``n`` are spawned from ``seed``.
    """
    ns = validate_n_list(n_list)
    if float(c) < 2.0:
        raise ValueError("c must be at least 2")
    seeds = np.random.SeedSequence(seed).spawn(len(ns))
    rows = []
    for n, ss in zip(ns, seeds):
        cfg = config_for_c(c, n)
        b = default_burnin(cfg) if burnin is None else burnin
        t = thin if thin is not None else max(1, sweeps // 25)
        rep = mcmc_sample(cfg, ss, chains=chains, burnin=b, sweeps=sweeps, thin=t,
                          shape_c=c, threads=threads)
        d = np.array(rep.sup_distances)
        rows.append({
            "n": n,
            "N": cfg.N,
            "c_n": float(cfg.c_n),
            "mean_sup_dist": float(d.mean()) if d.size else float("nan"),
            "q90_sup_dist": float(np.quantile(d, 0.9)) if d.size else float("nan"),
            "acceptance_rate": rep.acceptance_rate,
        })
    return rows


def trend_ok(values, tol: float = 0.05) -> bool:
    """Non-increasing up to a single inversion of at most ``tol`` relative."""
    inversions = 0
    for prev, cur in zip(values, values[1:]):
        if cur > prev:
            if cur > prev * (1.0 + tol):
                return False
            inversions += 1
    return inversions <= 1
