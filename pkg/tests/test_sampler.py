"""Exact and Metropolis samplers, mode search and the convergence table."""
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from limitlab.boundary import boundary_from_acoords, sup_distance
from limitlab.limitshape import LimitShape
from limitlab.measure import plancherel_probability
from limitlab.sampler import (
    config_for_c,
    convergence_experiment,
    exact_sample,
    exact_table,
    exhaustive_mode,
    is_local_max,
    mcmc_sample,
    mode_search,
    mode_uniqueness,
    move_log_ratio,
    move_ratio_exact,
    transition_probability,
    trend_ok,
    validate_n_list,
)
from limitlab.weights import AlgebraConfig, enumerate_support


def _freq(report):
    return Counter(a.a for a in report.samples)


def test_exact_sampler_within_3_sigma():
    config = AlgebraConfig(2, 2)
    draws = 100_000
    rep = exact_sample(config, seed=7, count=draws)
    freq = _freq(rep)
    for a, p in (((3, 1), 1 / 16), ((5, 1), 5 / 16), ((5, 3), 10 / 16)):
        sigma = math.sqrt(p * (1 - p) / draws)
        assert abs(freq[a] / draws - p) <= 3 * sigma
    assert math.isnan(rep.acceptance_rate)


def test_exact_sampler_so3():
    config = AlgebraConfig(1, 2)
    support, weights = exact_table(config)
    assert [a.a for a in support] == [(1,), (3,)]
    assert weights == [1, 3]
    rep = exact_sample(config, seed=1, count=40_000)
    assert abs(_freq(rep)[(3,)] / 40_000 - 0.75) <= 3 * math.sqrt(0.75 * 0.25 / 40_000)


def test_exact_sampler_big_integers():
    # 2^{nN} beyond 64 bits uses exact big-integer uniforms
    config = AlgebraConfig(4, 17)
    rep = exact_sample(config, seed=3, count=200)
    assert len(rep.samples) == 200
    for a, lp in zip(rep.samples, rep.log_probs):
        assert abs(lp - plancherel_probability(config, a).log_value) <= 1e-12


def test_exact_sampler_count_zero_and_determinism():
    config = AlgebraConfig(2, 3)
    assert exact_sample(config, seed=1, count=0).samples == []
    a = exact_sample(config, seed=5, count=500).samples
    b = exact_sample(config, seed=5, count=500).samples
    c = exact_sample(config, seed=6, count=500).samples
    assert a == b and a != c


def test_detailed_balance_exact():
    config = AlgebraConfig(2, 4)
    support = [a.a for a in enumerate_support(config)]
    mu = {a: plancherel_probability(config, a).exact for a in support}
    pairs = 0
    for x in support:
        for y in support:
            if x == y:
                continue
            pxy = transition_probability(config, x, y)
            pyx = transition_probability(config, y, x)
            assert mu[x] * pxy == mu[y] * pyx
            pairs += pxy > 0
    assert pairs > 0
    # total outgoing probability never exceeds 1
    for x in support:
        assert sum(transition_probability(config, x, y) for y in support if y != x) <= 1


def test_move_ratio_matches_measure():
    config = AlgebraConfig(3, 8)
    for a in enumerate_support(config):
        for i in range(3):
            for s in (-1, 1):
                r = move_ratio_exact(config, a.a, i, s)
                lr = move_log_ratio(config, a.a, i, s)
                b = list(a.a)
                b[i] += 2 * s
                if r == 0:
                    assert lr == -math.inf
                    continue
                q = plancherel_probability(config, tuple(b)).exact / plancherel_probability(config, a).exact
                assert r == q
                assert abs(lr - math.log(q)) <= 1e-12


def test_wall_move_rejected():
    config = AlgebraConfig(2, 3)
    a = (6, 2)  # a_1 = N + 2n - 1
    assert move_log_ratio(config, a, 0, 1) == -math.inf
    assert move_ratio_exact(config, a, 0, 1) == 0
    assert transition_probability(config, a, (8, 2)) == 0
    rep = mcmc_sample(config, seed=2, chains=2, burnin=0, sweeps=2000, start=a)
    assert all(s.a[0] <= config.cone and s.a[-1] >= 1 for s in rep.samples)


def test_mcmc_determinism_and_threads():
    config = AlgebraConfig(3, 8)
    r1 = mcmc_sample(config, seed=11, chains=3, burnin=10, sweeps=300, thin=3, threads=1)
    r2 = mcmc_sample(config, seed=11, chains=3, burnin=10, sweeps=300, thin=3, threads=3)
    r3 = mcmc_sample(config, seed=12, chains=3, burnin=10, sweeps=300, thin=3)
    assert r1.samples == r2.samples
    assert r1.acceptance_rate == r2.acceptance_rate
    assert r1.samples != r3.samples
    assert len(r1.samples) == 3 * 100
    assert 0 <= r1.acceptance_rate <= 1


def test_mcmc_tv_small():
    config = AlgebraConfig(2, 4)
    rep = mcmc_sample(config, seed=4, chains=4, burnin=100, sweeps=20_000)
    freq = _freq(rep)
    m = len(rep.samples)
    tv = 0.5 * sum(abs(freq[a.a] / m - float(plancherel_probability(config, a).exact))
                   for a in enumerate_support(config))
    assert tv <= 0.02


def test_incremental_drift():
    config = AlgebraConfig(6, 60)
    rep = mcmc_sample(config, seed=9, chains=1, burnin=0, sweeps=12_000, thin=100)
    assert rep.acceptance_rate * 12_000 * 6 > 10_000
    assert rep.max_drift <= 1e-9


def test_empirical_density_mass_and_evenness():
    config = AlgebraConfig(5, 21)
    rep = mcmc_sample(config, seed=3, chains=2, burnin=50, sweeps=200, thin=5, shape_c=config.c)
    cells, occ = rep.mean_density
    widths = np.diff(cells)
    assert abs(float(np.sum(widths * occ)) - 1.0) <= 1e-12
    assert np.allclose(occ, occ[::-1], atol=1e-15)
    assert np.allclose(cells, -cells[::-1], atol=1e-15)
    xs, fmean = rep.mean_boundary
    assert np.allclose(fmean + fmean[::-1], 2.0, atol=1e-12)
    assert len(rep.sup_distances) == len(rep.samples)


def test_mcmc_argument_checks():
    with pytest.raises(ValueError):
        mcmc_sample(AlgebraConfig(2, 2), seed=1, chains=0)
    with pytest.raises(ValueError):
        mcmc_sample(AlgebraConfig(2, 2), seed=1, thin=0)


# -- mode search --------------------------------------------------------------


def test_mode_examples():
    assert mode_search(AlgebraConfig(2, 2)).a == (5, 3)
    config = AlgebraConfig(1, 2)
    argmax, p = exhaustive_mode(config)
    assert [a.a for a in argmax] == [mode_search(config).a] == [(3,)]
    assert p == Fraction(3, 4)


@pytest.mark.parametrize("n,N", [(2, 4), (3, 8), (4, 10), (3, 9), (2, 7), (4, 7)])
def test_mode_is_global_and_order_invariant(n, N):
    config = AlgebraConfig(n, N)
    argmax, _ = exhaustive_mode(config)
    m = mode_search(config)
    assert is_local_max(config, m)
    assert m in argmax
    if len(argmax) == 1:
        for visit in (list(range(n)), list(range(n))[::-1]):
            assert mode_search(config, "sweep", visit=visit) == m


def test_mode_uniqueness_flags():
    flags = mode_uniqueness(AlgebraConfig(2, 5), mode_search(AlgebraConfig(2, 5)))
    assert flags["global"] and flags["unique"] is False
    flags = mode_uniqueness(AlgebraConfig(3, 8), (11, 7, 3))
    assert flags["unique"] and flags["tied_neighbours"] == []


def test_mode_fig3_instance():
    shape = LimitShape(11.95)
    big = AlgebraConfig(20, 200)
    a = mode_search(big)
    assert mode_search(big, "sweep") == a
    d20 = sup_distance(boundary_from_acoords(a, big), shape)
    small = AlgebraConfig(10, 100)
    d10 = sup_distance(boundary_from_acoords(mode_search(small), small), shape)
    assert 0 < d20 < d10


def test_unknown_order():
    with pytest.raises(ValueError):
        mode_search(AlgebraConfig(2, 2), order="random")


# -- convergence ------------------------------------------------------------------


def test_config_for_c():
    assert config_for_c(12, 10).N == 101
    assert config_for_c(3, 20).N == 21
    cfg = config_for_c(6, 8)
    assert abs(float(cfg.c_n) - 6) <= 1 / 8


def test_trend_ok():
    assert trend_ok([0.3, 0.2, 0.1])
    assert trend_ok([0.3, 0.31, 0.1])  # one inversion within 5%
    assert not trend_ok([0.3, 0.4, 0.1])
    assert not trend_ok([0.3, 0.31, 0.32])
    assert trend_ok([0.5])


def test_validate_n_list():
    assert validate_n_list([10, 20]) == [10, 20]
    for bad in ([], [0], ["x"], [2.5]):
        with pytest.raises(ValueError):
            validate_n_list(bad)


def test_convergence_single_row():
    rows = convergence_experiment(12, [6], seed=3, sweeps=50, chains=2)
    assert len(rows) == 1
    row = rows[0]
    assert set(row) == {"n", "N", "c_n", "mean_sup_dist", "q90_sup_dist", "acceptance_rate"}
    assert row["N"] == 61 and row["mean_sup_dist"] > 0 and row["q90_sup_dist"] > 0
