import math

import numpy as np
import pytest

from conftest import STAT_SEEDS, majority
from rcsforge.distributions import SystemDims, eval_remaining_cdf
from rcsforge.errors import CapacityError, DomainError
from rcsforge.haar_oracle import (
    ks_one_sample,
    ks_two_sample,
    oracle_component_probabilities,
    sample_oracle_state,
    standard_normals,
)
from rcsforge.state_sampler import sample_probabilities_batch
from rcsforge.streams import STREAM_ORACLE, STREAM_STATE, STREAM_VERIFY, substream


def test_oracle_state_unit_norm():
    for n in (1, 4, 9):
        v = sample_oracle_state(SystemDims(n), substream(5, STREAM_ORACLE, 0))
        assert v.shape == (2 ** n,)
        assert abs(float(np.sum(v.real ** 2 + v.imag ** 2)) - 1.0) < 1e-12


def test_oracle_single_component_degenerate():
    # At the smallest system every component square still sums to one.
    v = sample_oracle_state(SystemDims(1), substream(8, STREAM_ORACLE, 0))
    assert abs(np.abs(v[0]) ** 2 + np.abs(v[1]) ** 2 - 1.0) < 1e-12


def test_oracle_capacity():
    with pytest.raises(CapacityError):
        sample_oracle_state(SystemDims(21), substream(0, STREAM_ORACLE, 0))
    with pytest.raises(CapacityError):
        oracle_component_probabilities(SystemDims(20), 10 ** 5, substream(0, STREAM_ORACLE, 0))


def test_oracle_component_mean():
    # Symmetry forces E p_b = 1/D.
    p = oracle_component_probabilities(SystemDims(4), 10 ** 5, substream(13, STREAM_ORACLE, 0))
    se = p.std(ddof=1) / math.sqrt(p.size)
    assert abs(p.mean() - 1.0 / 16.0) <= 5.0 * se


def test_standard_normals_distribution():
    # Box-Muller output against the normal CDF.
    z = standard_normals(substream(55, STREAM_ORACLE, 0), 10 ** 5)

    def cdf(t):
        return 0.5 * (1.0 + np.vectorize(math.erf)(t / math.sqrt(2.0)))

    assert not ks_one_sample(z, cdf, 0.01).reject


def test_standard_normals_odd_count():
    z = standard_normals(substream(55, STREAM_ORACLE, 0), 7)
    assert z.shape == (7,)
    # an odd request is the truncated even request
    z8 = standard_normals(substream(55, STREAM_ORACLE, 0), 8)
    assert np.array_equal(z, z8[:7])


def test_ks_one_sample_examples():
    report = ks_one_sample([0.5], lambda s: s, 0.05)
    assert report.statistic == 0.5
    assert report.n_a == 1 and report.n_b is None

    # exact quantiles (i - 0.5)/N of the uniform law
    n = 400
    samples = (np.arange(1, n + 1) - 0.5) / n
    report = ks_one_sample(samples, lambda s: s, 0.01)
    assert report.statistic == pytest.approx(0.5 / n, rel=1e-12)
    assert not report.reject


def test_ks_one_sample_accepts_true_law():
    dims = SystemDims(4)

    def cdf(q):
        return 1.0 - eval_remaining_cdf(1.0 - q, dims)

    outcomes = []
    for seed in STAT_SEEDS:
        comp = sample_probabilities_batch(dims, 10 ** 5, substream(seed, STREAM_VERIFY, 0))[:, 0]
        outcomes.append(not ks_one_sample(comp, cdf, 0.01).reject)
    assert majority(outcomes)


def test_ks_reject_flag_consistency():
    # A sample from the wrong law must reject at N this large.
    rng = substream(77, STREAM_ORACLE, 0)
    wrong = rng.random(10 ** 4) ** 2
    report = ks_one_sample(wrong, lambda s: s, 0.01)
    assert report.reject
    assert report.statistic > report.critical_value


def test_ks_two_sample_examples():
    same = [0.1, 0.4, 0.9]
    report = ks_two_sample(same, list(same), 0.05)
    assert report.statistic == 0.0
    assert not report.reject

    report = ks_two_sample([0.0], [1.0], 0.01)
    assert report.statistic == 1.0
    assert report.n_a == 1 and report.n_b == 1


def test_ks_errors():
    with pytest.raises(DomainError):
        ks_one_sample([], lambda s: s, 0.05)
    with pytest.raises(DomainError):
        ks_two_sample([], [0.5], 0.01)
    with pytest.raises(DomainError):
        ks_one_sample([0.5], lambda s: s, 0.1)


def test_sampler_matches_oracle():
    # Desk-scale check that the analytic sampler and the Gaussian-sphere
    # construction draw the same component law.
    dims = SystemDims(4)
    outcomes = []
    for seed in STAT_SEEDS:
        a = sample_probabilities_batch(dims, 10 ** 5, substream(seed, STREAM_VERIFY, 0))[:, 0]
        b = oracle_component_probabilities(dims, 10 ** 5, substream(seed, STREAM_ORACLE, 0))
        outcomes.append(not ks_two_sample(a, b, 0.01).reject)
    assert majority(outcomes)


def test_permutation_invariance_proxy():
    # Permuting oracle components leaves the per-index law unchanged.
    dims = SystemDims(3)
    outcomes = []
    for seed in STAT_SEEDS:
        plain = oracle_component_probabilities(dims, 10 ** 5, substream(seed, STREAM_ORACLE, 0))
        rng = substream(seed, STREAM_ORACLE, 1)
        perm_index = int(substream(seed, STREAM_STATE, 0).permutation(8)[0])
        permuted = oracle_component_probabilities(dims, 10 ** 5, rng, index=perm_index)
        outcomes.append(not ks_two_sample(plain, permuted, 0.01).reject)
    assert majority(outcomes)


def test_oracle_xeb_moment():
    # D^2 E[p_b0^2] - 1 = (D-1)/(D+1): Monte Carlo over the oracle against
    # the closed form, within 3 standard errors.
    dims = SystemDims(4)
    d = 16
    p = oracle_component_probabilities(dims, 10 ** 6, substream(29, STREAM_ORACLE, 0))
    stat = d * d * p * p - 1.0
    se = stat.std(ddof=1) / math.sqrt(stat.size)
    assert abs(stat.mean() - 15.0 / 17.0) <= 3.0 * se
