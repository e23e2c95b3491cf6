import math

import numpy as np
import pytest
from scipy import stats

from imrelay_sim.channel import exp_cdf, exponential_from_uniform, sample_realization
from imrelay_sim.core.errors import ValidationError
from imrelay_sim.core.lib import rng
from imrelay_sim.core.models import ChannelParams, ChannelRealization


def test_inverse_cdf_origin():
    assert exponential_from_uniform(0.0, 1.0) == 0.0


def test_inverse_cdf_identity_point():
    assert exponential_from_uniform(1.0 - math.exp(-1.0), 1.0) == pytest.approx(1.0, rel=1e-12)


def test_sample_mean_matches_mu(stream):
    draws = exponential_from_uniform(stream.random(10**6), 2.0)
    assert abs(draws.mean() - 2.0) <= 3 * 2.0 / 1e3


def test_exp_cdf_values():
    assert exp_cdf(0.0, 3.0) == 0.0
    assert exp_cdf(2.5, 2.5) == pytest.approx(1.0 - math.exp(-1.0), abs=1e-12)
    assert exp_cdf(2.5, 2.5) == pytest.approx(0.632121, abs=1e-6)


def test_exp_cdf_rejects_negative():
    with pytest.raises(ValidationError) as exc:
        exp_cdf(-0.1, 1.0)
    assert exc.value.field == "s"


def test_realization_is_deterministic_per_stream():
    params = ChannelParams(n_t=16, mu_1=1.0, mu_2=2.0)
    a = sample_realization(params, rng.channel_stream(7, 3))
    b = sample_realization(params, rng.channel_stream(7, 3))
    c = sample_realization(params, rng.channel_stream(7, 4))
    assert np.array_equal(a.gains_hop1, b.gains_hop1)
    assert np.array_equal(a.gains_hop2, b.gains_hop2)
    assert not np.array_equal(a.gains_hop1, c.gains_hop1)


def test_realization_draws_hop1_then_hop2():
    params = ChannelParams(n_t=4, mu_1=1.0, mu_2=3.0)
    realization = sample_realization(params, rng.stream(5, 0))
    u = rng.stream(5, 0).random(8)
    assert np.array_equal(realization.gains_hop1, exponential_from_uniform(u[:4], 1.0))
    assert np.array_equal(realization.gains_hop2, exponential_from_uniform(u[4:], 3.0))


def test_realization_gains_are_read_only():
    realization = sample_realization(ChannelParams(n_t=4), rng.stream(1, 0))
    with pytest.raises(ValueError):
        realization.gains_hop1[0] = 1.0


@pytest.mark.parametrize("mu", [1.0, 0.5])
def test_marginal_passes_ks(mu):
    """Kolmogorov-Smirnov against the exponential CDF at the 1% level."""
    u = rng.stream(99, int(mu * 10)).random(10**5)
    samples = exponential_from_uniform(u, mu)
    result = stats.kstest(samples, lambda s: -np.expm1(-np.asarray(s) / mu))
    assert result.pvalue > 0.01
    assert exp_cdf(float(np.median(samples)), mu) == pytest.approx(0.5, abs=0.01)


def test_subcarriers_and_hops_uncorrelated():
    n = 10**5
    n_t = 4
    u = rng.stream(3, 0).random((n, 2 * n_t))
    gains = exponential_from_uniform(u, 1.0)
    bound = 3 / math.sqrt(n)
    # (0,1) adjacent subcarriers of hop 1, (0, n_t) same subcarrier across hops, (2, n_t + 3) mixed
    for i, j in [(0, 1), (0, n_t), (2, n_t + 3)]:
        assert abs(np.corrcoef(gains[:, i], gains[:, j])[0, 1]) < bound


def test_channel_params_validation():
    with pytest.raises(ValidationError) as exc:
        ChannelParams(n_t=1)
    assert exc.value.field == "n_t"
    with pytest.raises(ValidationError) as exc:
        ChannelParams(n_t=8, mu_2=0.0)
    assert exc.value.field == "mu_2"


def test_realization_rejects_mismatched_hops():
    with pytest.raises(ValidationError):
        ChannelRealization([1.0, 2.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValidationError):
        ChannelRealization([1.0, -2.0], [1.0, 2.0])


def test_swapped_exchanges_hops():
    realization = ChannelRealization([1.0, 2.0], [3.0, 4.0])
    swapped = realization.swapped()
    assert swapped.gains_hop1.tolist() == [3.0, 4.0]
    assert swapped.gains_hop2.tolist() == [1.0, 2.0]
