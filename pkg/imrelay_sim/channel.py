"""Frequency-selective Rayleigh fading: i.i.d. exponential power gains per subcarrier per hop."""

import math

import numpy as np
import numpy.typing as npt

from imrelay_sim.core.errors import ValidationError
from imrelay_sim.core.models import ChannelParams, ChannelRealization


def exponential_from_uniform(u: npt.ArrayLike, mu: float) -> npt.NDArray[np.float64]:
    """Inverse-CDF transform -mu * ln(1 - u); u must lie in [0, 1)."""
    return -mu * np.log1p(-np.asarray(u, dtype=np.float64))


def sample_realization(params: ChannelParams, stream: np.random.Generator) -> ChannelRealization:
    """Draw hop 1 then hop 2 from `stream`; Generator.random() is supported on [0, 1)."""
    u1 = stream.random(params.n_t)
    u2 = stream.random(params.n_t)
    return ChannelRealization(
        gains_hop1=exponential_from_uniform(u1, params.mu_1),
        gains_hop2=exponential_from_uniform(u2, params.mu_2),
    )


def exp_cdf(s: float, mu: float) -> float:
    if s < 0:
        raise ValidationError(f"exp_cdf is defined for s >= 0, got {s}", field="s")
    if mu <= 0:
        raise ValidationError(f"mu must be > 0, got {mu}", field="mu")
    return -math.expm1(-s / mu)
