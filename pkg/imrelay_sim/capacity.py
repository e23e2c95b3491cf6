"""Two-hop decode-and-forward network capacity per activation pattern and on average.

C(k) = sum over active positions of 1/2 min(log2(1 + SNR_1), log2(1 + SNR_2)); the
1/2 is the half-duplex factor. Pattern k = 1 activates each hop's complementary
subcarrier with the full budget instead.
"""

import math

import numpy as np
import numpy.typing as npt

from imrelay_sim.core.errors import EnumerationCapError, ValidationError
from imrelay_sim.core.models import (
    ActivationPattern,
    AllocationProblem,
    ChannelRealization,
    FloatArray,
    MappingSelection,
    PatternCapacity,
    PatternPolicy,
    PowerAllocation,
)
from imrelay_sim.core.types import Mode, Strategy
from imrelay_sim.mapping import pattern_count, pattern_mask
from imrelay_sim.waterfill import sum_capacity, thresholds, uniform_allocation, waterfill, waterfill_batch

# largest n_s whose pattern indices fit the int64 bit masks
MAX_SAMPLED_N_S = 62


def _check_inputs(selection: MappingSelection, pattern: ActivationPattern, budget: float, n_0: float) -> None:
    if any(not 0 <= j < selection.n_s for j in pattern.active_positions):
        raise ValidationError(
            f"pattern {pattern.k} uses positions outside the {selection.n_s} selected subcarriers", field="pattern"
        )
    if pattern.k < 1 or pattern.k > pattern_count(selection.n_s):
        raise ValidationError(f"pattern index {pattern.k} does not fit n_s={selection.n_s}", field="pattern")
    if not (math.isfinite(budget) and budget >= 0):
        raise ValidationError(f"budget must be >= 0, got {budget}", field="budget")
    if not (math.isfinite(n_0) and n_0 > 0):
        raise ValidationError(f"n_0 must be > 0, got {n_0}", field="n_0")


def _dynamic(gains: FloatArray, n_0: float, budget: float) -> PowerAllocation:
    if not np.any(gains > 0):
        # every allocation yields zero capacity here; keep the budget unspent
        return PowerAllocation(np.zeros(gains.size), None, frozenset())
    return waterfill(AllocationProblem(gains, n_0, budget))


def _allocations(
    selection: MappingSelection, pattern: ActivationPattern, budget: float, n_0: float, choice: Strategy
) -> tuple[FloatArray, FloatArray, PowerAllocation, PowerAllocation]:
    active = list(pattern.active_positions)
    g1 = selection.effective_gains_hop1[active]
    g2 = selection.effective_gains_hop2[active]
    if choice == Strategy.UNIFORM:
        alloc = uniform_allocation(pattern.n_a, budget)
        return g1, g2, alloc, alloc
    if selection.mode == Mode.CENTRALIZED:
        alloc = _dynamic(np.minimum(g1, g2), n_0, budget)
        return g1, g2, alloc, alloc
    return g1, g2, _dynamic(g1, n_0, budget), _dynamic(g2, n_0, budget)


def _comp_gains(realization: ChannelRealization, selection: MappingSelection) -> tuple[float, float]:
    return float(realization.gains_hop1[selection.comp_hop1]), float(realization.gains_hop2[selection.comp_hop2])


def pattern_capacity(
    realization: ChannelRealization,
    selection: MappingSelection,
    pattern: ActivationPattern,
    budget: float,
    n_0: float,
    choice: Strategy,
) -> PatternCapacity:
    _check_inputs(selection, pattern, budget, n_0)
    if pattern.n_a == 0:
        c1, c2 = _comp_gains(realization, selection)
        full = PowerAllocation(np.array([budget]), None, frozenset({0}) if budget > 0 else frozenset())
        capacity = 0.5 * math.log2(1.0 + budget * min(c1, c2) / n_0)
        return PatternCapacity(pattern.k, capacity, full, full)

    g1, g2, a1, a2 = _allocations(selection, pattern, budget, n_0, choice)
    snr = np.minimum(a1.powers * g1, a2.powers * g2) / n_0
    capacity = 0.5 * math.fsum(np.log2(1.0 + snr).tolist())
    return PatternCapacity(pattern.k, capacity, a1, a2)


def hop_sum_capacities(
    realization: ChannelRealization,
    selection: MappingSelection,
    pattern: ActivationPattern,
    budget: float,
    n_0: float,
    choice: Strategy,
) -> tuple[float, float]:
    """Each hop's own sum capacity, before the end-to-end min is taken."""
    _check_inputs(selection, pattern, budget, n_0)
    if pattern.n_a == 0:
        c1, c2 = _comp_gains(realization, selection)
        return 0.5 * math.log2(1.0 + budget * c1 / n_0), 0.5 * math.log2(1.0 + budget * c2 / n_0)
    g1, g2, a1, a2 = _allocations(selection, pattern, budget, n_0, choice)
    return sum_capacity(g1, a1.powers, n_0), sum_capacity(g2, a2.powers, n_0)


def pattern_capacities(
    realization: ChannelRealization,
    selection: MappingSelection,
    budgets: npt.ArrayLike,
    n_0: float,
    choice: Strategy,
    ks: npt.ArrayLike,
) -> FloatArray:
    """C(k) for every budget (rows) and pattern index in `ks` (columns)."""
    b = np.atleast_1d(np.asarray(budgets, dtype=np.float64))
    if np.any(b < 0) or not np.all(np.isfinite(b)):
        raise ValidationError("budgets must be finite and >= 0", field="budget")
    mask = pattern_mask(selection.n_s, ks)
    g1 = selection.effective_gains_hop1
    g2 = selection.effective_gains_hop2

    if choice == Strategy.UNIFORM:
        n_a = mask.sum(axis=1)
        share = b[:, None] / np.maximum(n_a, 1)[None, :]
        p1 = p2 = np.where(mask[None], share[..., None], 0.0)
    elif selection.mode == Mode.CENTRALIZED:
        p1 = p2 = waterfill_batch(thresholds(np.minimum(g1, g2), n_0), mask, b)
    else:
        p1 = waterfill_batch(thresholds(g1, n_0), mask, b)
        p2 = waterfill_batch(thresholds(g2, n_0), mask, b)

    snr = np.minimum(p1 * g1, p2 * g2) / n_0
    caps = 0.5 * np.log2(1.0 + snr).sum(axis=-1)

    idle = ~mask.any(axis=1)
    if idle.any():
        c1, c2 = _comp_gains(realization, selection)
        caps[:, idle] = (0.5 * np.log2(1.0 + b * min(c1, c2) / n_0))[:, None]
    return caps


def pattern_indices(n_s: int, policy: PatternPolicy, stream: np.random.Generator | None = None) -> npt.NDArray[np.int64]:
    """Pattern indices to average over: all of 1..2^n_s, or `policy.draws` uniform draws."""
    if policy.kind == "exact":
        if pattern_count(n_s) > policy.enumeration_cap:
            raise EnumerationCapError(
                f"n_s={n_s} needs {pattern_count(n_s)} patterns, above enumeration_cap={policy.enumeration_cap}",
                field="n_s",
            )
        return np.arange(1, pattern_count(n_s) + 1, dtype=np.int64)
    if stream is None:
        raise ValidationError("sampled pattern policy needs a random stream", field="stream")
    if n_s > MAX_SAMPLED_N_S:
        raise ValidationError(f"n_s={n_s} exceeds {MAX_SAMPLED_N_S} for sampled patterns", field="n_s")
    return stream.integers(1, pattern_count(n_s), size=policy.draws, endpoint=True, dtype=np.int64)


def average_capacities(
    realization: ChannelRealization,
    selection: MappingSelection,
    budgets: npt.ArrayLike,
    n_0: float,
    choice: Strategy,
    ks: npt.ArrayLike,
) -> FloatArray:
    """Mean of C(k) over `ks`, one value per budget."""
    caps = pattern_capacities(realization, selection, budgets, n_0, choice, ks)
    return np.array([math.fsum(row) for row in caps.tolist()]) / caps.shape[1]


def average_capacity_over_patterns(
    realization: ChannelRealization,
    selection: MappingSelection,
    budget: float,
    n_0: float,
    choice: Strategy,
    policy: PatternPolicy,
    stream: np.random.Generator | None = None,
) -> float:
    ks = pattern_indices(selection.n_s, policy, stream)
    return float(average_capacities(realization, selection, [budget], n_0, choice, ks)[0])
