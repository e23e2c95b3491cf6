"""Monte Carlo sweep of average network capacity against P_t / N0.

Every trial draws one channel realization from its own (master_seed, trial)
stream and reuses it for every SNR point, mode, strategy and n_s, so strategy
comparisons are paired. Per-trial results land in a trial-indexed array and are
reduced with math.fsum: the result does not depend on worker count.
"""

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor, as_completed

import numpy as np

from imrelay_sim.capacity import average_capacities, pattern_indices
from imrelay_sim.channel import sample_realization
from imrelay_sim.core.errors import InvariantError, ValidationError
from imrelay_sim.core.lib import clock, rng
from imrelay_sim.core.models import (
    ActivationPattern,
    AllocationProblem,
    ChannelRealization,
    FloatArray,
    GapRow,
    MappingSelection,
    SweepConfig,
    SweepResult,
    SweepRow,
)
from imrelay_sim.core.types import Mode, Strategy
from imrelay_sim.mapping import build_selection
from imrelay_sim.waterfill import thresholds, waterfill

logger = logging.getLogger(__name__)

_CHUNKS_PER_WORKER = 4


def default_workers() -> int:
    return os.cpu_count() or 1


def trial_capacities(config: SweepConfig, trial: int) -> FloatArray:
    """Average capacity of one trial, indexed [snr, mode, strategy, n_s]."""
    realization = sample_realization(config.channel, rng.channel_stream(config.master_seed, trial))
    budgets = config.budgets()
    policy = config.policy
    out = np.empty((len(config.snr_points_db), len(config.modes), len(config.strategies), len(config.n_s_list)))
    for c, n_s in enumerate(config.n_s_list):
        stream = rng.pattern_stream(config.master_seed, trial, n_s) if policy.kind == "sampled" else None
        ks = pattern_indices(n_s, policy, stream)
        for a, mode in enumerate(config.modes):
            selection = build_selection(realization, n_s, mode)
            for b, strategy in enumerate(config.strategies):
                out[:, a, b, c] = average_capacities(realization, selection, budgets, config.n_0, strategy, ks)
    return out


def _trial_block(config: SweepConfig, start: int, stop: int) -> FloatArray:
    return np.stack([trial_capacities(config, t) for t in range(start, stop)])


def _chunks(trials: int, workers: int) -> list[tuple[int, int]]:
    size = max(1, math.ceil(trials / (workers * _CHUNKS_PER_WORKER)))
    return [(start, min(start + size, trials)) for start in range(0, trials, size)]


def collect_trials(config: SweepConfig, workers: int = 1) -> FloatArray:
    """All per-trial capacities, indexed [trial, snr, mode, strategy, n_s]."""
    if workers < 1:
        raise ValidationError(f"workers must be >= 1, got {workers}", field="workers")
    shape = (config.trials, len(config.snr_points_db), len(config.modes), len(config.strategies), len(config.n_s_list))
    per_trial = np.empty(shape)
    chunks = _chunks(config.trials, workers)
    if workers == 1:
        for start, stop in chunks:
            per_trial[start:stop] = _trial_block(config, start, stop)
            logger.debug("trials %d..%d done", start, stop)
        return per_trial

    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(_trial_block, config, start, stop): (start, stop) for start, stop in chunks}
        for fut in as_completed(futures):
            start, stop = futures[fut]
            per_trial[start:stop] = fut.result()
            logger.debug("trials %d..%d done", start, stop)
    return per_trial


def _mean_and_error(values: FloatArray) -> tuple[float, float]:
    """Mean and standard error (sample std / sqrt(n)); a single trial has zero error."""
    items = values.tolist()
    n = len(items)
    mean = math.fsum(items) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((x - mean) ** 2 for x in items) / (n - 1)
    return mean, math.sqrt(var / n)


def _rows(config: SweepConfig, per_trial: FloatArray) -> tuple[SweepRow, ...]:
    rows: list[SweepRow] = []
    for i, snr_db in enumerate(config.snr_points_db):
        for a, mode in enumerate(config.modes):
            for b, strategy in enumerate(config.strategies):
                for c, n_s in enumerate(config.n_s_list):
                    mean, err = _mean_and_error(per_trial[:, i, a, b, c])
                    rows.append(SweepRow(snr_db, Mode(mode), Strategy(strategy), config.n_t, n_s, mean, err, config.trials))
    return tuple(rows)


def _gaps(config: SweepConfig, per_trial: FloatArray) -> tuple[GapRow, ...]:
    if Strategy.DYNAMIC not in config.strategies or Strategy.UNIFORM not in config.strategies:
        return ()
    dyn = config.strategies.index(Strategy.DYNAMIC)
    uni = config.strategies.index(Strategy.UNIFORM)
    diff = per_trial[:, :, :, dyn, :] - per_trial[:, :, :, uni, :]
    gaps: list[GapRow] = []
    for i, snr_db in enumerate(config.snr_points_db):
        for a, mode in enumerate(config.modes):
            for c, n_s in enumerate(config.n_s_list):
                mean, err = _mean_and_error(diff[:, i, a, c])
                gaps.append(GapRow(snr_db, Mode(mode), config.n_t, n_s, mean, err, config.trials))
    return tuple(gaps)


def run_sweep(config: SweepConfig, workers: int = 1) -> SweepResult:
    started = clock.monotonic()
    logger.info(
        "sweep: %d trials x %d snr points x %d modes x %d strategies x n_s=%s on %d worker(s)",
        config.trials,
        len(config.snr_points_db),
        len(config.modes),
        len(config.strategies),
        list(config.n_s_list),
        workers,
    )
    per_trial = collect_trials(config, workers)
    result = SweepResult(rows=_rows(config, per_trial), gaps=_gaps(config, per_trial))
    logger.info("sweep finished in %.1fs", clock.monotonic() - started)
    return result


def _allocation_gains(selection: MappingSelection, pattern: ActivationPattern) -> list[FloatArray]:
    active = list(pattern.active_positions)
    g1 = selection.effective_gains_hop1[active]
    g2 = selection.effective_gains_hop2[active]
    if selection.mode == Mode.CENTRALIZED:
        return [np.minimum(g1, g2)]
    return [g1, g2]


def high_snr_convergence_check(
    realization: ChannelRealization,
    selection: MappingSelection,
    pattern: ActivationPattern,
    n_0: float,
    budget_list: list[float],
) -> list[float]:
    """Max relative deviation of the waterfill powers from budget / N_A, per budget.

    Centralized selections waterfill link gains; decentralized ones report the
    worse of the two hops.
    """
    if pattern.n_a != selection.n_s:
        raise ValidationError("high-SNR convergence is checked on the all-active pattern", field="pattern")
    if realization.n_t <= max(max(selection.selected_hop1), max(selection.selected_hop2)):
        raise ValidationError("selection does not belong to this realization", field="selection")
    gain_sets = _allocation_gains(selection, pattern)
    if any(np.any(g <= 0) for g in gain_sets):
        raise ValidationError("high-SNR convergence needs strictly positive gains", field="gains")
    deviations: list[float] = []
    for budget in budget_list:
        if budget <= 0:
            raise ValidationError(f"budgets must be > 0, got {budget}", field="budget")
        share = budget / pattern.n_a
        worst = 0.0
        for gains in gain_sets:
            powers = waterfill(AllocationProblem(gains, n_0, budget)).powers
            worst = max(worst, float(np.max(np.abs(powers - share))) / share)
        deviations.append(worst)
    return deviations


def low_snr_concentration_check(problem: AllocationProblem) -> bool:
    """True iff waterfilling puts the whole budget on the strongest position.

    Cross-checks the solver against the closed-form threshold
    budget <= N0/g_(2) - N0/g_(1) and raises InvariantError if they disagree.
    """
    if problem.size < 2:
        raise ValidationError("concentration needs at least two positions", field="gains")
    if np.any(problem.gains <= 0):
        raise ValidationError("concentration check needs every gain > 0", field="gains")
    allocation = waterfill(problem)
    best = int(np.argmax(problem.gains))
    concentrated = allocation.support <= {best}
    t = np.sort(thresholds(problem.gains, problem.n_0))
    # budget <= t_(2) - t_(1), evaluated the way the solver tests its second water level
    predicted = bool((problem.budget + (t[0] + t[1])) / 2 <= t[1])
    if concentrated != predicted:
        raise InvariantError(
            f"waterfill support {sorted(allocation.support)} disagrees with threshold "
            f"{t[1] - t[0]!r} at budget {problem.budget!r}"
        )
    return concentrated
