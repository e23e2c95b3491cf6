"""Waterfilling power allocation over parallel subcarriers and its KKT certificate.

Maximizes sum 1/2 log2(1 + P_n g_n / N0) subject to sum P_n <= budget, P_n >= 0.
With thresholds t_n = N0 / g_n the optimum is P_n = max(0, nu - t_n), where the
water level nu spends the budget exactly. The 1/(2 ln 2) factor of the KKT
multipliers is folded into nu and only reappears in verify_kkt.
"""

import math

import numpy as np
import numpy.typing as npt

from imrelay_sim.core.errors import DegenerateProblemError, ValidationError
from imrelay_sim.core.models import AllocationProblem, FloatArray, KktReport, PowerAllocation

_TWO_LN2 = 2.0 * math.log(2.0)


def _support(powers: FloatArray) -> frozenset[int]:
    return frozenset(int(i) for i in np.flatnonzero(powers > 0))


def thresholds(gains: npt.ArrayLike, n_0: float) -> FloatArray:
    """N0 / g per position; zero gains map to +inf and never receive power."""
    g = np.asarray(gains, dtype=np.float64)
    with np.errstate(divide="ignore"):
        return np.where(g > 0, n_0 / g, np.inf)


def waterfill(problem: AllocationProblem) -> PowerAllocation:
    g = problem.gains
    live = np.flatnonzero(g > 0)
    powers = np.zeros(problem.size)
    if live.size == 0:
        if problem.budget > 0:
            raise DegenerateProblemError("all gains are zero: capacity is 0 for every allocation", field="gains")
        return PowerAllocation(powers, None, frozenset())

    t = problem.n_0 / g[live]
    order = np.argsort(t, kind="stable")
    t_sorted = t[order]
    if problem.budget == 0:
        return PowerAllocation(powers, float(t_sorted[0]), frozenset())

    levels = (problem.budget + np.cumsum(t_sorted)) / np.arange(1, t_sorted.size + 1)
    hits = np.flatnonzero(levels > t_sorted)
    # budget below float resolution of the lowest threshold: it all goes to the strongest position
    m = int(hits[-1]) + 1 if hits.size else 1
    nu = float(levels[m - 1])
    filled = live[order[:m]]
    if m == 1:
        powers[filled] = problem.budget
    else:
        powers[filled] = nu - t_sorted[:m]
    return PowerAllocation(powers, nu, _support(powers))


def waterfill_batch(thresh: npt.ArrayLike, mask: npt.ArrayLike, budgets: npt.ArrayLike) -> FloatArray:
    """Waterfill every (budget, mask row) pair against one threshold vector.

    thresh: (N,) with +inf for unusable positions; mask: (K, N) active positions;
    budgets: (B,). Returns powers shaped (B, K, N). Rows with no usable active
    position get zero power.
    """
    t_all = np.asarray(thresh, dtype=np.float64)
    m_all = np.asarray(mask, dtype=bool)
    b = np.asarray(budgets, dtype=np.float64)

    order = np.argsort(t_all, kind="stable")
    t = t_all[order]
    active = m_all[:, order] & np.isfinite(t)

    cum = np.cumsum(np.where(active, t, 0.0), axis=-1)
    count = np.maximum(np.cumsum(active, axis=-1), 1)
    levels = (b[:, None, None] + cum[None]) / count[None]
    ok = active[None] & (levels > t)

    n = t.size
    last = n - 1 - np.argmax(ok[..., ::-1], axis=-1)
    nu = np.take_along_axis(levels, last[..., None], axis=-1)
    filled = ok.any(axis=-1, keepdims=True)
    nu = np.where(filled, nu, -np.inf)

    with np.errstate(invalid="ignore"):
        sorted_powers = np.where(active[None], np.maximum(nu - t, 0.0), 0.0)
    single = (sorted_powers > 0).sum(axis=-1, keepdims=True) == 1
    sorted_powers = np.where(single & (sorted_powers > 0), b[:, None, None], sorted_powers)

    # budget below float resolution of the lowest threshold: it all goes to the strongest active position
    strongest = np.arange(n) == np.argmax(active, axis=-1)[:, None]
    starved = ~filled & active.any(axis=-1, keepdims=True)[None] & (b[:, None, None] > 0)
    sorted_powers = np.where(starved & strongest[None], b[:, None, None], sorted_powers)

    powers = np.empty_like(sorted_powers)
    powers[..., order] = sorted_powers
    return powers


def uniform_allocation(n_active: int, budget: float) -> PowerAllocation:
    if n_active < 1:
        raise ValidationError(f"uniform allocation needs n_active >= 1, got {n_active}", field="n_active")
    if not (math.isfinite(budget) and budget >= 0):
        raise ValidationError(f"budget must be >= 0, got {budget}", field="budget")
    powers = np.full(n_active, budget / n_active)
    return PowerAllocation(powers, None, _support(powers))


def interior_allocation(problem: AllocationProblem) -> PowerAllocation | None:
    """Closed-form (P_t + sum N0/g_m) / N_A - N0/g_n; None when some entry would be negative."""
    if np.any(problem.gains <= 0):
        raise ValidationError("interior allocation needs every gain > 0", field="gains")
    t = problem.n_0 / problem.gains
    nu = (problem.budget + math.fsum(t.tolist())) / problem.size
    powers = nu - t
    if np.any(powers < 0):
        return None
    return PowerAllocation(powers, nu, _support(powers))


def sum_capacity(gains: npt.ArrayLike, powers: npt.ArrayLike, n_0: float) -> float:
    snr = np.asarray(powers, dtype=np.float64) * np.asarray(gains, dtype=np.float64) / n_0
    return 0.5 * math.fsum(np.log2(1.0 + snr).tolist())


def verify_kkt(problem: AllocationProblem, allocation: PowerAllocation, tol: float = 1e-9) -> KktReport:
    """Rebuild the KKT multipliers for `allocation` and measure every condition's residual.

    epsilon is the budget multiplier, taken from the position with the most power;
    epsilon_n[n] = epsilon - g_n / (2 ln2 (N0 + g_n P_n)) is the multiplier of P_n >= 0.
    """
    p = allocation.powers
    if p.size == 0:
        raise ValidationError("allocation is empty", field="powers")
    if p.size != problem.size:
        raise ValidationError(f"allocation has {p.size} powers for {problem.size} gains", field="powers")
    if tol < 0:
        raise ValidationError(f"tol must be >= 0, got {tol}", field="tol")

    g = problem.gains
    marginal = g / (_TWO_LN2 * (problem.n_0 + g * np.maximum(p, 0.0)))
    positive = p > 0
    epsilon = float(marginal[int(np.argmax(p))]) if positive.any() else float(marginal.max())
    epsilon_n = epsilon - marginal

    stationarity = float(np.max(np.abs(epsilon_n[positive]))) if positive.any() else 0.0
    complementarity = float(np.max(np.abs(epsilon_n * p)))
    idle = ~positive
    dual_gap = float(np.max(-epsilon_n[idle])) if idle.any() else 0.0
    feasibility = max(0.0, float(-p.min()), dual_gap, -epsilon)
    budget_residual = abs(math.fsum(p.tolist()) - problem.budget)

    return KktReport(
        epsilon=epsilon,
        epsilon_n=np.where(positive, 0.0, epsilon_n),
        stationarity_residual=stationarity,
        complementarity_residual=complementarity,
        feasibility_residual=feasibility,
        budget_residual=budget_residual,
        tol=tol,
    )


def bisect_allocation(problem: AllocationProblem, iterations: int = 200) -> PowerAllocation:
    """Reference solver: bisect the water level until sum max(0, nu - t_n) meets the budget.

    Independent of the sort-and-cumulate path; used as an oracle by selftest.
    """
    t = thresholds(problem.gains, problem.n_0)
    finite = t[np.isfinite(t)]
    if finite.size == 0:
        raise DegenerateProblemError("all gains are zero: capacity is 0 for every allocation", field="gains")
    lo = float(finite.min())
    hi = lo + problem.budget
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if np.maximum(mid - finite, 0.0).sum() > problem.budget:
            hi = mid
        else:
            lo = mid
    with np.errstate(invalid="ignore"):
        powers = np.where(np.isfinite(t), np.maximum(lo - t, 0.0), 0.0)
    return PowerAllocation(powers, lo, _support(powers))
