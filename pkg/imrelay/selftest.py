"""imrelay selftest: quick oracle checks of the solver and the capacity engine.

Reports ✓/✗ per check; non-zero exit when any check fails.
"""

import math
from collections.abc import Callable

import numpy as np
from fncli import cli

from imrelay_sim.capacity import average_capacity_over_patterns
from imrelay_sim.core.errors import CheckFailed, InvariantError, ValidationError
from imrelay_sim.core.lib import env, rng
from imrelay_sim.core.lib.format import console, fmt_num
from imrelay_sim.core.lib.parsing import parse_int
from imrelay_sim.core.models import AllocationProblem, ChannelRealization, PatternPolicy, PowerAllocation, SweepConfig
from imrelay_sim.core.types import Mode, Strategy
from imrelay_sim.experiment import collect_trials, low_snr_concentration_check
from imrelay_sim.mapping import select_centralized
from imrelay_sim.waterfill import bisect_allocation, interior_allocation, verify_kkt, waterfill

# spawn-key namespace of selftest streams, apart from the sweep's (trial, kind) keys
_SELFTEST_KEY = 2**32


def _ok(msg: str) -> None:
    console.print(f"  [green]✓[/green] {msg}")


def _fail(msg: str) -> None:
    console.print(f"  [red]✗[/red] {msg}")


def random_problem(stream: np.random.Generator, low: float = 0.1, high: float = 100.0) -> AllocationProblem:
    size = int(stream.integers(2, 9))
    gains = stream.exponential(1.0, size) + 1e-3
    budget = float(np.exp(stream.uniform(np.log(low), np.log(high))))
    return AllocationProblem(gains, 1.0, budget)


def _shift_mass(allocation: PowerAllocation, fraction: float) -> PowerAllocation | None:
    """Move `fraction` of the largest power onto the second largest; None if fewer than two are active."""
    order = np.argsort(-allocation.powers, kind="stable")
    if allocation.powers[order[1]] <= 0:
        return None
    powers = allocation.powers.copy()
    delta = fraction * powers[order[0]]
    powers[order[0]] -= delta
    powers[order[1]] += delta
    return PowerAllocation(powers, None, allocation.support)


def check_bisection(seed: int, count: int) -> str | None:
    stream = rng.stream(seed, _SELFTEST_KEY, 0)
    worst = 0.0
    for _ in range(count):
        problem = random_problem(stream)
        fast = waterfill(problem).powers
        slow = bisect_allocation(problem).powers
        worst = max(worst, float(np.max(np.abs(fast - slow))) / max(1.0, problem.budget))
    if worst > 1e-9:
        return f"waterfill departs from dual bisection by {fmt_num(worst)}"
    return None


def check_kkt(seed: int, count: int) -> str | None:
    stream = rng.stream(seed, _SELFTEST_KEY, 1)
    perturbed = 0
    for i in range(count):
        problem = random_problem(stream)
        allocation = waterfill(problem)
        report = verify_kkt(problem, allocation)
        if not report.passed:
            return f"problem {i}: waterfill output fails KKT ({report.residuals()})"
        shifted = _shift_mass(allocation, 0.01)
        if shifted is None:
            continue
        perturbed += 1
        if verify_kkt(problem, shifted).passed:
            return f"problem {i}: 1% mass shift still passes KKT"
    if perturbed == 0:
        return "no problem had two active positions to perturb"
    return None


def check_high_snr(seed: int, count: int) -> str | None:
    stream = rng.stream(seed, _SELFTEST_KEY, 2)
    budgets = [1e3, 1e4, 1e5, 1e6]
    for i in range(count):
        base = random_problem(stream)
        scaled: list[float] = []
        for budget in budgets:
            problem = AllocationProblem(base.gains, base.n_0, budget)
            powers = waterfill(problem).powers
            share = budget / problem.size
            scaled.append(float(np.max(np.abs(powers - share))) / share * budget)
            interior = interior_allocation(problem)
            if interior is not None and np.max(np.abs(interior.powers - powers)) > 1e-10 * budget:
                return f"problem {i}: interior closed form disagrees at budget {fmt_num(budget)}"
        # deviation * budget is constant once every position is active
        if not math.isclose(scaled[-1], scaled[-2], rel_tol=1e-4):
            return f"problem {i}: deviation does not shrink as 1/budget ({', '.join(fmt_num(s) for s in scaled)})"
    return None


def check_low_snr(seed: int, count: int) -> str | None:
    stream = rng.stream(seed, _SELFTEST_KEY, 3)
    for i in range(count):
        problem = random_problem(stream, low=1e-3, high=10.0)
        try:
            low_snr_concentration_check(problem)
        except InvariantError as e:
            return f"problem {i}: {e}"
    return None


def check_hand_average() -> str | None:
    realization = ChannelRealization([1.0, 0.5], [1.0, 0.5])
    selection = select_centralized(realization, 1)
    got = average_capacity_over_patterns(realization, selection, 2.0, 1.0, Strategy.DYNAMIC, PatternPolicy())
    want = 0.25 * (1.0 + math.log2(3.0))
    if abs(got - want) > 1e-10:
        return f"N_S=1 centralized average {fmt_num(got)}, expected {fmt_num(want)}"
    return None


def check_paired_dominance(seed: int) -> str | None:
    config = SweepConfig(
        n_t=8,
        n_s_list=(2, 4),
        snr_points_db=(-10.0, 0.0, 10.0, 20.0),
        trials=20,
        modes=(Mode.CENTRALIZED,),
        master_seed=seed,
    )
    per_trial = collect_trials(config)
    dyn = config.strategies.index(Strategy.DYNAMIC)
    uni = config.strategies.index(Strategy.UNIFORM)
    gap = per_trial[..., dyn, :] - per_trial[..., uni, :]
    if gap.min() < -1e-12:
        return f"uniform beats dynamic by {fmt_num(-gap.min())} on a centralized trial"
    return None


@cli(
    "imrelay",
    help={"seed": "seed of the random problems (default: 1)", "problems": "random problems per check (default: 200)"},
)
def self_test(seed: str | None = None, problems: str | None = None) -> None:
    """run quick oracle checks; exit 0 iff all pass"""
    opts = env.fill({"seed": seed, "problems": problems})
    master = parse_int(opts["seed"] or "1", "seed")
    count = parse_int(opts["problems"] or "200", "problems")
    if master < 0:
        raise ValidationError(f"seed must be >= 0, got {master}", field="seed")
    if count < 1:
        raise ValidationError(f"problems must be >= 1, got {count}", field="problems")

    checks: list[tuple[str, Callable[[], str | None]]] = [
        ("waterfill matches dual bisection", lambda: check_bisection(master, count)),
        ("KKT certificates pass, perturbed allocations fail", lambda: check_kkt(master, count)),
        ("high-SNR convergence to budget / N_A", lambda: check_high_snr(master, count)),
        ("low-SNR concentration threshold", lambda: check_low_snr(master, count)),
        ("hand-enumerable N_S = 1 average", check_hand_average),
        ("dynamic dominates uniform on paired trials", lambda: check_paired_dominance(master)),
    ]
    failures = 0
    for name, run in checks:
        problem = run()
        if problem is None:
            _ok(name)
        else:
            _fail(f"{name}: {problem}")
            failures += 1

    if failures:
        raise CheckFailed(f"{failures} of {len(checks)} checks failed")
    console.print(f"\nall {len(checks)} checks passed")
