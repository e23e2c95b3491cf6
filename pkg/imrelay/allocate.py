import math
import sys

import numpy as np
from fncli import cli
from rich.table import Table

from imrelay_sim.core.errors import ValidationError
from imrelay_sim.core.lib import env
from imrelay_sim.core.lib.format import console, fmt_num
from imrelay_sim.core.lib.parsing import parse_choices, parse_float, parse_float_list
from imrelay_sim.core.models import AllocationProblem, PowerAllocation
from imrelay_sim.core.types import Strategy
from imrelay_sim.waterfill import uniform_allocation, waterfill

from .output import dumps

_STRATEGIES = frozenset(str(s) for s in Strategy)
TEXT_FORMATS = frozenset({"text", "json"})

PROBLEM_HELP = {
    "gains": "comma-separated channel gains",
    "n0": "noise power (default: 1)",
    "budget": "total transmit power P_t",
    "fmt": "text|json (default: text)",
}


def parse_problem(gains: str | None, n0: str | None, budget: str | None) -> AllocationProblem:
    if gains is None:
        raise ValidationError("--gains is required", field="gains")
    if budget is None:
        raise ValidationError("--budget is required", field="budget")
    values = parse_float_list(gains, "gains")
    n_0 = parse_float(n0 or "1", "n0")
    total = parse_float(budget, "budget")
    if n_0 <= 0:
        raise ValidationError(f"n0 must be > 0, got {n0}", field="n0")
    if total <= 0:
        raise ValidationError(f"budget must be > 0, got {budget}", field="budget")
    return AllocationProblem(np.array(values), n_0, total)


def parse_format(raw: str | None) -> str:
    return parse_choices(raw or "text", "format", TEXT_FORMATS)[0]


def allocate_power(problem: AllocationProblem, strategy: Strategy) -> PowerAllocation:
    if strategy == Strategy.UNIFORM:
        return uniform_allocation(problem.size, problem.budget)
    return waterfill(problem)


def allocation_document(problem: AllocationProblem, strategy: Strategy, allocation: PowerAllocation) -> dict:
    snr = allocation.powers * problem.gains / problem.n_0
    terms = 0.5 * np.log2(1.0 + snr)
    return {
        "strategy": str(strategy),
        "gains": problem.gains.tolist(),
        "n0": problem.n_0,
        "budget": problem.budget,
        "powers": allocation.powers.tolist(),
        "water_level": allocation.water_level,
        "snr": snr.tolist(),
        "capacity_terms": terms.tolist(),
        "capacity": math.fsum(terms.tolist()),
    }


@cli(
    "imrelay",
    flags={"fmt": ["--format"]},
    help={**PROBLEM_HELP, "strategy": "dynamic|uniform (default: dynamic)"},
)
def allocate(
    gains: str | None = None,
    n0: str | None = None,
    budget: str | None = None,
    strategy: str | None = None,
    fmt: str | None = None,
) -> None:
    """allocate power over one set of subcarrier gains"""
    opts = env.fill({"gains": gains, "n0": n0, "budget": budget, "strategy": strategy, "format": fmt})
    problem = parse_problem(opts["gains"], opts["n0"], opts["budget"])
    choice = Strategy(parse_choices(opts["strategy"] or "dynamic", "strategy", _STRATEGIES)[0])
    form = parse_format(opts["format"])
    doc = allocation_document(problem, choice, allocate_power(problem, choice))

    if form == "json":
        sys.stdout.write(dumps(doc))
        return

    table = Table(title=f"{choice} allocation")
    for col in ("n", "gain", "power", "snr", "capacity"):
        table.add_column(col, justify="right")
    for n, (g, p, s, c) in enumerate(zip(doc["gains"], doc["powers"], doc["snr"], doc["capacity_terms"], strict=True)):
        table.add_row(str(n), fmt_num(g), fmt_num(p), fmt_num(s), fmt_num(c))
    console.print(table)
    if doc["water_level"] is not None:
        console.print(f"water level  {fmt_num(doc['water_level'])}")
    console.print(f"capacity     {fmt_num(doc['capacity'])} bit/s/Hz")
