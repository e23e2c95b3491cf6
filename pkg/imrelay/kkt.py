import sys

import numpy as np
from fncli import cli
from rich.table import Table

from imrelay_sim.core.errors import CheckFailed, ValidationError
from imrelay_sim.core.lib import env
from imrelay_sim.core.lib.format import console, fmt_list, fmt_num, print_ok
from imrelay_sim.core.lib.parsing import parse_float, parse_float_list
from imrelay_sim.core.models import KktReport, PowerAllocation
from imrelay_sim.waterfill import verify_kkt

from .allocate import PROBLEM_HELP, parse_format, parse_problem
from .output import dumps


def report_document(report: KktReport) -> dict:
    return {
        "epsilon": report.epsilon,
        "epsilon_n": report.epsilon_n.tolist(),
        "stationarity_residual": report.stationarity_residual,
        "complementarity_residual": report.complementarity_residual,
        "feasibility_residual": report.feasibility_residual,
        "budget_residual": report.budget_residual,
        "tol": report.tol,
        "passed": report.passed,
    }


@cli(
    "imrelay",
    name="kkt-check",
    flags={"fmt": ["--format"]},
    help={
        **PROBLEM_HELP,
        "powers": "comma-separated powers, one per gain",
        "tol": "largest accepted residual (default: 1e-9)",
    },
)
def kkt_check(
    gains: str | None = None,
    n0: str | None = None,
    budget: str | None = None,
    powers: str | None = None,
    tol: str | None = None,
    fmt: str | None = None,
) -> None:
    """verify the KKT certificate of a power allocation"""
    opts = env.fill({"gains": gains, "n0": n0, "budget": budget, "powers": powers, "tol": tol, "format": fmt})
    problem = parse_problem(opts["gains"], opts["n0"], opts["budget"])
    if opts["powers"] is None:
        raise ValidationError("--powers is required", field="powers")
    allocation = PowerAllocation(np.array(parse_float_list(opts["powers"], "powers")), None, frozenset())
    limit = parse_float(opts["tol"] or "1e-9", "tol")
    form = parse_format(opts["format"])
    report = verify_kkt(problem, allocation, tol=limit)

    if form == "json":
        sys.stdout.write(dumps(report_document(report)))
    else:
        table = Table(title="KKT residuals")
        table.add_column("condition")
        table.add_column("residual", justify="right")
        for name, value in report.residuals().items():
            table.add_row(name, fmt_num(value))
        console.print(table)
        console.print(f"epsilon    {fmt_num(report.epsilon)}")
        console.print(f"epsilon_n  {fmt_list(report.epsilon_n)}")

    if not report.passed:
        worst = max(report.residuals().items(), key=lambda kv: kv[1])
        raise CheckFailed(f"KKT check failed: {worst[0]} residual {fmt_num(worst[1])} > tol {fmt_num(limit)}")
    if form != "json":
        print_ok("KKT conditions hold")
