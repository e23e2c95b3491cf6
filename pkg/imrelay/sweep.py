import logging
import sys
from pathlib import Path

from fncli import cli

from imrelay_sim.core.config import PRESETS, Config, load_sweep_config
from imrelay_sim.core.errors import ValidationError
from imrelay_sim.core.lib import clock, env
from imrelay_sim.core.lib.format import print_ok
from imrelay_sim.core.lib.parsing import parse_choices, parse_int
from imrelay_sim.core.models import RunManifest, SweepConfig
from imrelay_sim.experiment import default_workers, run_sweep

from . import __version__
from .output import dumps, gaps_csv, sibling, sweep_csv, sweep_document, write_manifest, write_text

logger = logging.getLogger(__name__)

# sweep option -> SweepConfig field
FIELD_FLAGS = {
    "seed": "master_seed",
    "trials": "trials",
    "nt": "n_t",
    "ns": "n_s_list",
    "snr_db": "snr_points_db",
    "mode": "modes",
    "strategy": "strategies",
    "mu1": "mu_1",
    "mu2": "mu_2",
    "n0": "n_0",
    "pattern_policy": "pattern_policy",
    "pattern_draws": "pattern_draws",
    "enumeration_cap": "enumeration_cap",
}

FORMATS = frozenset({"csv", "json"})


def resolve_config(config: str | None, preset: str | None, given: dict[str, str | None]) -> SweepConfig:
    if preset is not None and preset not in PRESETS:
        raise ValidationError(f"unknown preset '{preset}'. valid: {', '.join(sorted(PRESETS))}", field="preset")
    overrides = {field: given[name] for name, field in FIELD_FLAGS.items() if given[name] is not None}
    return load_sweep_config(Path(config) if config else None, overrides, preset=preset)


def resolve_workers(raw: str | None) -> int:
    if raw is None:
        configured = Config().get("workers")
        return int(configured) if isinstance(configured, int) and configured > 0 else default_workers()
    workers = parse_int(raw, "workers")
    if workers < 1:
        raise ValidationError(f"workers must be >= 1, got {workers}", field="workers")
    return workers


@cli(
    "imrelay",
    flags={"fmt": ["--format"]},
    help={
        "config": "flat YAML file keyed by sweep field names",
        "preset": f"start from a named preset ({', '.join(sorted(PRESETS))})",
        "out": "result file (default: stdout, no manifest)",
        "fmt": "csv|json (default: csv)",
        "seed": "master seed",
        "trials": "channel realizations per point",
        "nt": "subcarriers N_T",
        "ns": "selected subcarrier counts, e.g. 2,4,8",
        "snr_db": "P_t/N0 in dB: list or START:STEP:STOP",
        "mode": "decentralized,centralized",
        "strategy": "dynamic,uniform",
        "mu1": "mean channel gain of hop 1",
        "mu2": "mean channel gain of hop 2",
        "n0": "noise power",
        "pattern_policy": "exact|sampled",
        "pattern_draws": "patterns drawn per trial under the sampled policy",
        "enumeration_cap": "largest 2^n_s the exact policy enumerates",
        "workers": "worker processes (default: all cores); results do not depend on it",
    },
)
def sweep(
    config: str | None = None,
    preset: str | None = None,
    out: str | None = None,
    fmt: str | None = None,
    seed: str | None = None,
    trials: str | None = None,
    nt: str | None = None,
    ns: str | None = None,
    snr_db: str | None = None,
    mode: str | None = None,
    strategy: str | None = None,
    mu1: str | None = None,
    mu2: str | None = None,
    n0: str | None = None,
    pattern_policy: str | None = None,
    pattern_draws: str | None = None,
    enumeration_cap: str | None = None,
    workers: str | None = None,
) -> None:
    """Monte Carlo sweep of average capacity vs P_t/N0"""
    opts = env.fill(
        {
            "config": config,
            "preset": preset,
            "out": out,
            "format": fmt,
            "workers": workers,
            "seed": seed,
            "trials": trials,
            "nt": nt,
            "ns": ns,
            "snr_db": snr_db,
            "mode": mode,
            "strategy": strategy,
            "mu1": mu1,
            "mu2": mu2,
            "n0": n0,
            "pattern_policy": pattern_policy,
            "pattern_draws": pattern_draws,
            "enumeration_cap": enumeration_cap,
        }
    )
    sweep_config = resolve_config(opts["config"], opts["preset"], opts)
    n_workers = resolve_workers(opts["workers"])
    form = parse_choices(opts["format"] or "csv", "format", FORMATS)[0]
    target = Path(opts["out"]) if opts["out"] else None

    started_at = clock.now_iso()
    result = run_sweep(sweep_config, workers=n_workers)
    finished_at = clock.now_iso()

    if form == "json":
        text = dumps({"config": sweep_config.to_mapping(), **sweep_document(result)})
    else:
        text = sweep_csv(result)

    if target is None:
        sys.stdout.write(text)
        return

    write_text(target, text)
    if form == "csv" and result.gaps:
        write_text(sibling(target, ".gaps.csv"), gaps_csv(result))
    manifest = RunManifest(sweep_config, __version__, started_at, finished_at, str(target))
    write_manifest(sibling(target, ".manifest.json"), manifest)
    logger.info("wrote %s", target)
    print_ok(f"{len(result.rows)} rows → {target}")
