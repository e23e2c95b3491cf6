"""Result files: sweep CSV, paired-gap CSV, JSON documents and the run manifest."""

import csv
import io
import json
from pathlib import Path
from typing import Any

from imrelay_sim.core.errors import OutputError
from imrelay_sim.core.lib.format import fmt_num
from imrelay_sim.core.models import RunManifest, SweepResult

SWEEP_HEADER = ("snr_db", "mode", "strategy", "n_t", "n_s", "mean_capacity", "std_error", "trials")
GAP_HEADER = ("snr_db", "mode", "n_t", "n_s", "mean_gap", "std_error", "trials")


def sweep_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for r in result.rows:
        writer.writerow(
            [fmt_num(r.snr_db), r.mode, r.strategy, r.n_t, r.n_s, fmt_num(r.mean_capacity), fmt_num(r.std_error), r.trials]
        )
    return buf.getvalue()


def gaps_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(GAP_HEADER)
    for g in result.gaps:
        writer.writerow([fmt_num(g.snr_db), g.mode, g.n_t, g.n_s, fmt_num(g.mean_gap), fmt_num(g.std_error), g.trials])
    return buf.getvalue()


def sweep_document(result: SweepResult) -> dict[str, Any]:
    return {
        "rows": [
            {
                "snr_db": r.snr_db,
                "mode": str(r.mode),
                "strategy": str(r.strategy),
                "n_t": r.n_t,
                "n_s": r.n_s,
                "mean_capacity": r.mean_capacity,
                "std_error": r.std_error,
                "trials": r.trials,
            }
            for r in result.rows
        ],
        "gaps": [
            {
                "snr_db": g.snr_db,
                "mode": str(g.mode),
                "n_t": g.n_t,
                "n_s": g.n_s,
                "mean_gap": g.mean_gap,
                "std_error": g.std_error,
                "trials": g.trials,
            }
            for g in result.gaps
        ],
    }


def dumps(document: Any) -> str:
    return json.dumps(document, indent=2, sort_keys=False) + "\n"


def sibling(path: Path, suffix: str) -> Path:
    """`out/run.csv` + `.gaps.csv` -> `out/run.gaps.csv`."""
    return path.with_name(path.stem + suffix)


def write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e}") from e


def write_manifest(path: Path, manifest: RunManifest) -> None:
    write_text(path, dumps(manifest.to_mapping()))
