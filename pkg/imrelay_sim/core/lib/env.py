"""Environment accessors: the single source of truth for IMRELAY_* overrides.

Every command-line option can also be set as IMRELAY_<OPTION>, with dashes turned
into underscores (`--snr-db` -> IMRELAY_SNR_DB).
"""

import os
from collections.abc import Iterable, Mapping
from pathlib import Path

PREFIX = "IMRELAY_"


def var_name(flag: str) -> str:
    return PREFIX + flag.lstrip("-").replace("-", "_").upper()


def overrides(flags: Iterable[str], environ: Mapping[str, str] | None = None) -> dict[str, str]:
    """Return {flag: raw value} for every flag that has a non-empty env override."""
    source = os.environ if environ is None else environ
    found: dict[str, str] = {}
    for flag in flags:
        if val := source.get(var_name(flag), "").strip():
            found[flag] = val
    return found


def fill(options: Mapping[str, str | None], environ: Mapping[str, str] | None = None) -> dict[str, str | None]:
    """Options left unset on the command line fall back to IMRELAY_<OPTION>."""
    found = overrides([name for name, value in options.items() if value is None], environ)
    return {name: found.get(name, value) for name, value in options.items()}


def config_dir() -> Path:
    """User config directory; IMRELAY_DIR wins over ~/.imrelay."""
    if val := os.environ.get(PREFIX + "DIR"):
        return Path(val)
    return Path.home() / ".imrelay"
