"""Centralized accessors for time-related values."""

import time
from datetime import UTC, datetime


def now() -> datetime:
    return datetime.now(UTC)


def now_iso() -> str:
    return now().isoformat(timespec="seconds")


def monotonic() -> float:
    return time.perf_counter()
