"""Core enumerations shared by the engine and the command surface."""

from enum import StrEnum
from typing import Literal


class Mode(StrEnum):
    DECENTRALIZED = "decentralized"
    CENTRALIZED = "centralized"


class Strategy(StrEnum):
    DYNAMIC = "dynamic"
    UNIFORM = "uniform"


PolicyKind = Literal["exact", "sampled"]

POLICY_KINDS: frozenset[str] = frozenset({"exact", "sampled"})
