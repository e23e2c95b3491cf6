import dataclasses
import math
from typing import Any

import numpy as np
import numpy.typing as npt

from .errors import EnumerationCapError, ValidationError
from .types import POLICY_KINDS, Mode, PolicyKind, Strategy

FloatArray = npt.NDArray[np.float64]

DEFAULT_ENUMERATION_CAP = 2**16


def _frozen_vector(values: Any, name: str) -> FloatArray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be a vector, got shape {arr.shape}", field=name)
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must be finite", field=name)
    arr.setflags(write=False)
    return arr


def _positive(value: float, name: str) -> None:
    if not (math.isfinite(value) and value > 0):
        raise ValidationError(f"{name} must be > 0, got {value}", field=name)


@dataclasses.dataclass(frozen=True)
class ChannelParams:
    n_t: int
    mu_1: float = 1.0
    mu_2: float = 1.0
    n_0: float = 1.0

    def __post_init__(self) -> None:
        if self.n_t < 2:
            raise ValidationError(f"n_t must be >= 2, got {self.n_t}", field="n_t")
        _positive(self.mu_1, "mu_1")
        _positive(self.mu_2, "mu_2")
        _positive(self.n_0, "n_0")


@dataclasses.dataclass(frozen=True, eq=False)
class ChannelRealization:
    """Per-subcarrier channel power gains |h_i(n)|^2 of both hops."""

    gains_hop1: FloatArray
    gains_hop2: FloatArray

    def __post_init__(self) -> None:
        g1 = _frozen_vector(self.gains_hop1, "gains_hop1")
        g2 = _frozen_vector(self.gains_hop2, "gains_hop2")
        if g1.shape != g2.shape:
            raise ValidationError(f"hop gain vectors differ in length: {g1.size} vs {g2.size}", field="gains_hop2")
        if g1.size < 2:
            raise ValidationError("a realization needs at least two subcarriers", field="gains_hop1")
        if np.any(g1 < 0) or np.any(g2 < 0):
            raise ValidationError("channel gains must be nonnegative", field="gains_hop1")
        object.__setattr__(self, "gains_hop1", g1)
        object.__setattr__(self, "gains_hop2", g2)

    @property
    def n_t(self) -> int:
        return int(self.gains_hop1.size)

    def swapped(self) -> "ChannelRealization":
        return ChannelRealization(self.gains_hop2, self.gains_hop1)


@dataclasses.dataclass(frozen=True, eq=False)
class MappingSelection:
    """Selected subcarriers per hop, strongest first, plus each hop's complementary subcarrier.

    Position j of hop 1 forwards through position j of hop 2.
    """

    mode: Mode
    selected_hop1: tuple[int, ...]
    selected_hop2: tuple[int, ...]
    comp_hop1: int
    comp_hop2: int
    effective_gains_hop1: FloatArray
    effective_gains_hop2: FloatArray

    def __post_init__(self) -> None:
        object.__setattr__(self, "effective_gains_hop1", _frozen_vector(self.effective_gains_hop1, "effective_gains_hop1"))
        object.__setattr__(self, "effective_gains_hop2", _frozen_vector(self.effective_gains_hop2, "effective_gains_hop2"))
        n_s = len(self.selected_hop1)
        if n_s == 0 or len(self.selected_hop2) != n_s:
            raise ValidationError("selected lists must be nonempty and of equal length", field="selected_hop2")
        if self.effective_gains_hop1.size != n_s or self.effective_gains_hop2.size != n_s:
            raise ValidationError("effective gains must match the selection length", field="effective_gains_hop1")
        for hop, selected, comp in ((1, self.selected_hop1, self.comp_hop1), (2, self.selected_hop2, self.comp_hop2)):
            if len(set(selected)) != n_s:
                raise ValidationError(f"hop {hop} selection has repeated subcarriers", field=f"selected_hop{hop}")
            if comp in selected:
                raise ValidationError(f"hop {hop} complementary subcarrier is selected", field=f"comp_hop{hop}")
        if self.mode == Mode.CENTRALIZED and (
            self.selected_hop1 != self.selected_hop2 or self.comp_hop1 != self.comp_hop2
        ):
            raise ValidationError("centralized selection must be shared by both hops", field="mode")

    @property
    def n_s(self) -> int:
        return len(self.selected_hop1)


@dataclasses.dataclass(frozen=True)
class ActivationPattern:
    k: int
    active_positions: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValidationError(f"pattern index k must be >= 1, got {self.k}", field="k")
        bits = self.k - 1
        expected = tuple(j for j in range(bits.bit_length()) if bits >> j & 1)
        if tuple(self.active_positions) != expected:
            raise ValidationError(
                f"pattern k={self.k} activates positions {expected}, got {self.active_positions}",
                field="active_positions",
            )

    @property
    def n_a(self) -> int:
        return len(self.active_positions)


@dataclasses.dataclass(frozen=True, eq=False)
class AllocationProblem:
    gains: FloatArray
    n_0: float
    budget: float

    def __post_init__(self) -> None:
        gains = _frozen_vector(self.gains, "gains")
        if gains.size == 0:
            raise ValidationError("allocation problem needs at least one position", field="gains")
        if np.any(gains < 0):
            raise ValidationError("gains must be nonnegative", field="gains")
        _positive(self.n_0, "n_0")
        if not (math.isfinite(self.budget) and self.budget >= 0):
            raise ValidationError(f"budget must be >= 0, got {self.budget}", field="budget")
        object.__setattr__(self, "gains", gains)

    @property
    def size(self) -> int:
        return int(self.gains.size)


@dataclasses.dataclass(frozen=True, eq=False)
class PowerAllocation:
    """Per-position transmit powers. `water_level` is None for the uniform split."""

    powers: FloatArray
    water_level: float | None
    support: frozenset[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "powers", _frozen_vector(self.powers, "powers"))

    @property
    def total(self) -> float:
        return math.fsum(self.powers.tolist())


@dataclasses.dataclass(frozen=True, eq=False)
class KktReport:
    epsilon: float
    epsilon_n: FloatArray
    stationarity_residual: float
    complementarity_residual: float
    feasibility_residual: float
    budget_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return max(self.residuals().values()) <= self.tol

    def residuals(self) -> dict[str, float]:
        return {
            "stationarity": self.stationarity_residual,
            "complementarity": self.complementarity_residual,
            "feasibility": self.feasibility_residual,
            "budget": self.budget_residual,
        }


@dataclasses.dataclass(frozen=True, eq=False)
class PatternCapacity:
    k: int
    capacity: float
    alloc_hop1: PowerAllocation
    alloc_hop2: PowerAllocation


@dataclasses.dataclass(frozen=True)
class PatternPolicy:
    """How C(k) is averaged over activation patterns: full enumeration or uniform draws."""

    kind: PolicyKind = "exact"
    draws: int = 0
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP

    def __post_init__(self) -> None:
        if self.kind not in POLICY_KINDS:
            raise ValidationError(f"pattern_policy must be exact or sampled, got {self.kind!r}", field="pattern_policy")
        if self.kind == "sampled" and self.draws < 1:
            raise ValidationError("sampled pattern policy needs pattern_draws >= 1", field="pattern_draws")
        if self.enumeration_cap < 2:
            raise ValidationError("enumeration_cap must be >= 2", field="enumeration_cap")


@dataclasses.dataclass(frozen=True)
class SweepConfig:
    n_t: int = 16
    n_s_list: tuple[int, ...] = (2, 4, 8)
    snr_points_db: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0)
    trials: int = 10_000
    mu_1: float = 1.0
    mu_2: float = 1.0
    n_0: float = 1.0
    modes: tuple[Mode, ...] = (Mode.DECENTRALIZED, Mode.CENTRALIZED)
    strategies: tuple[Strategy, ...] = (Strategy.DYNAMIC, Strategy.UNIFORM)
    master_seed: int = 1
    pattern_policy: PolicyKind = "exact"
    pattern_draws: int = 0
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP

    def __post_init__(self) -> None:
        ChannelParams(self.n_t, self.mu_1, self.mu_2, self.n_0)
        if not self.n_s_list:
            raise ValidationError("n_s_list must not be empty", field="n_s_list")
        for n_s in self.n_s_list:
            if not 1 <= n_s < self.n_t:
                raise ValidationError(f"n_s={n_s} must satisfy 1 <= n_s < n_t={self.n_t}", field="n_s_list")
        if len(set(self.n_s_list)) != len(self.n_s_list):
            raise ValidationError("n_s_list has duplicates", field="n_s_list")
        if self.trials < 1:
            raise ValidationError(f"trials must be >= 1, got {self.trials}", field="trials")
        if not self.snr_points_db:
            raise ValidationError("snr_points_db must not be empty", field="snr_points_db")
        if not all(math.isfinite(s) for s in self.snr_points_db):
            raise ValidationError("snr_points_db must be finite", field="snr_points_db")
        if not self.modes or len(set(self.modes)) != len(self.modes):
            raise ValidationError("modes must be a nonempty list without duplicates", field="modes")
        if not self.strategies or len(set(self.strategies)) != len(self.strategies):
            raise ValidationError("strategies must be a nonempty list without duplicates", field="strategies")
        if self.master_seed < 0:
            raise ValidationError("master_seed must be >= 0", field="master_seed")
        policy = self.policy
        if policy.kind == "exact":
            for n_s in self.n_s_list:
                if 2**n_s > policy.enumeration_cap:
                    raise EnumerationCapError(
                        f"n_s={n_s} needs 2^{n_s} patterns, above enumeration_cap={policy.enumeration_cap}; "
                        "use pattern_policy: sampled",
                        field="n_s_list",
                    )

    @property
    def policy(self) -> PatternPolicy:
        return PatternPolicy(self.pattern_policy, self.pattern_draws, self.enumeration_cap)

    @property
    def channel(self) -> ChannelParams:
        return ChannelParams(self.n_t, self.mu_1, self.mu_2, self.n_0)

    def budgets(self) -> FloatArray:
        """P_t = N0 * 10^(snr_db / 10) for every sweep point."""
        return self.n_0 * np.power(10.0, np.array(self.snr_points_db, dtype=np.float64) / 10.0)

    def to_mapping(self) -> dict[str, Any]:
        return {
            "n_t": self.n_t,
            "n_s_list": list(self.n_s_list),
            "snr_points_db": list(self.snr_points_db),
            "trials": self.trials,
            "mu_1": self.mu_1,
            "mu_2": self.mu_2,
            "n_0": self.n_0,
            "modes": [str(m) for m in self.modes],
            "strategies": [str(s) for s in self.strategies],
            "master_seed": self.master_seed,
            "pattern_policy": self.pattern_policy,
            "pattern_draws": self.pattern_draws,
            "enumeration_cap": self.enumeration_cap,
        }


SWEEP_FIELDS: tuple[str, ...] = tuple(f.name for f in dataclasses.fields(SweepConfig))


@dataclasses.dataclass(frozen=True)
class SweepRow:
    snr_db: float
    mode: Mode
    strategy: Strategy
    n_t: int
    n_s: int
    mean_capacity: float
    std_error: float
    trials: int


@dataclasses.dataclass(frozen=True)
class GapRow:
    """Paired dynamic minus uniform capacity, averaged over the same trials."""

    snr_db: float
    mode: Mode
    n_t: int
    n_s: int
    mean_gap: float
    std_error: float
    trials: int


@dataclasses.dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    gaps: tuple[GapRow, ...] = ()

    def row(self, snr_db: float, mode: Mode, strategy: Strategy, n_s: int) -> SweepRow:
        for r in self.rows:
            if r.snr_db == snr_db and r.mode == mode and r.strategy == strategy and r.n_s == n_s:
                return r
        raise KeyError((snr_db, mode, strategy, n_s))


@dataclasses.dataclass(frozen=True)
class RunManifest:
    config: SweepConfig
    tool_version: str
    started_at: str
    finished_at: str
    output_path: str

    def to_mapping(self) -> dict[str, Any]:
        return {
            "config": self.config.to_mapping(),
            "tool_version": self.tool_version,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "output_path": self.output_path,
        }
