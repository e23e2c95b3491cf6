"""Mapping-scheme selection and subcarrier activation patterns.

Physical subcarrier indices and pattern positions are 0-based. Pattern index k
is 1-based: bit j of (k - 1) switches position j on, so k = 1 is all-off.
"""

import itertools
import math
from collections.abc import Iterator

import numpy as np
import numpy.typing as npt

from imrelay_sim.core.errors import ValidationError
from imrelay_sim.core.models import ActivationPattern, ChannelRealization, FloatArray, MappingSelection
from imrelay_sim.core.types import Mode


def _check_n_s(n_s: int, n_t: int) -> None:
    if not 1 <= n_s < n_t:
        raise ValidationError(f"n_s={n_s} must satisfy 1 <= n_s < n_t={n_t}", field="n_s")


def select_decentralized(gains: npt.ArrayLike, n_s: int) -> tuple[tuple[int, ...], int]:
    """Top-n_s subcarriers by gain (strongest first) and the best of the rest.

    Maximizing a sum of per-subcarrier increasing terms over n_s-subsets is the
    same as taking the n_s largest gains. Ties go to the lowest index.
    """
    g = np.asarray(gains, dtype=np.float64)
    _check_n_s(n_s, g.size)
    order = np.argsort(-g, kind="stable")
    selected = tuple(int(i) for i in order[:n_s])
    return selected, int(order[n_s])


def link_gains(realization: ChannelRealization) -> FloatArray:
    return np.minimum(realization.gains_hop1, realization.gains_hop2)


def select_centralized(realization: ChannelRealization, n_s: int) -> MappingSelection:
    selected, comp = select_decentralized(link_gains(realization), n_s)
    idx = list(selected)
    return MappingSelection(
        mode=Mode.CENTRALIZED,
        selected_hop1=selected,
        selected_hop2=selected,
        comp_hop1=comp,
        comp_hop2=comp,
        effective_gains_hop1=realization.gains_hop1[idx],
        effective_gains_hop2=realization.gains_hop2[idx],
    )


def build_selection(realization: ChannelRealization, n_s: int, mode: Mode) -> MappingSelection:
    if mode == Mode.CENTRALIZED:
        return select_centralized(realization, n_s)
    if mode != Mode.DECENTRALIZED:
        raise ValidationError(f"unknown mode {mode!r}", field="mode")
    sel1, comp1 = select_decentralized(realization.gains_hop1, n_s)
    sel2, comp2 = select_decentralized(realization.gains_hop2, n_s)
    # rank pairing: j-th strongest of hop 1 forwards through j-th strongest of hop 2
    return MappingSelection(
        mode=Mode.DECENTRALIZED,
        selected_hop1=sel1,
        selected_hop2=sel2,
        comp_hop1=comp1,
        comp_hop2=comp2,
        effective_gains_hop1=realization.gains_hop1[list(sel1)],
        effective_gains_hop2=realization.gains_hop2[list(sel2)],
    )


def exhaustive_selection(gains: npt.ArrayLike, n_s: int) -> tuple[tuple[int, ...], int]:
    """Brute-force counterpart of select_decentralized over all C(N_T, n_s) subsets."""
    g = [float(x) for x in np.asarray(gains, dtype=np.float64)]
    _check_n_s(n_s, len(g))
    best = max(itertools.combinations(range(len(g)), n_s), key=lambda subset: math.fsum(g[i] for i in subset))
    rest = [i for i in range(len(g)) if i not in best]
    comp = max(rest, key=lambda i: (g[i], -i))
    return tuple(sorted(best, key=lambda i: (-g[i], i))), comp


def pattern_count(n_s: int) -> int:
    return 1 << n_s


def pattern_from_index(k: int, n_s: int) -> ActivationPattern:
    if n_s < 1:
        raise ValidationError(f"n_s must be >= 1, got {n_s}", field="n_s")
    if not 1 <= k <= pattern_count(n_s):
        raise ValidationError(f"pattern index k={k} outside 1..{pattern_count(n_s)}", field="k")
    bits = k - 1
    return ActivationPattern(k=k, active_positions=tuple(j for j in range(n_s) if bits >> j & 1))


def enumerate_patterns(n_s: int) -> Iterator[ActivationPattern]:
    for k in range(1, pattern_count(n_s) + 1):
        yield pattern_from_index(k, n_s)


def pattern_mask(n_s: int, ks: npt.ArrayLike) -> npt.NDArray[np.bool_]:
    """Row r is the active-position mask of pattern ks[r]."""
    k = np.asarray(ks, dtype=np.int64)
    if k.size and (k.min() < 1 or k.max() > pattern_count(n_s)):
        raise ValidationError(f"pattern indices must lie in 1..{pattern_count(n_s)}", field="k")
    return ((k[:, None] - 1) >> np.arange(n_s, dtype=np.int64) & 1).astype(bool)


def pattern_bit_length(pattern: ActivationPattern, n_s: int, b_m: int) -> int:
    """B(k) = B_S + N_A(k) * B_M with B_S = n_s."""
    if b_m < 0:
        raise ValidationError(f"b_m must be >= 0, got {b_m}", field="b_m")
    if any(not 0 <= j < n_s for j in pattern.active_positions):
        raise ValidationError(f"pattern {pattern.k} has positions outside 0..{n_s - 1}", field="pattern")
    return n_s + pattern.n_a * b_m


def average_bit_length(n_s: int, b_m: int) -> float:
    """Expected B(k) when every pattern is equally likely: each position is on half the time."""
    if b_m < 0:
        raise ValidationError(f"b_m must be >= 0, got {b_m}", field="b_m")
    return n_s + n_s * b_m / 2
