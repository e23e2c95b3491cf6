import numpy as np
import pytest

from imrelay_sim.core.errors import ValidationError
from imrelay_sim.core.lib import rng
from imrelay_sim.core.models import ChannelRealization
from imrelay_sim.core.types import Mode
from imrelay_sim.mapping import (
    average_bit_length,
    build_selection,
    enumerate_patterns,
    exhaustive_selection,
    link_gains,
    pattern_bit_length,
    pattern_count,
    pattern_from_index,
    pattern_mask,
    select_centralized,
    select_decentralized,
)


def test_decentralized_picks_strongest():
    assert select_decentralized([0.9, 0.1, 0.5, 0.7], 2) == ((0, 3), 2)


def test_decentralized_ties_go_to_lowest_index():
    assert select_decentralized([0.4, 0.4, 0.4, 0.4], 2) == ((0, 1), 2)


def test_decentralized_orders_by_descending_gain():
    assert select_decentralized([0.2, 0.5, 0.3], 2) == ((1, 2), 0)


@pytest.mark.parametrize("n_s", [0, 4, 5])
def test_decentralized_rejects_bad_n_s(n_s):
    with pytest.raises(ValidationError) as exc:
        select_decentralized([0.9, 0.1, 0.5, 0.7], n_s)
    assert exc.value.field == "n_s"


def test_link_gains_examples():
    assert link_gains(ChannelRealization([0.9, 0.2], [0.3, 0.8])).tolist() == [0.3, 0.2]
    assert link_gains(ChannelRealization([0.4, 0.6], [0.4, 0.6])).tolist() == [0.4, 0.6]
    assert link_gains(ChannelRealization([0.0, 5.0], [3.0, 4.0])).tolist() == [0.0, 4.0]


def test_centralized_uses_link_gains():
    realization = ChannelRealization([0.9, 0.2, 0.6], [0.3, 0.8, 0.5])
    selection = select_centralized(realization, 1)
    assert selection.selected_hop1 == selection.selected_hop2 == (2,)
    assert selection.comp_hop1 == selection.comp_hop2 == 0
    assert selection.effective_gains_hop1.tolist() == [0.6]
    assert selection.effective_gains_hop2.tolist() == [0.5]


def test_centralized_is_symmetric_in_hops():
    realization = sample(11)
    a = select_centralized(realization, 3)
    b = select_centralized(realization.swapped(), 3)
    assert a.selected_hop1 == b.selected_hop1
    assert a.comp_hop1 == b.comp_hop1


def test_centralized_equals_decentralized_on_equal_hops():
    g = rng.stream(2, 0).exponential(1.0, 10)
    selection = select_centralized(ChannelRealization(g, g), 4)
    assert (selection.selected_hop1, selection.comp_hop1) == select_decentralized(g, 4)


def test_build_selection_decentralized_per_hop():
    realization = ChannelRealization([0.9, 0.1], [0.1, 0.9])
    selection = build_selection(realization, 1, Mode.DECENTRALIZED)
    assert selection.selected_hop1 == (0,)
    assert selection.selected_hop2 == (1,)
    assert selection.comp_hop1 == 1
    assert selection.comp_hop2 == 0


def test_build_selection_centralized_tie():
    realization = ChannelRealization([0.9, 0.1], [0.1, 0.9])
    selection = build_selection(realization, 1, Mode.CENTRALIZED)
    assert selection.selected_hop1 == selection.selected_hop2 == (0,)


@pytest.mark.parametrize("mode", list(Mode))
def test_build_selection_rejects_n_s_equal_n_t(mode):
    with pytest.raises(ValidationError) as exc:
        build_selection(ChannelRealization([0.9, 0.1], [0.1, 0.9]), 2, mode)
    assert exc.value.field == "n_s"


def sample(seed: int, n_t: int = 10) -> ChannelRealization:
    stream = rng.stream(seed, 0)
    return ChannelRealization(stream.exponential(1.0, n_t), stream.exponential(1.0, n_t))


@pytest.mark.parametrize("seed", range(20))
def test_selection_matches_exhaustive_search(seed):
    realization = sample(seed, n_t=9)
    for n_s in (1, 3, 5, 8):
        assert select_decentralized(realization.gains_hop1, n_s) == exhaustive_selection(realization.gains_hop1, n_s)
        centralized = select_centralized(realization, n_s)
        assert (centralized.selected_hop1, centralized.comp_hop1) == exhaustive_selection(link_gains(realization), n_s)


def test_selection_is_permutation_equivariant():
    realization = sample(4)
    perm = rng.stream(4, 1).permutation(realization.n_t)
    permuted = ChannelRealization(realization.gains_hop1[perm], realization.gains_hop2[perm])
    inverse = np.argsort(perm)
    for mode in Mode:
        a = build_selection(realization, 4, mode)
        b = build_selection(permuted, 4, mode)
        assert tuple(int(perm[i]) for i in b.selected_hop1) == a.selected_hop1
        assert tuple(int(perm[i]) for i in b.selected_hop2) == a.selected_hop2
        assert int(perm[b.comp_hop1]) == a.comp_hop1
        assert int(inverse[a.comp_hop2]) == b.comp_hop2
        assert np.array_equal(a.effective_gains_hop1, b.effective_gains_hop1)
        assert np.array_equal(a.effective_gains_hop2, b.effective_gains_hop2)


@pytest.mark.parametrize("scale", [1e-3, 0.5, 7.0, 1e4])
def test_selection_is_scale_invariant(scale):
    g = sample(8).gains_hop1
    assert select_decentralized(g * scale, 3) == select_decentralized(g, 3)


def test_effective_gains_follow_selected_indices():
    realization = sample(6)
    selection = build_selection(realization, 4, Mode.DECENTRALIZED)
    assert selection.effective_gains_hop1.tolist() == [realization.gains_hop1[i] for i in selection.selected_hop1]
    assert selection.effective_gains_hop2.tolist() == [realization.gains_hop2[i] for i in selection.selected_hop2]
    assert list(selection.effective_gains_hop1) == sorted(selection.effective_gains_hop1, reverse=True)


def test_pattern_examples():
    assert pattern_from_index(1, 3).active_positions == ()
    assert pattern_from_index(8, 3).active_positions == (0, 1, 2)
    assert pattern_from_index(2, 3).active_positions == (0,)
    assert pattern_from_index(2, 3).n_a == 1


@pytest.mark.parametrize("k", [0, 9])
def test_pattern_index_out_of_range(k):
    with pytest.raises(ValidationError):
        pattern_from_index(k, 3)


@pytest.mark.parametrize("n_s", [1, 2, 5, 8])
def test_patterns_are_a_bijection(n_s):
    patterns = list(enumerate_patterns(n_s))
    assert len(patterns) == pattern_count(n_s)
    assert len({p.active_positions for p in patterns}) == 2**n_s
    assert sum(p.n_a for p in patterns) == n_s * 2 ** (n_s - 1)
    assert all(p.n_a == bin(p.k - 1).count("1") for p in patterns)


def test_pattern_mask_matches_scalar_form():
    ks = np.arange(1, 17)
    mask = pattern_mask(4, ks)
    for row, k in zip(mask, ks, strict=True):
        assert tuple(np.flatnonzero(row)) == pattern_from_index(int(k), 4).active_positions


def test_pattern_mask_rejects_out_of_range():
    with pytest.raises(ValidationError):
        pattern_mask(3, [1, 9])


def test_bit_length_examples():
    assert pattern_bit_length(pattern_from_index(8, 4), 4, 2) == 10
    assert pattern_bit_length(pattern_from_index(1, 4), 4, 5) == 4
    assert pattern_bit_length(pattern_from_index(8, 3), 3, 1) == 6


def test_average_bit_length_matches_enumeration():
    n_s, b_m = 5, 3
    total = sum(pattern_bit_length(p, n_s, b_m) for p in enumerate_patterns(n_s))
    assert average_bit_length(n_s, b_m) == total / 2**n_s
