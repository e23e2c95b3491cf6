"""Contracts: interface agreements between separate definitions that can silently drift."""

import dataclasses
import inspect

import pytest

from imrelay.allocate import allocate
from imrelay.kkt import kkt_check
from imrelay.output import GAP_HEADER, SWEEP_HEADER
from imrelay.selftest import self_test
from imrelay.sweep import FIELD_FLAGS, sweep
from imrelay_sim.core.config import PRESETS
from imrelay_sim.core.models import SWEEP_FIELDS, GapRow, SweepConfig, SweepRow


def test_csv_headers_match_row_types():
    assert SWEEP_HEADER == tuple(f.name for f in dataclasses.fields(SweepRow))
    assert GAP_HEADER == tuple(f.name for f in dataclasses.fields(GapRow))


def test_every_sweep_field_has_a_flag():
    assert set(FIELD_FLAGS.values()) == set(SWEEP_FIELDS)


def test_to_mapping_covers_every_field():
    assert tuple(SweepConfig().to_mapping()) == SWEEP_FIELDS


def test_presets_only_use_sweep_fields():
    for name, preset in PRESETS.items():
        assert set(preset) <= set(SWEEP_FIELDS), name



def parameters(command) -> dict[str, inspect.Parameter]:
    return dict(inspect.signature(getattr(command, "__wrapped__", command)).parameters)


def test_every_sweep_flag_is_a_sweep_option():
    assert set(FIELD_FLAGS) <= set(parameters(sweep))


@pytest.mark.parametrize("command", [sweep, allocate, kkt_check, self_test])
def test_options_default_to_none(command):
    """An option left at None is what lets IMRELAY_<OPTION> fill it in."""
    for name, param in parameters(command).items():
        assert param.default is None, name
        assert param.annotation == str | None, name
