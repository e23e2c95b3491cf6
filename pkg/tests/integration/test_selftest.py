import pytest

from imrelay import selftest
from tests.conftest import invoke


@pytest.mark.timeout(120)
def test_selftest_passes():
    result = invoke(["selftest", "--problems", "50"])

    assert result.exit_code == 0, result.stdout + result.stderr
    assert "✗" not in result.stdout
    assert "all 6 checks passed" in result.stdout


def test_failing_check_exits_1(monkeypatch):
    monkeypatch.setattr(selftest, "check_hand_average", lambda: "off by one")
    result = invoke(["selftest", "--problems", "5"])

    assert result.exit_code == 1
    assert "off by one" in result.stdout
    assert "1 of 6 checks failed" in result.stderr


def test_hand_average_check_passes_directly():
    assert selftest.check_hand_average() is None


@pytest.mark.parametrize("argv", [["selftest", "--problems", "0"], ["selftest", "--seed", "x"]])
def test_bad_options_exit_2(argv):
    assert invoke(argv).exit_code == 2


def test_env_supplies_problem_count(monkeypatch):
    monkeypatch.setenv("IMRELAY_PROBLEMS", "0")

    result = invoke(["selftest"])

    assert result.exit_code == 2
    assert "problems" in result.stderr
