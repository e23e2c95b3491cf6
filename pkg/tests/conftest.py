import io
import os
from contextlib import redirect_stderr, redirect_stdout

import fncli
import numpy as np
import pytest

from imrelay.cli import run
from imrelay_sim.core.config import reset_user_config
from imrelay_sim.core.lib import env


def invoke(argv: list[str]) -> fncli.Result:
    """Invoke an imrelay command in-process, returning the captured Result.

    Goes through cli.run so the exit-code mapping around fncli.dispatch is exercised too.
    """
    out_buf = io.StringIO()
    err_buf = io.StringIO()
    code = 0
    try:
        with redirect_stdout(out_buf), redirect_stderr(err_buf):
            code = run(argv)
    except SystemExit as e:
        code = int(e.code) if isinstance(e.code, int) else 1
    return fncli.Result(code, out_buf.getvalue(), err_buf.getvalue())


@pytest.fixture(autouse=True)
def tmp_imrelay_dir(monkeypatch, tmp_path):
    """Point the user config at an empty temp dir and drop every IMRELAY_* override."""
    home = tmp_path / "imrelay-home"
    home.mkdir()
    for var in list(os.environ):
        if var.startswith(env.PREFIX):
            monkeypatch.delenv(var, raising=False)
    monkeypatch.setenv("IMRELAY_DIR", str(home))
    reset_user_config()
    yield home
    reset_user_config()


@pytest.fixture
def stream():
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(12345)))
