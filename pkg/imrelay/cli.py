import logging
import sys
from pathlib import Path

import fncli
from rich.logging import RichHandler

from imrelay_sim.core.errors import CheckFailed, OutputError, SimError, ValidationError
from imrelay_sim.core.lib.format import err_console, print_err

from . import __version__

EXIT_OK = 0
EXIT_CHECK = 1
EXIT_VALIDATION = 2
EXIT_IO = 3

PROG = "imrelay"

# fncli keeps `selftest` for its own registry check
ALIASES = {"selftest": "self-test"}

_VERBOSITY = {"-v": 1, "--verbose": 1, "-vv": 2}

_discovered = False


def discover() -> None:
    global _discovered
    if not _discovered:
        fncli.autodiscover(Path(__file__).parent, PROG)
        _discovered = True


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    root = logging.getLogger()
    for handler in list(root.handlers):
        if isinstance(handler, RichHandler):
            root.removeHandler(handler)
    root.addHandler(RichHandler(console=err_console, show_path=False, rich_tracebacks=False))
    root.setLevel(level)


def _field_message(e: ValidationError) -> str:
    msg = str(e)
    if e.field and e.field not in msg:
        return f"{e.field}: {msg}"
    return msg


def run(argv: list[str] | None = None) -> int:
    """Dispatch `imrelay [-v|-vv] <command> ...` and map domain errors to exit codes."""
    args = list(sys.argv[1:] if argv is None else argv)
    verbosity = 0
    while args and args[0] in _VERBOSITY:
        verbosity += _VERBOSITY[args.pop(0)]
    if args == ["--version"]:
        sys.stdout.write(f"{PROG} {__version__}\n")
        return EXIT_OK
    if not args:
        args = ["--help"]
    elif args[0] in ALIASES:
        args = [ALIASES[args[0]], *args[1:]]

    discover()
    configure_logging(verbosity)
    try:
        return fncli.dispatch([PROG, *args])
    except CheckFailed as e:
        print_err(str(e))
        return EXIT_CHECK
    except ValidationError as e:
        print_err(_field_message(e))
        return EXIT_VALIDATION
    except OutputError as e:
        print_err(str(e))
        return EXIT_IO
    except OSError as e:
        print_err(f"I/O error: {e}")
        return EXIT_IO
    except SimError as e:
        print_err(str(e))
        return EXIT_CHECK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
