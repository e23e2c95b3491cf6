from rich.console import Console
from rich.markup import escape

console = Console(highlight=False, soft_wrap=True)
err_console = Console(stderr=True, highlight=False, soft_wrap=True)

SIGNIFICANT_DIGITS = 12


def fmt_num(value: float) -> str:
    """Locale-independent float text with 12 significant digits; byte-stable across runs."""
    text = f"{value:.{SIGNIFICANT_DIGITS}g}"
    return "0" if text == "-0" else text


def fmt_list(values) -> str:
    return ",".join(fmt_num(float(v)) for v in values)


def print_ok(msg: str) -> None:
    """Success confirmation: green ✓ message."""
    console.print(f"[green]✓[/green] {escape(msg)}")


def print_err(msg: str) -> None:
    """Error: red ✗ message to stderr."""
    err_console.print(f"[red]✗[/red] {escape(msg)}")
