import logging

from rich import print
from rich.logging import RichHandler


def info(msg: str) -> None:
    print(f"[cyan]➤ {msg}")


def success(msg: str) -> None:
    print(f"[green]✔ {msg}")


def warn(msg: str) -> None:
    print(f"[yellow]⚠ {msg}")


def error(msg: str) -> None:
    print(f"[red]✖ {msg}")


def configure_logging(verbose: bool = False) -> None:
    """Route stdlib logging through rich; debug detail only when verbose."""
    root = logging.getLogger()
    for handler in list(root.handlers):
        if isinstance(handler, RichHandler):
            root.removeHandler(handler)
    root.addHandler(RichHandler(show_path=False, markup=False, rich_tracebacks=verbose))
    root.setLevel(logging.DEBUG if verbose else logging.WARNING)
