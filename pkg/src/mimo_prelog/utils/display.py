"""Console helpers built on Rich for human-facing CLI diagnostics.

Reports never go through these helpers: they are written verbatim to standard
output or a file. Everything here prints to standard error.
"""

from typing import Any, Dict, Optional

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

console = Console(stderr=True)


def get_rich_handler() -> RichHandler:
    """Create a Rich logging handler bound to the stderr console."""
    return RichHandler(
        console=console,
        show_time=True,
        show_path=False,
        markup=False,
        rich_tracebacks=False,
    )


def print_error(message: str) -> None:
    """Print a single-line error diagnostic."""
    console.print(f"[bold red]error:[/bold red] {message}", soft_wrap=True)


def print_summary(title: str, values: Dict[str, Any], style: Optional[str] = None) -> None:
    """Print a two-column key/value table summarising a report."""
    table = Table(title=title, show_header=True, header_style=style or "bold magenta")
    table.add_column("Quantity", style="dim")
    table.add_column("Value")
    for key, value in values.items():
        table.add_row(str(key), str(value))
    console.print(table)
