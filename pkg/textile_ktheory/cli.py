"""Command-line interface for the textile K-theory toolkit."""

import sys
from contextlib import contextmanager
from math import gcd
from pathlib import Path
from typing import Iterator, List, Optional

import click
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table
from rich.text import Text

from . import __version__
from .core import Workbench
from .exceptions import NotCommuting, TextileError
from .models import ExtensionReport, FgAbelianGroup, Specification
from .render import render_ascii, render_svg
from .textile import TextileSystem, is_paved, patch_admissible

console = Console(width=100, highlight=False, soft_wrap=True)
err_console = Console(stderr=True, width=100, highlight=False, soft_wrap=True)

InputFile = click.Path(exists=True, dir_okay=False, path_type=Path)


def print_error(message: str) -> None:
    """Print an error message."""
    console.print(f"[red]error:[/red] {escape(message)}")


def print_success(message: str) -> None:
    """Print a success message."""
    console.print(f"[green]✓[/green] {escape(message)}")


def print_warning(message: str) -> None:
    """Print a warning message."""
    console.print(f"[yellow]warning:[/yellow] {escape(message)}")


def print_info(message: str) -> None:
    """Print an info message on stderr when --verbose is set."""
    ctx = click.get_current_context(silent=True)
    if ctx is not None and ctx.find_root().obj and ctx.find_root().obj.get("verbose"):
        err_console.print(f"[blue]ℹ[/blue] {escape(message)}")


def emit(line: str) -> None:
    """Print a result line verbatim."""
    console.print(line, markup=False)


def yes_no(flag: bool) -> str:
    return "yes" if flag else "no"


def parse_indices(ctx: click.Context, param: click.Parameter, value: str) -> List[int]:
    """Click callback for comma-separated tile indices."""
    try:
        indices = [int(part) for part in value.split(",")]
    except ValueError:
        raise click.BadParameter("expected comma-separated tile indices, e.g. 0,3,1")
    if any(index < 0 for index in indices):
        raise click.BadParameter("tile indices are nonnegative")
    return indices


@contextmanager
def spinner(description: str) -> Iterator[None]:
    """Transient spinner on stderr, drawn only when stderr is a terminal."""
    if not err_console.is_terminal:
        yield
        return
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        console=err_console,
        transient=True,
    ) as progress:
        progress.add_task(description, total=None)
        yield


def check_indices(system: TextileSystem, indices: List[int]) -> None:
    """Reject tile indices outside the tile listing as a usage error."""
    for index in indices:
        if index >= len(system.tiles):
            raise click.BadParameter(
                f"tile index {index} out of range 0..{len(system.tiles) - 1}",
                param_hint="--diagonal",
            )


def format_specification(index: int, kappa: Specification) -> List[str]:
    lines = [f"κ[{index}]"]
    for (alpha, b), (a, beta) in kappa.mapping:
        lines.append(f"  ({alpha},{b}) -> ({a},{beta})")
    return lines


@click.group()
@click.version_option(version=__version__, prog_name="textile-ktheory")
@click.option(
    "--config-dir", type=click.Path(path_type=Path), help="Custom configuration directory"
)
@click.option("--verbose", is_flag=True, help="Print progress information on stderr")
@click.pass_context
def cli(ctx: click.Context, config_dir: Optional[Path], verbose: bool) -> None:
    """Textile K-theory - C*-textile dynamical systems and their K-groups."""
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    try:
        workbench = Workbench(config_dir)
    except TextileError as e:
        print_error(str(e))
        sys.exit(1)
    ctx.obj["workbench"] = workbench
    console.width = workbench.config.console_width
    err_console.width = workbench.config.console_width
    print_info(f"configuration: {workbench.config_file}")


def _system(ctx: click.Context, a_file: Path, b_file: Path, which: int) -> TextileSystem:
    workbench: Workbench = ctx.obj["workbench"]
    print_info(f"building textile system from {a_file.name} and {b_file.name}")
    with spinner("Searching specifications..."):
        system = workbench.textile_system(a_file, b_file, which)
    print_info(f"{len(system.tiles)} tiles")
    return system


@cli.command("validate")
@click.argument("matrix_file", type=InputFile)
@click.pass_context
def validate_command(ctx: click.Context, matrix_file: Path) -> None:
    """Check that a symbolic matrix is essential and left-resolving."""
    workbench: Workbench = ctx.obj["workbench"]
    try:
        report = workbench.validate_file(matrix_file)
    except TextileError as e:
        print_error(str(e))
        sys.exit(1)

    emit(f"essential: {yes_no(report.essential)}")
    emit(f"left_resolving: {yes_no(report.left_resolving)}")
    for violation in report.offending_positions:
        row = violation.row if violation.row is not None else "-"
        col = violation.col if violation.col is not None else "-"
        emit(
            f"violation: {violation.kind} row={row} col={col} symbol={violation.symbol or '-'}"
        )


@cli.command("kappa")
@click.argument("a_file", type=InputFile)
@click.argument("b_file", type=InputFile)
@click.option("--all", "show_all", is_flag=True, help="Print every specification found")
@click.option("--limit", type=click.IntRange(min=1), help="Maximum number of specifications")
@click.pass_context
def kappa_command(
    ctx: click.Context, a_file: Path, b_file: Path, show_all: bool, limit: Optional[int]
) -> None:
    """Find specifications kappa with AB equivalent to BA."""
    workbench: Workbench = ctx.obj["workbench"]
    try:
        with spinner("Searching specifications..."):
            found = workbench.specifications(a_file, b_file, limit)
    except NotCommuting as e:
        emit("NOT COMMUTING")
        print_error(str(e))
        sys.exit(1)
    except TextileError as e:
        print_error(str(e))
        sys.exit(1)

    emit(f"{len(found)} specification(s) found")
    for index, kappa in enumerate(found if show_all else found[:1]):
        for line in format_specification(index, kappa):
            emit(line)


@cli.command("tiles")
@click.argument("a_file", type=InputFile)
@click.argument("b_file", type=InputFile)
@click.option("--which", default=0, type=click.IntRange(min=0), help="Specification index")
@click.pass_context
def tiles_command(ctx: click.Context, a_file: Path, b_file: Path, which: int) -> None:
    """List the tiles of a textile system with their edge labels."""
    try:
        system = _system(ctx, a_file, b_file, which)
    except TextileError as e:
        print_error(str(e))
        sys.exit(1)

    table = Table(title=f"Tiles ({len(system.tiles)})")
    table.add_column("Index", justify="right", no_wrap=True)
    table.add_column("Top", style="cyan", no_wrap=True)
    table.add_column("Right", style="magenta", no_wrap=True)
    table.add_column("Left", style="magenta", no_wrap=True)
    table.add_column("Bottom", style="cyan", no_wrap=True)
    for index, tile in enumerate(system.tiles):
        table.add_row(str(index), tile.top, tile.right, tile.left, tile.bottom)
    console.print(table)


@cli.command("propagate")
@click.argument("a_file", type=InputFile)
@click.argument("b_file", type=InputFile)
@click.option(
    "--diagonal", required=True, callback=parse_indices, help="Tile indices, e.g. 0,3,1"
)
@click.option("--radius", required=True, type=click.IntRange(min=0), help="Fill-in radius")
@click.option("--which", default=0, type=click.IntRange(min=0), help="Specification index")
@click.option("--svg", "svg_file", type=click.Path(dir_okay=False, path_type=Path))
@click.pass_context
def propagate_command(
    ctx: click.Context,
    a_file: Path,
    b_file: Path,
    diagonal: List[int],
    radius: int,
    which: int,
    svg_file: Optional[Path],
) -> None:
    """Fill in the patch determined by an anti-diagonal of tiles."""
    workbench: Workbench = ctx.obj["workbench"]
    try:
        system = _system(ctx, a_file, b_file, which)
    except TextileError as e:
        print_error(str(e))
        sys.exit(1)
    check_indices(system, diagonal)
    try:
        patch = workbench.propagate(system, diagonal, radius)
    except TextileError as e:
        print_error(str(e))
        sys.exit(1)

    for line in render_ascii(patch).splitlines():
        emit(line)
    emit(f"paved: {yes_no(is_paved(patch))}")
    emit(f"admissible: {yes_no(patch_admissible(system, patch))}")
    if svg_file:
        svg_file.write_text(render_svg(patch, workbench.config.svg_cell_size), encoding="utf-8")
        print_info(f"wrote {svg_file}")


@cli.command("render")
@click.argument("a_file", type=InputFile)
@click.argument("b_file", type=InputFile)
@click.option(
    "--diagonal", required=True, callback=parse_indices, help="Tile indices, e.g. 0,3,1"
)
@click.option("--radius", type=click.IntRange(min=0), help="Fill-in radius (default: full)")
@click.option("--which", default=0, type=click.IntRange(min=0), help="Specification index")
@click.option(
    "--format", "output_format", type=click.Choice(["ascii", "svg"]), default="ascii"
)
@click.option("--output", type=click.Path(dir_okay=False, path_type=Path))
@click.pass_context
def render_command(
    ctx: click.Context,
    a_file: Path,
    b_file: Path,
    diagonal: List[int],
    radius: Optional[int],
    which: int,
    output_format: str,
    output: Optional[Path],
) -> None:
    """Render the patch determined by an anti-diagonal as ASCII or SVG."""
    workbench: Workbench = ctx.obj["workbench"]
    try:
        system = _system(ctx, a_file, b_file, which)
    except TextileError as e:
        print_error(str(e))
        sys.exit(1)
    check_indices(system, diagonal)
    try:
        patch = workbench.propagate(
            system, diagonal, len(diagonal) - 1 if radius is None else radius
        )
    except TextileError as e:
        print_error(str(e))
        sys.exit(1)

    if output_format == "svg":
        rendered = render_svg(patch, workbench.config.svg_cell_size)
    else:
        rendered = render_ascii(patch)
    if output:
        output.write_text(rendered, encoding="utf-8")
        print_info(f"wrote {output}")
    else:
        click.echo(rendered, nl=False)


def k1_line(k1: ExtensionReport) -> str:
    if k1.total is None:
        return "K1 = extension (split unknown)"
    return f"K1 = {k1.total}"


@cli.command("ktheory")
@click.argument("a_file", type=InputFile)
@click.argument("b_file", type=InputFile)
@click.pass_context
def ktheory_command(ctx: click.Context, a_file: Path, b_file: Path) -> None:
    """K-groups of the textile algebra of a commuting pair of integer matrices."""
    workbench: Workbench = ctx.obj["workbench"]
    try:
        k0, k1 = workbench.k_groups(a_file, b_file)
    except TextileError as e:
        print_error(str(e))
        sys.exit(1)

    emit(f"K0 = {k0}")
    emit(f"K1 sub = {k1.sub}")
    emit(f"K1 quot = {k1.quot}")
    emit(k1_line(k1))


@cli.command("onm")
@click.argument("n", type=click.IntRange(min=2))
@click.argument("m", type=click.IntRange(min=2))
@click.pass_context
def onm_command(ctx: click.Context, n: int, m: int) -> None:
    """K-groups of O_{N,M} compared with Z/gcd(N-1, M-1)."""
    workbench: Workbench = ctx.obj["workbench"]
    try:
        groups = workbench.onm(n, m)
    except TextileError as e:
        print_error(str(e))
        sys.exit(1)

    d = gcd(n - 1, m - 1)
    expected = FgAbelianGroup.from_orders(0, [d])
    emit(f"K0 = {groups.k0}")
    emit(k1_line(groups.k1))
    matches = groups.k0 == expected and groups.k1.total == expected
    emit(f"expected Z/d, d = gcd({n - 1},{m - 1}) = {d}: {'OK' if matches else 'MISMATCH'}")


@cli.command("analyze")
@click.argument("a_file", type=InputFile)
@click.argument("b_file", type=InputFile)
@click.option("--which", default=0, type=click.IntRange(min=0), help="Specification index")
@click.pass_context
def analyze_command(ctx: click.Context, a_file: Path, b_file: Path, which: int) -> None:
    """Report nonemptiness, irreducibility and the forms-square condition."""
    workbench: Workbench = ctx.obj["workbench"]
    try:
        report = workbench.analyze(_system(ctx, a_file, b_file, which))
    except TextileError as e:
        print_error(str(e))
        sys.exit(1)

    emit(f"nonempty: {yes_no(report.nonempty)}")
    emit(f"irreducible: {yes_no(report.irreducible)}")
    emit(f"forms_square: {yes_no(report.forms_square)}")


@cli.command("words")
@click.argument("matrix_file", type=InputFile)
@click.option("--length", required=True, type=click.IntRange(min=0), help="Word length")
@click.option("--list", "list_words", is_flag=True, help="Print the words themselves")
@click.pass_context
def words_command(ctx: click.Context, matrix_file: Path, length: int, list_words: bool) -> None:
    """Count (and optionally list) the admissible words of a given length."""
    workbench: Workbench = ctx.obj["workbench"]
    try:
        count, words = workbench.words(matrix_file, length)
    except TextileError as e:
        print_error(str(e))
        sys.exit(1)

    emit(f"words of length {length}: {count}")
    if list_words:
        if words is None:
            print_warning(
                f"length {length} is above count_only_threshold "
                f"({workbench.config.count_only_threshold}); words not listed"
            )
            return
        for word in words:
            emit(" ".join(word))


@cli.group()
def config() -> None:
    """Show or change the workbench configuration."""
    pass


@config.command("show")
@click.pass_context
def show_config(ctx: click.Context) -> None:
    """Show the active configuration."""
    workbench: Workbench = ctx.obj["workbench"]
    info_text = Text()
    for key, value in workbench.config.model_dump().items():
        info_text.append(f"{key}: {value}\n")
    console.print(Panel(info_text, title=str(workbench.config_file), border_style="blue"))


@config.command("set")
@click.argument("key")
@click.argument("value")
@click.pass_context
def set_config(ctx: click.Context, key: str, value: str) -> None:
    """Set a configuration value."""
    workbench: Workbench = ctx.obj["workbench"]
    if key == "version" or key not in type(workbench.config).model_fields:
        raise click.BadParameter(f"unknown configuration key {key!r}", param_hint="KEY")
    try:
        workbench.update_config(**{key: value})
    except TextileError as e:
        print_error(str(e))
        sys.exit(1)
    print_success(f"{key} = {getattr(workbench.config, key)}")


def main() -> None:
    """Main entry point."""
    try:
        cli()
    except KeyboardInterrupt:
        print_info("Operation cancelled by user")
        sys.exit(1)
    except Exception as e:
        print_error(f"unexpected error: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
