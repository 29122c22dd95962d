"""CLI wrapper around render(). Exit codes: 0 ok, 2 schema/validation error."""

from __future__ import annotations

import sys

import click

from .figures import KINDS, FigureSpec, render
from .schemas import SchemaError


@click.group()
def main():
    """Figure rendering for pauliprop CSV result files."""


@main.command("render")
@click.option("--kind", required=True, type=click.Choice(KINDS))
@click.option("--in", "inputs", multiple=True, required=True, type=click.Path(),
              help="input CSV (repeatable for the curves kind)")
@click.option("--out", "output", required=True, type=click.Path())
@click.option("--title", default=None)
@click.option("--xlabel", default=None)
@click.option("--ylabel", default=None)
@click.option("--log-y/--no-log-y", "log_y", default=None,
              help="override the per-kind y-scale default")
@click.option("--label", "labels", multiple=True, help="curve label per input")
def render_cmd(kind, inputs, output, title, xlabel, ylabel, log_y, labels):
    """Validate the CSV(s) and write one figure image."""
    try:
        spec = FigureSpec(
            inputs=tuple(inputs), output=output, kind=kind, title=title,
            xlabel=xlabel, ylabel=ylabel, log_y=log_y, labels=tuple(labels),
        )
        path = render(spec)
    except SchemaError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    click.echo(str(path))


if __name__ == "__main__":
    main()
