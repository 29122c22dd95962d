"""Documented CSV schemas of the pauliprop CLI, with strict validation.

Each figure kind consumes exactly one schema. Validation checks the header
columns (optional ones may be absent but no required one may be missing) and
coerces the typed fields row by row; a blank cell in a nullable column reads
as None.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path


class SchemaError(ValueError):
    """The CSV does not match the documented schema."""


@dataclass(frozen=True)
class Column:
    name: str
    kind: str  # "int" | "float" | "str"
    nullable: bool = False


@dataclass(frozen=True)
class Schema:
    name: str
    columns: tuple[Column, ...]

    @property
    def required(self) -> set[str]:
        return {c.name for c in self.columns}


SCHEMAS = {
    "histogram": Schema(
        "histogram",
        (
            Column("kind", "str"),
            Column("bin", "int"),
            Column("count", "int"),
            Column("surviving", "int"),
        ),
    ),
    "sweep": Schema(
        "sweep",
        (
            Column("w_cut", "str"),  # integer or the literal "full"
            Column("nu_cut", "str"),
            Column("mae", "float"),
            Column("stderr", "float"),
            Column("bound", "float", nullable=True),
        ),
    ),
    "phase": Schema(
        "phase",
        (
            Column("kappa", "float"),
            Column("h", "float"),
            Column("e_vqe_surrogate", "float"),
            Column("e_vqe_true", "float", nullable=True),
            Column("e_exact", "float", nullable=True),
            Column("rel_error", "float", nullable=True),
            Column("seed", "int"),
        ),
    ),
    "trace": Schema(
        "trace",
        (
            Column("step", "int"),
            Column("energy", "float"),
            Column("grad_norm", "float"),
        ),
    ),
}


def _coerce(col: Column, raw: str, path, lineno: int):
    if raw == "":
        if col.nullable:
            return None
        raise SchemaError(f"{path}:{lineno}: empty value in column {col.name!r}")
    try:
        if col.kind == "int":
            return int(raw)
        if col.kind == "float":
            return float(raw)
    except ValueError:
        raise SchemaError(
            f"{path}:{lineno}: column {col.name!r} expects {col.kind}, got {raw!r}"
        ) from None
    return raw


def read_csv(path, schema: Schema) -> list[dict]:
    """Read and validate one CSV against a schema; returns typed row dicts."""
    path = Path(path)
    if not path.is_file():
        raise SchemaError(f"no such CSV file: {path}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = schema.required - set(header)
        if missing:
            raise SchemaError(
                f"{path}: missing column(s) {sorted(missing)} for schema "
                f"{schema.name!r} (found {header})"
            )
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            rows.append(
                {c.name: _coerce(c, (raw[c.name] or "").strip(), path, lineno)
                 for c in schema.columns}
            )
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows
