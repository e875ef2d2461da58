"""In-memory row storage and the table catalog.

Values are plain Python objects: ``int`` (Int64), ``str`` (Text), or
``None`` (Null). Predicates evaluate to false on Null and joins never
match Null keys; three-valued logic is deliberately not modeled.
"""
from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from .errors import DuplicateKey, DuplicateTable, MissingTable, ParseError

Value = Optional[int | str]
Row = tuple


class ColumnType(str, Enum):
    INT64 = "int64"
    TEXT = "text"


@dataclass(frozen=True)
class ColumnMeta:
    name: str
    type: ColumnType
    is_primary_key: bool = False


@dataclass
class Table:
    name: str
    columns: list[ColumnMeta]
    rows: list[Row] = field(default_factory=list)
    is_temp: bool = False

    def column_index(self, column: str) -> int:
        for i, col in enumerate(self.columns):
            if col.name == column:
                return i
        raise KeyError(f"{self.name} has no column {column!r}")

    def column_meta(self, column: str) -> ColumnMeta:
        return self.columns[self.column_index(column)]

    @property
    def row_count(self) -> int:
        return len(self.rows)

    @property
    def primary_key(self) -> ColumnMeta | None:
        for col in self.columns:
            if col.is_primary_key:
                return col
        return None

    _fingerprint: str | None = field(default=None, repr=False, compare=False)

    def fingerprint(self) -> str:
        """Content hash used to key the persistent cardinality-oracle memo."""
        if self._fingerprint is None:
            h = hashlib.blake2b(digest_size=16)
            h.update(self.name.encode())
            for col in self.columns:
                h.update(f"{col.name}:{col.type.value}:{col.is_primary_key}".encode())
            for row in self.rows:
                h.update(repr(row).encode())
            self._fingerprint = h.hexdigest()
        return self._fingerprint


def _parse_value(text: str, ctype: ColumnType, where: str) -> Value:
    if text == "":
        return None
    if ctype is ColumnType.INT64:
        try:
            return int(text)
        except ValueError:
            raise ParseError(f"{where}: {text!r} is not a valid Int64") from None
    return text


def _check_primary_key(table: Table) -> dict[Value, int]:
    """Build the PK hash index, enforcing uniqueness of non-null keys."""
    pk = table.primary_key
    assert pk is not None
    idx = table.column_index(pk.name)
    index: dict[Value, int] = {}
    for pos, row in enumerate(table.rows):
        key = row[idx]
        if key is None:
            continue
        if key in index:
            raise DuplicateKey(f"{table.name}.{pk.name}: duplicate key {key!r}")
        index[key] = pos
    return index


class Catalog:
    """Name -> table mapping plus primary-key hash indexes.

    Immutable during query execution except for temp-table creation; the
    re-optimization driver is the single writer.
    """

    def __init__(self):
        self.tables: dict[str, Table] = {}
        self.indexes: dict[str, dict[Value, int]] = {}

    def get(self, name: str) -> Table:
        try:
            return self.tables[name]
        except KeyError:
            raise MissingTable(f"no table named {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self.tables

    def register(self, table: Table) -> Table:
        if table.name in self.tables:
            raise DuplicateTable(f"table {table.name!r} already exists")
        self.tables[table.name] = table
        if not table.is_temp and table.primary_key is not None:
            self.indexes[table.name] = _check_primary_key(table)
        return table

    def load_csv(self, path: str, table_name: str, schema: list[ColumnMeta]) -> Table:
        """Load a UTF-8 comma-separated file; "" parses as Null."""
        if table_name in self.tables:
            raise DuplicateTable(f"table {table_name!r} already exists")
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ParseError(f"{path}: empty file, expected a header row") from None
            expected = [c.name for c in schema]
            if header != expected:
                raise ParseError(f"{path}: header {header} does not match schema {expected}")
            rows: list[Row] = []
            for lineno, record in enumerate(reader, start=2):
                if len(record) != len(schema):
                    raise ParseError(f"{path}:{lineno}: expected {len(schema)} fields, got {len(record)}")
                rows.append(
                    tuple(
                        _parse_value(text, col.type, f"{path}:{lineno} column {col.name}")
                        for text, col in zip(record, schema)
                    )
                )
        return self.register(Table(name=table_name, columns=list(schema), rows=rows))

    def create_temp_table(self, name: str, schema: list[ColumnMeta], rows: Iterable[Row]) -> Table:
        if name in self.tables:
            raise DuplicateTable(f"table {name!r} already exists")
        table = Table(name=name, columns=list(schema), rows=list(rows), is_temp=True)
        self.tables[name] = table
        return table

    def drop_temp_tables(self) -> int:
        temps = [name for name, t in self.tables.items() if t.is_temp]
        for name in temps:
            del self.tables[name]
            self.indexes.pop(name, None)
        return len(temps)

    def pk_lookup(self, table_name: str, key: Value) -> Row | None:
        """Index lookup by primary key; None for absent or null keys."""
        if key is None:
            return None
        index = self.indexes.get(table_name)
        if index is None:
            return None
        pos = index.get(key)
        if pos is None:
            return None
        return self.tables[table_name].rows[pos]


def write_csv(path: str, table: Table) -> None:
    """Inverse of load_csv, used by the data generators."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([c.name for c in table.columns])
        for row in table.rows:
            writer.writerow(["" if v is None else v for v in row])
