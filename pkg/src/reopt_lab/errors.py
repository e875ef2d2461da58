"""Exception types shared across the engine."""


class EngineError(Exception):
    """Base class for all engine errors."""


class ParseError(EngineError):
    """A CSV value could not be parsed as its declared type."""


class DuplicateKey(EngineError):
    """A primary-key column contains a repeated non-null value."""


class DuplicateTable(EngineError):
    """A table name is already registered in the catalog."""


class MissingTable(EngineError):
    """A referenced table does not exist in the catalog."""


class SqlSyntaxError(EngineError):
    """Malformed query text; carries a 1-based line/column position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownTable(EngineError):
    """Query references a table not present in the catalog."""


class UnknownColumn(EngineError):
    """Query references a column not declared by its table."""


class TypeMismatch(EngineError):
    """Constant or comparison type does not match the column type."""


class DisconnectedJoinGraph(EngineError):
    """Query would require a Cartesian product to answer."""


class MissingExportColumn(EngineError):
    """Temp-table substitution lacks a mapping for a referenced column."""


class MissingStats(EngineError):
    """No statistics available for a table referenced by an estimate."""


class InvalidSpec(EngineError):
    """Generator specification with out-of-range parameters."""
