"""SQL subset frontend: SPJ with equi-joins, IN/LIKE/range filters, MIN
aggregates, and CREATE TEMP TABLE ... AS SELECT.

The WHERE clause is conjunctive only; parenthesized groups flatten into
the conjunct list. All functions here are pure.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from .errors import (
    DisconnectedJoinGraph,
    MissingExportColumn,
    SqlSyntaxError,
    TypeMismatch,
    UnknownColumn,
    UnknownTable,
)
from .storage import Catalog, ColumnType, Value


@dataclass(frozen=True)
class ColRef:
    alias: str
    column: str

    def __str__(self) -> str:
        return f"{self.alias}.{self.column}"


@dataclass(frozen=True)
class Eq:
    col: ColRef
    value: Value


@dataclass(frozen=True)
class Lt:
    col: ColRef
    value: Value


@dataclass(frozen=True)
class Gt:
    col: ColRef
    value: Value


@dataclass(frozen=True)
class In:
    col: ColRef
    values: tuple[Value, ...]


@dataclass(frozen=True)
class Like:
    col: ColRef
    pattern: str  # '%' wildcards only, literal remainder


@dataclass(frozen=True)
class JoinEq:
    left: ColRef
    right: ColRef

    def aliases(self) -> frozenset[str]:
        return frozenset((self.left.alias, self.right.alias))

    def normalized(self) -> "JoinEq":
        """Orientation-independent form used by the join graph."""
        a, b = (self.left, self.right)
        if (a.alias, a.column) > (b.alias, b.column):
            a, b = b, a
        return JoinEq(a, b)


Filter = Eq | Lt | Gt | In | Like


@dataclass(frozen=True)
class ProjItem:
    col: ColRef
    agg: str | None = None  # None or "min"


@dataclass(frozen=True)
class QuerySpec:
    relations: tuple[tuple[str, str], ...]  # (table, alias) in declaration order
    filters: tuple[Filter, ...]
    join_edges: tuple[JoinEq, ...]
    projections: tuple[ProjItem, ...]

    @property
    def aliases(self) -> tuple[str, ...]:
        return tuple(a for _, a in self.relations)

    def table_of(self, alias: str) -> str:
        for table, a in self.relations:
            if a == alias:
                return table
        raise KeyError(alias)


@dataclass(frozen=True)
class CreateTempSpec:
    name: str
    select: QuerySpec


class JoinGraph:
    """Undirected graph over query aliases; one edge per alias pair that
    shares at least one equi-join conjunct. Derivation is order-independent:
    per-edge conjunct lists are normalized and sorted."""

    def __init__(self, nodes: tuple[str, ...], edges: dict[frozenset[str], tuple[JoinEq, ...]]):
        self.nodes = tuple(sorted(nodes))
        self.edges = edges
        self._adjacent: dict[str, set[str]] = {n: set() for n in self.nodes}
        for pair in edges:
            a, b = sorted(pair)
            self._adjacent[a].add(b)
            self._adjacent[b].add(a)

    def __eq__(self, other) -> bool:
        return isinstance(other, JoinGraph) and self.nodes == other.nodes and self.edges == other.edges

    def neighbors(self, alias: str) -> set[str]:
        return self._adjacent[alias]

    def is_connected(self, subset: frozenset[str] | None = None) -> bool:
        nodes = set(self.nodes) if subset is None else set(subset)
        if not nodes:
            return False
        seen = set()
        stack = [min(nodes)]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            stack.extend(self._adjacent[n] & nodes - seen)
        return seen == nodes

    def edges_between(self, left: frozenset[str], right: frozenset[str]) -> tuple[JoinEq, ...]:
        out = []
        for pair, eqs in sorted(self.edges.items(), key=lambda kv: sorted(kv[0])):
            a, b = sorted(pair)
            if (a in left and b in right) or (a in right and b in left):
                out.extend(eqs)
        return tuple(out)

    def internal_edges(self, subset: frozenset[str]) -> tuple[JoinEq, ...]:
        out = []
        for pair, eqs in sorted(self.edges.items(), key=lambda kv: sorted(kv[0])):
            if pair <= subset:
                out.extend(eqs)
        return tuple(out)


def join_graph(spec: QuerySpec) -> JoinGraph:
    edges: dict[frozenset[str], list[JoinEq]] = {}
    for edge in spec.join_edges:
        edges.setdefault(edge.aliases(), []).append(edge.normalized())
    canonical = {
        pair: tuple(sorted(eqs, key=lambda e: (e.left.alias, e.left.column, e.right.alias, e.right.column)))
        for pair, eqs in edges.items()
    }
    return JoinGraph(tuple(a for _, a in spec.relations), canonical)


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<string>'(?:[^']|'')*')
  | (?P<number>-?\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[(),.*;=<>])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"select", "from", "where", "and", "in", "like", "as", "min", "create", "temp", "table"}


@dataclass(frozen=True)
class _Token:
    kind: str  # keyword | ident | string | number | punct | eof
    text: str
    line: int
    column: int


def _tokenize(sql: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(sql):
        m = _TOKEN_RE.match(sql, pos)
        if m is None:
            raise SqlSyntaxError(f"unexpected character {sql[pos]!r}", line, col)
        text = m.group(0)
        if m.lastgroup != "ws":
            kind = m.lastgroup
            if kind == "ident" and text.lower() in _KEYWORDS:
                kind = "keyword"
            tokens.append(_Token(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def cur(self) -> _Token:
        return self.tokens[self.pos]

    def error(self, message: str) -> SqlSyntaxError:
        return SqlSyntaxError(message, self.cur.line, self.cur.column)

    def advance(self) -> _Token:
        tok = self.cur
        self.pos += 1
        return tok

    def accept(self, kind: str, text: str | None = None) -> _Token | None:
        tok = self.cur
        if tok.kind != kind:
            return None
        if text is not None and tok.text.lower() != text:
            return None
        return self.advance()

    def expect(self, kind: str, text: str | None = None) -> _Token:
        tok = self.accept(kind, text)
        if tok is None:
            want = text.upper() if text else kind
            raise self.error(f"expected {want}, found {self.cur.text!r}")
        return tok

    def keyword(self, word: str) -> bool:
        return self.accept("keyword", word) is not None

    # statement := [CREATE TEMP TABLE ident AS] select
    def statement(self) -> QuerySpec | CreateTempSpec:
        temp_name = None
        if self.keyword("create"):
            self.expect("keyword", "temp")
            self.expect("keyword", "table")
            temp_name = self.expect("ident").text
            self.expect("keyword", "as")
        spec = self.select()
        self.accept("punct", ";")
        self.expect("eof")
        if temp_name is not None:
            return CreateTempSpec(temp_name, spec)
        return spec

    def select(self) -> QuerySpec:
        self.expect("keyword", "select")
        projections = self.projection_list()
        self.expect("keyword", "from")
        relations = self.relation_list()
        filters: list[Filter] = []
        edges: list[JoinEq] = []
        if self.keyword("where"):
            self.conjunction(filters, edges)
        return QuerySpec(tuple(relations), tuple(filters), tuple(edges), tuple(projections))

    def projection_list(self) -> list[ProjItem | None]:
        if self.accept("punct", "*"):
            return [None]  # placeholder; expanded during validation
        items = [self.projection()]
        while self.accept("punct", ","):
            items.append(self.projection())
        return items

    def projection(self) -> ProjItem:
        if self.keyword("min"):
            self.expect("punct", "(")
            col = self.colref()
            self.expect("punct", ")")
            if self.keyword("as"):
                self.expect("ident")  # output label, not used by the engine
            return ProjItem(col, agg="min")
        col = self.colref()
        if self.keyword("as"):
            self.expect("ident")
        return ProjItem(col)

    def relation_list(self) -> list[tuple[str, str]]:
        rels = [self.relation()]
        while self.accept("punct", ","):
            rels.append(self.relation())
        return rels

    def relation(self) -> tuple[str, str]:
        table = self.expect("ident").text
        if self.keyword("as"):
            alias = self.expect("ident").text
        else:
            alias_tok = self.accept("ident")
            alias = alias_tok.text if alias_tok else table
        return (table, alias)

    def conjunction(self, filters: list[Filter], edges: list[JoinEq]) -> None:
        self.term(filters, edges)
        while self.keyword("and"):
            self.term(filters, edges)

    def term(self, filters: list[Filter], edges: list[JoinEq]) -> None:
        if self.accept("punct", "("):
            self.conjunction(filters, edges)
            self.expect("punct", ")")
            return
        self.predicate(filters, edges)

    def predicate(self, filters: list[Filter], edges: list[JoinEq]) -> None:
        col = self.colref()
        if self.keyword("in"):
            self.expect("punct", "(")
            values = [self.constant()]
            while self.accept("punct", ","):
                values.append(self.constant())
            self.expect("punct", ")")
            filters.append(In(col, tuple(values)))
            return
        if self.keyword("like"):
            tok = self.expect("string")
            filters.append(Like(col, _unquote(tok.text)))
            return
        if self.accept("punct", "<"):
            filters.append(Lt(col, self.constant()))
            return
        if self.accept("punct", ">"):
            filters.append(Gt(col, self.constant()))
            return
        eq_tok = self.expect("punct", "=")
        if self.cur.kind == "ident":
            other = self.colref()
            if other.alias == col.alias:
                raise SqlSyntaxError(
                    "equality between columns of one alias is not supported", eq_tok.line, eq_tok.column
                )
            edges.append(JoinEq(col, other))
            return
        filters.append(Eq(col, self.constant()))

    def colref(self) -> ColRef:
        alias = self.expect("ident").text
        self.expect("punct", ".")
        column = self.expect("ident").text
        return ColRef(alias, column)

    def constant(self) -> Value:
        tok = self.accept("number")
        if tok is not None:
            return int(tok.text)
        tok = self.accept("string")
        if tok is not None:
            return _unquote(tok.text)
        raise self.error(f"expected a constant, found {self.cur.text!r}")


def _unquote(text: str) -> str:
    return text[1:-1].replace("''", "'")


def _quote(value: str) -> str:
    return "'" + value.replace("'", "''") + "'"


# ---------------------------------------------------------------------------
# Predicate semantics (shared by the executor and the oracles)

def like_regex(pattern: str) -> re.Pattern:
    """'%' wildcards with literal remainder; case-sensitive."""
    parts = pattern.split("%")
    return re.compile("^" + ".*".join(re.escape(p) for p in parts) + "$", re.DOTALL)


def evaluate_filter(pred: Filter, value: Value) -> bool:
    """Predicates evaluate false on Null; no three-valued logic."""
    if value is None:
        return False
    if isinstance(pred, Eq):
        return value == pred.value
    if isinstance(pred, Lt):
        return value < pred.value
    if isinstance(pred, Gt):
        return value > pred.value
    if isinstance(pred, In):
        return value in pred.values
    return like_regex(pred.pattern).match(value) is not None


# ---------------------------------------------------------------------------
# Validation

def _iter_colrefs(spec: QuerySpec) -> Iterator[ColRef]:
    for pred in spec.filters:
        yield pred.col
    for edge in spec.join_edges:
        yield edge.left
        yield edge.right
    for proj in spec.projections:
        yield proj.col


def validate_structure(spec: QuerySpec) -> None:
    """Catalog-free checks: aliases resolve and the join graph is connected."""
    aliases = spec.aliases
    if len(set(aliases)) != len(aliases):
        raise SqlSyntaxError("duplicate alias in FROM clause", 1, 1)
    declared = set(aliases)
    for ref in _iter_colrefs(spec):
        if ref.alias not in declared:
            raise UnknownTable(f"alias {ref.alias!r} is not declared in FROM")
    if not join_graph(spec).is_connected():
        raise DisconnectedJoinGraph(
            f"relations {sorted(declared)} are not connected by join predicates"
        )
    aggs = {p.agg for p in spec.projections}
    if len(aggs) > 1:
        raise SqlSyntaxError("mixing MIN(...) and plain projections is not supported", 1, 1)


def _const_type(value: Value) -> ColumnType:
    return ColumnType.INT64 if isinstance(value, int) else ColumnType.TEXT


def validate_semantics(spec: QuerySpec, catalog: Catalog) -> None:
    """Resolve tables and columns against the catalog, checking types."""
    col_types: dict[str, dict[str, ColumnType]] = {}
    for table, alias in spec.relations:
        if table not in catalog:
            raise UnknownTable(f"no table named {table!r}")
        col_types[alias] = {c.name: c.type for c in catalog.get(table).columns}

    def type_of(ref: ColRef) -> ColumnType:
        try:
            return col_types[ref.alias][ref.column]
        except KeyError:
            raise UnknownColumn(f"{ref} does not exist") from None

    for pred in spec.filters:
        ctype = type_of(pred.col)
        if isinstance(pred, Like):
            if ctype is not ColumnType.TEXT:
                raise TypeMismatch(f"LIKE on non-text column {pred.col}")
            continue
        consts = pred.values if isinstance(pred, In) else (pred.value,)
        for const in consts:
            if _const_type(const) is not ctype:
                raise TypeMismatch(f"{pred.col} is {ctype.value}, constant {const!r} is not")
    for edge in spec.join_edges:
        if type_of(edge.left) is not type_of(edge.right):
            raise TypeMismatch(f"join {edge.left} = {edge.right} mixes column types")
    for proj in spec.projections:
        type_of(proj.col)


def _expand_star(spec: QuerySpec, catalog: Catalog) -> QuerySpec:
    projections = []
    for table, alias in spec.relations:
        if table not in catalog:
            raise UnknownTable(f"no table named {table!r}")
        for col in catalog.get(table).columns:
            projections.append(ProjItem(ColRef(alias, col.name)))
    return QuerySpec(spec.relations, spec.filters, spec.join_edges, tuple(projections))


def parse(sql: str, catalog: Catalog) -> QuerySpec | CreateTempSpec:
    """Parse one statement and validate it against the catalog."""
    result = _Parser(_tokenize(sql)).statement()
    spec = result.select if isinstance(result, CreateTempSpec) else result
    if spec.projections == (None,):
        spec = _expand_star(spec, catalog)
    validate_structure(spec)
    validate_semantics(spec, catalog)
    if isinstance(result, CreateTempSpec):
        return CreateTempSpec(result.name, spec)
    return spec


# ---------------------------------------------------------------------------
# Rendering

def render_value(value: Value) -> str:
    if isinstance(value, int):
        return str(value)
    return _quote(value)


def render_predicate(pred: Filter | JoinEq) -> str:
    if isinstance(pred, Eq):
        return f"{pred.col} = {render_value(pred.value)}"
    if isinstance(pred, Lt):
        return f"{pred.col} < {render_value(pred.value)}"
    if isinstance(pred, Gt):
        return f"{pred.col} > {render_value(pred.value)}"
    if isinstance(pred, In):
        return f"{pred.col} IN ({', '.join(render_value(v) for v in pred.values)})"
    if isinstance(pred, Like):
        return f"{pred.col} LIKE {_quote(pred.pattern)}"
    return f"{pred.left} = {pred.right}"


def render(spec: QuerySpec | CreateTempSpec) -> str:
    """Inverse of parse: parse(render(s)) is structurally equal to s."""
    if isinstance(spec, CreateTempSpec):
        return f"CREATE TEMP TABLE {spec.name} AS {render(spec.select)}"
    projs = ", ".join(
        f"MIN({p.col})" if p.agg == "min" else str(p.col) for p in spec.projections
    )
    rels = ", ".join(
        table if table == alias else f"{table} AS {alias}" for table, alias in spec.relations
    )
    text = f"SELECT {projs} FROM {rels}"
    conjuncts = [render_predicate(p) for p in spec.filters]
    conjuncts += [render_predicate(e) for e in spec.join_edges]
    if conjuncts:
        text += " WHERE " + " AND ".join(conjuncts)
    return text


# ---------------------------------------------------------------------------
# Temp-table substitution

def substitute(
    spec: QuerySpec,
    removed: frozenset[str] | set[str],
    temp: str,
    exported_cols: dict[tuple[str, str], str],
) -> QuerySpec:
    """Replace a connected set of aliases with a single temp-table relation.

    Join predicates and projections that reference a removed alias are
    redirected to the temp table via exported_cols ((alias, column) -> temp
    column). Predicates internal to the removed set are dropped; redundant
    transitive join predicates among the survivors are preserved verbatim.
    """
    removed = frozenset(removed)
    declared = set(spec.aliases)
    if not removed <= declared:
        raise ValueError(f"removed aliases {sorted(removed - declared)} not in query")
    if not join_graph(spec).is_connected(removed):
        raise ValueError("removed aliases do not form a connected subgraph")

    def rewrite(ref: ColRef) -> ColRef:
        if ref.alias not in removed:
            return ref
        key = (ref.alias, ref.column)
        if key not in exported_cols:
            raise MissingExportColumn(f"{ref} is referenced outside the removed subtree")
        return ColRef(temp, exported_cols[key])

    relations = tuple((t, a) for t, a in spec.relations if a not in removed) + ((temp, temp),)
    filters = tuple(p for p in spec.filters if p.col.alias not in removed)
    edges = []
    for edge in spec.join_edges:
        touched = edge.aliases() & removed
        if touched == edge.aliases():
            continue  # internal to the materialized subtree
        edges.append(JoinEq(rewrite(edge.left), rewrite(edge.right)))
    projections = tuple(ProjItem(rewrite(p.col), p.agg) for p in spec.projections)
    out = QuerySpec(relations, filters, tuple(edges), projections)
    validate_structure(out)
    return out
