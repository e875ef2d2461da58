"""In-memory select-project-join engine with a cost-based optimizer,
PostgreSQL-style cardinality estimation, a true-cardinality oracle, and
mid-query re-optimization."""

from .cardinality import (
    CardinalityOracle,
    CardinalityRequest,
    Estimator,
    EstimatorConfig,
    request_for,
)
from .errors import (
    DisconnectedJoinGraph,
    DuplicateKey,
    DuplicateTable,
    EngineError,
    InvalidSpec,
    MissingExportColumn,
    MissingStats,
    MissingTable,
    ParseError,
    SqlSyntaxError,
    TypeMismatch,
    UnknownColumn,
    UnknownTable,
)
from .executor import ExecResult, OperatorProfile, execute, execute_to_temp, explain_analyze
from .optimizer import OptimizerConfig, PlanNode, cost_of, explain, optimize
from .reopt import (
    ImprovementCurve,
    ReoptConfig,
    ReoptTrace,
    qerror,
    run_with_reopt,
    selective_improvement,
    threshold_sweep,
)
from .sql import CreateTempSpec, JoinGraph, QuerySpec, join_graph, parse, render, substitute
from .stats import ColumnStats, Histogram, McvList, TableStats, analyze, analyze_catalog, analyze_temp
from .storage import Catalog, ColumnMeta, ColumnType, Table
from .workload import GeneratorSpec, build_corpus, generate

__all__ = [name for name in dir() if not name.startswith("_")]
