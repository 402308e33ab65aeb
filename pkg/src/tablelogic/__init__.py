"""Toolkit for table logical forms: parsing, checking, execution,
classification, derivation, realization, and dataset tooling."""

from .lf import (FuncNode, LogicSyntaxError, Node, NodeStats, TextNode,
                 linearize, node_stats, parse_logic_str, print_logic_str)
from .tables import (ApproxDate, Cell, CellValue, Comparison, EmptyTable,
                     Kind, RaggedRows, Table, View, all_rows, compare_cells,
                     load_table, load_table_file, parse_cell)
from .semantics import (ColumnNotFound, EmptyViewError, EvalError, Evaluator,
                        ExecConfig, IncomparableOperands, NonSingletonView,
                        OrdinalOutOfRange, SemType, TypecheckError, TypedAst,
                        evaluate, typecheck)

__all__ = [name for name in dir() if not name.startswith("_")]
