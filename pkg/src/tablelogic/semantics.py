"""Typed signatures, static checker, and evaluator for table programs.

Scalar results are represented uniformly as CellValue so that comparisons
between computed values (counts, aggregates, hops) and literal text nodes
all go through the same compare_cells rules.
"""

from __future__ import annotations

import datetime
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from .lf import FuncNode, Node, TextNode
from .tables import (CellValue, Comparison, Kind, Table, View, all_rows,
                     compare_cells, parse_cell)
from .tables import all_numbers, date_text_key


def _text_numbers(cell: CellValue) -> list[float]:
    return all_numbers(cell.text)


def _loose_applies(cell: CellValue, value: CellValue) -> bool:
    """Decide whether the substring fallback may run for this pair.

    For a plain number value it only makes sense with truncated year-like
    numerals ("193" against 1930); single digits keep exact equality so
    "0" cannot match inside "2 - 0".
    """
    if value.kind is not Kind.NUMBER:
        return True
    return value.text.isdigit() and len(value.text) >= 2


def _loose_contains(cell_text: str, value_text: str) -> bool:
    """True when the despaced value occurs in the despaced cell starting
    at a token boundary, so "198" matches "1987 , 1992" and "197" matches
    "07.09.1970", but "0" does not match "w 20 - 3"."""
    want = value_text.replace(" ", "")
    if not want:
        return False
    hay = cell_text.replace(" ", "")
    if not any(c.isalnum() for c in want):
        # pure punctuation values ("%", ",") have no usable boundary
        return want in hay
    at = hay.find(want)
    while at != -1:
        if at == 0 or not hay[at - 1].isalnum():
            return True
        at = hay.find(want, at + 1)
    return False


class SemType(Enum):
    BOOL = "bool"
    NUMBER = "number"
    ROW = "row"
    VIEW = "view"
    OBJ = "obj"
    HEADER = "header"


class TypecheckError(Exception):
    """Static checking failure; carries the node path from the root."""

    def __init__(self, message: str, path: tuple[int, ...] = ()) -> None:
        super().__init__(f"{message} at path {list(path)}")
        self.path = path


class UnknownFunction(TypecheckError):
    pass


class ArityMismatch(TypecheckError):
    pass


class TypeMismatch(TypecheckError):
    pass


class EvalError(Exception):
    """Runtime evaluation failure."""


class ColumnNotFound(EvalError):
    pass


class EmptyViewError(EvalError):
    pass


class NonSingletonView(EvalError):
    pass


class OrdinalOutOfRange(EvalError):
    pass


class IncomparableOperands(EvalError):
    pass


# name -> (argument types, result type)
SIGNATURES: dict[str, tuple[tuple[SemType, ...], SemType]] = {
    "count": ((SemType.VIEW,), SemType.NUMBER),
    "only": ((SemType.VIEW,), SemType.BOOL),
    "hop": ((SemType.ROW, SemType.HEADER), SemType.OBJ),
    "and": ((SemType.BOOL, SemType.BOOL), SemType.BOOL),
    "max": ((SemType.VIEW, SemType.HEADER), SemType.NUMBER),
    "min": ((SemType.VIEW, SemType.HEADER), SemType.NUMBER),
    "avg": ((SemType.VIEW, SemType.HEADER), SemType.NUMBER),
    "sum": ((SemType.VIEW, SemType.HEADER), SemType.NUMBER),
    "nth_max": ((SemType.VIEW, SemType.HEADER, SemType.NUMBER), SemType.NUMBER),
    "nth_min": ((SemType.VIEW, SemType.HEADER, SemType.NUMBER), SemType.NUMBER),
    "argmax": ((SemType.VIEW, SemType.HEADER), SemType.ROW),
    "argmin": ((SemType.VIEW, SemType.HEADER), SemType.ROW),
    "nth_argmax": ((SemType.VIEW, SemType.HEADER, SemType.NUMBER), SemType.ROW),
    "nth_argmin": ((SemType.VIEW, SemType.HEADER, SemType.NUMBER), SemType.ROW),
    "eq": ((SemType.OBJ, SemType.OBJ), SemType.BOOL),
    "not_eq": ((SemType.OBJ, SemType.OBJ), SemType.BOOL),
    "round_eq": ((SemType.OBJ, SemType.OBJ), SemType.BOOL),
    "greater": ((SemType.OBJ, SemType.OBJ), SemType.BOOL),
    "less": ((SemType.OBJ, SemType.OBJ), SemType.BOOL),
    "diff": ((SemType.OBJ, SemType.OBJ), SemType.OBJ),
    "filter_all": ((SemType.VIEW, SemType.HEADER), SemType.VIEW),
}
for _kind in ("eq", "not_eq", "greater", "less", "greater_eq", "less_eq"):
    SIGNATURES[f"filter_{_kind}"] = (
        (SemType.VIEW, SemType.HEADER, SemType.OBJ), SemType.VIEW)
    SIGNATURES[f"all_{_kind}"] = (
        (SemType.VIEW, SemType.HEADER, SemType.OBJ), SemType.BOOL)
    SIGNATURES[f"most_{_kind}"] = (
        (SemType.VIEW, SemType.HEADER, SemType.OBJ), SemType.BOOL)

COMPARATOR_KINDS = ("eq", "not_eq", "greater", "less", "greater_eq", "less_eq")


@dataclass(frozen=True)
class ExecConfig:
    """Tunable evaluation knobs left open by the source semantics."""

    round_eq_relative_tol: float = 0.05
    round_eq_absolute_floor: float = 0.5  # in units of the reference's last decimal place
    most_threshold: float = 0.5  # strict majority: satisfied > threshold * total
    hop_view_policy: str = "first_row"  # or "require_singleton"

    def __post_init__(self) -> None:
        if not 0 < self.most_threshold < 1:
            raise ValueError("most_threshold must be in (0, 1)")
        if self.round_eq_relative_tol < 0 or self.round_eq_absolute_floor < 0:
            raise ValueError("tolerances must be >= 0")
        if self.hop_view_policy not in ("first_row", "require_singleton"):
            raise ValueError(f"unknown hop_view_policy {self.hop_view_policy!r}")

    @classmethod
    def from_file(cls, path) -> "ExecConfig":
        """Load from a plain-text key=value file; unknown keys rejected."""
        kwargs = {}
        casts = {"round_eq_relative_tol": float, "round_eq_absolute_floor": float,
                 "most_threshold": float, "hop_view_policy": str}
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected key=value")
                key, _, value = line.partition("=")
                key = key.strip()
                if key not in casts:
                    raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
                kwargs[key] = casts[key](value.strip())
        return cls(**kwargs)


@dataclass(frozen=True)
class TypedAst:
    """An ast plus the checked type of every node, keyed by child-index path."""

    root: FuncNode
    types: dict[tuple[int, ...], SemType] = field(hash=False, compare=False,
                                                  default_factory=dict)

    @property
    def result_type(self) -> SemType:
        return self.types[()]


def typecheck(ast: FuncNode) -> TypedAst:
    """Annotate every node with its SemType; root must come out Bool.

    Header leaves are only bound to concrete columns at evaluation time.
    """
    types: dict[tuple[int, ...], SemType] = {}

    def check(node: Node, expected: SemType, path: tuple[int, ...]) -> SemType:
        if isinstance(node, TextNode):
            actual = _text_type(node, expected, path)
            types[path] = actual
            return actual
        sig = SIGNATURES.get(node.name)
        if sig is None:
            raise UnknownFunction(f"unknown function {node.name!r}", path)
        arg_types, ret = sig
        if len(node.children) != len(arg_types):
            raise ArityMismatch(
                f"{node.name} takes {len(arg_types)} arguments, "
                f"got {len(node.children)}", path)
        if not _assignable(ret, expected):
            raise TypeMismatch(
                f"{node.name} returns {ret.value}, expected {expected.value}",
                path)
        for i, (child, want) in enumerate(zip(node.children, arg_types)):
            check(child, want, path + (i,))
        types[path] = ret
        return ret

    check(ast, SemType.BOOL, ())
    return TypedAst(ast, types)


def _text_type(node: TextNode, expected: SemType, path: tuple[int, ...]) -> SemType:
    if expected is SemType.VIEW:
        if node.text != "all_rows":
            raise TypeMismatch(
                f"text node {node.text!r} cannot be a view (only all_rows)",
                path)
        return SemType.VIEW
    if expected is SemType.HEADER:
        return SemType.HEADER
    if expected is SemType.NUMBER:
        if parse_cell(node.text).numeric is None:
            raise TypeMismatch(f"{node.text!r} is not numeric", path)
        return SemType.NUMBER
    if expected is SemType.OBJ:
        return SemType.OBJ
    raise TypeMismatch(
        f"text node {node.text!r} cannot have type {expected.value}", path)


def _assignable(actual: SemType, expected: SemType) -> bool:
    if actual == expected:
        return True
    if expected is SemType.OBJ:
        return actual in (SemType.NUMBER, SemType.OBJ)
    if expected is SemType.NUMBER:
        return actual in (SemType.NUMBER, SemType.OBJ)
    if expected is SemType.ROW:
        # hop over a view resolves through ExecConfig.hop_view_policy
        return actual in (SemType.ROW, SemType.VIEW)
    return False


Value = Union[bool, CellValue, int, View]


def _num(x: float) -> CellValue:
    text = str(int(x)) if float(x).is_integer() else str(x)
    return CellValue(Kind.NUMBER, text, number=float(x), first_number=float(x))


class Evaluator:
    """Bottom-up interpreter for one (program, table, config) triple."""

    def __init__(self, table: Table, cfg: Optional[ExecConfig] = None,
                 log: Optional[list[str]] = None) -> None:
        self.table = table
        self.cfg = cfg or ExecConfig()
        self.log = log if log is not None else []

    def run(self, ast: FuncNode) -> Value:
        return self.eval(ast)

    # -- dispatch -----------------------------------------------------------

    def eval(self, node: Node) -> Value:
        if isinstance(node, TextNode):
            if node.text == "all_rows":
                return all_rows(self.table)
            return parse_cell(node.text)
        name = node.name
        if name == "and":
            return all(self._bool(c) for c in node.children)
        if name == "count":
            return _num(len(self._view(node.children[0])))
        if name == "only":
            return len(self._view(node.children[0])) == 1
        if name == "hop":
            return self._hop(node)
        if name in ("max", "min", "avg", "sum"):
            return self._aggregate(name, node)
        if name in ("nth_max", "nth_min"):
            return self._nth_value(name, node)
        if name in ("argmax", "argmin", "nth_argmax", "nth_argmin"):
            return self._arg_extreme(name, node)
        if name in ("eq", "not_eq", "round_eq", "greater", "less"):
            return self._compare(name, node)
        if name == "diff":
            return self._diff(node)
        if name == "filter_all":
            view = self._view(node.children[0])
            col = self._column(node.children[1])
            return View(self.table,
                        tuple(r for r, _ in self._data_cells(view, col)))
        if name.startswith("filter_"):
            return self._filter(name[len("filter_"):], node)
        if name.startswith("all_"):
            return self._quantifier(name[len("all_"):], node, require_all=True)
        if name.startswith("most_"):
            return self._quantifier(name[len("most_"):], node, require_all=False)
        raise EvalError(f"unknown function {name!r}")

    # -- argument helpers ---------------------------------------------------

    def _bool(self, node: Node) -> bool:
        v = self.eval(node)
        if not isinstance(v, bool):
            raise EvalError(f"expected bool, got {type(v).__name__}")
        return v

    def _view(self, node: Node) -> View:
        v = self.eval(node)
        if not isinstance(v, View):
            raise EvalError(f"expected view, got {type(v).__name__}")
        return v

    def _obj(self, node: Node) -> CellValue:
        v = self.eval(node)
        if not isinstance(v, CellValue):
            raise EvalError(f"expected scalar, got {type(v).__name__}")
        return v

    def _column(self, node: Node) -> int:
        if not isinstance(node, TextNode):
            raise EvalError("column argument must be a text node")
        idx = self.table.column_index(node.text)
        if idx is None:
            raise ColumnNotFound(
                f"no column matching {node.text!r} in "
                f"{list(self.table.columns)}")
        return idx

    def _ordinal(self, node: Node) -> int:
        v = self.eval(node)
        if not isinstance(v, CellValue) or v.numeric is None:
            raise EvalError("ordinal argument must be numeric")
        n = v.numeric
        if n != int(n) or n < 1:
            raise OrdinalOutOfRange(f"ordinal must be a positive integer, got {n}")
        return int(n)

    def _row_indices(self, node: Node) -> tuple[View, list[int]]:
        view = self._view(node)
        return view, list(view.row_indices)

    # -- per-family semantics ----------------------------------------------

    def _hop(self, node: FuncNode) -> CellValue:
        target = self.eval(node.children[0])
        col = self._column(node.children[1])
        if isinstance(target, View):
            if len(target) == 0:
                raise EmptyViewError("hop over an empty view")
            if self.cfg.hop_view_policy == "require_singleton" and len(target) > 1:
                raise NonSingletonView(
                    f"hop over a view of {len(target)} rows")
            if len(target) > 1:
                self.log.append(
                    f"hop: taking first of {len(target)} rows")
            row = target.row_indices[0]
        elif isinstance(target, int):
            row = target
        else:
            raise EvalError(f"hop expects a row or view, got {type(target).__name__}")
        return self.table.cell(row, col)

    def _column_cells(self, view: View, col: int) -> list[tuple[int, CellValue]]:
        return [(r, self.table.cell(r, col)) for r in view.row_indices]

    def _data_cells(self, view: View, col: int) -> list[tuple[int, CellValue]]:
        """Column cells with footer total rows dropped (unless that would
        leave nothing to work with)."""
        pairs = self._column_cells(view, col)
        totals = self.table.summary_rows
        kept = [(r, c) for r, c in pairs if r not in totals]
        if kept and len(kept) < len(pairs):
            self.log.append(
                f"excluded {len(pairs) - len(kept)} summary rows from "
                f"column {self.table.columns[col]!r}")
            return kept
        return pairs

    def _ranked(self, view: View, col: int, descending: bool
                ) -> list[tuple[int, CellValue]]:
        """Rows with an orderable cell in the column, stably sorted.
        Non-orderable cells are skipped and logged."""
        keyed = []
        skipped = 0
        for r, cell in self._data_cells(view, col):
            key = _order_key(cell)
            if key is None:
                skipped += 1
                continue
            keyed.append((key, r, cell))
        if skipped:
            self.log.append(
                f"ranking over column {self.table.columns[col]!r}: "
                f"skipped {skipped} non-orderable cells")
        keyed.sort(key=lambda t: t[0], reverse=descending)
        return [(r, cell) for _, r, cell in keyed]

    def _aggregate(self, kind: str, node: FuncNode) -> CellValue:
        view = self._view(node.children[0])
        col = self._column(node.children[1])
        if kind in ("max", "min"):
            ranked = self._ranked(view, col, descending=(kind == "max"))
            if not ranked:
                raise EmptyViewError(f"{kind} over zero orderable values")
            return ranked[0][1]
        values = []
        skipped = 0
        for _, cell in self._data_cells(view, col):
            if cell.numeric is None:
                skipped += 1
            else:
                values.append(cell.numeric)
        if skipped:
            self.log.append(
                f"{kind} over column {self.table.columns[col]!r}: "
                f"skipped {skipped} non-numeric cells")
        if kind == "sum":
            return _num(sum(values))
        if not values:
            raise EmptyViewError("avg over zero numeric values")
        return _num(sum(values) / len(values))

    def _nth_value(self, name: str, node: FuncNode) -> CellValue:
        view = self._view(node.children[0])
        col = self._column(node.children[1])
        n = self._ordinal(node.children[2])
        ranked = self._ranked(view, col, descending=(name == "nth_max"))
        if not ranked:
            raise EmptyViewError(f"{name} over zero orderable values")
        if n > len(ranked):
            raise OrdinalOutOfRange(f"{name}: n={n} but only {len(ranked)} values")
        return ranked[n - 1][1]

    def _arg_extreme(self, name: str, node: FuncNode) -> int:
        view = self._view(node.children[0])
        col = self._column(node.children[1])
        nth = name.startswith("nth_")
        n = self._ordinal(node.children[2]) if nth else 1
        descending = name.endswith("argmax")
        ranked = self._ranked(view, col, descending=descending)
        if not ranked:
            raise EmptyViewError(f"{name} over zero orderable values")
        if n > len(ranked):
            raise OrdinalOutOfRange(f"{name}: n={n} but only {len(ranked)} rows")
        return ranked[n - 1][0]

    def _compare(self, kind: str, node: FuncNode) -> bool:
        a = self._obj(node.children[0])
        b = self._obj(node.children[1])
        outcome = compare_cells(a, b)
        if kind == "eq":
            return outcome in (Comparison.EQUAL, Comparison.FUZZY_EQUAL)
        if kind == "not_eq":
            return outcome not in (Comparison.EQUAL, Comparison.FUZZY_EQUAL)
        if kind == "round_eq":
            if outcome in (Comparison.EQUAL, Comparison.FUZZY_EQUAL):
                return True
            return self._roughly_equal(a, b)
        outcome = compare_cells(a, b, ordering=True)
        if outcome in (Comparison.EQUAL, Comparison.FUZZY_EQUAL):
            return False
        if outcome is Comparison.INCOMPARABLE:
            raise IncomparableOperands(
                f"cannot order {a.text!r} against {b.text!r}")
        return (outcome is Comparison.GREATER) == (kind == "greater")

    def _roughly_equal(self, a: CellValue, b: CellValue) -> bool:
        na, nb = a.numeric, b.numeric
        if na is None or nb is None:
            return False
        tol = max(self.cfg.round_eq_relative_tol * abs(nb),
                  self.cfg.round_eq_absolute_floor * _last_place_unit(b))
        return abs(na - nb) <= tol

    def _diff(self, node: FuncNode) -> CellValue:
        a = self._obj(node.children[0])
        b = self._obj(node.children[1])
        ka, kb = _date_key(a), _date_key(b)
        if ka is not None and kb is not None and len(ka) == len(kb):
            if len(ka) == 3 and ka[1] == 0 and kb[1] == 0:
                return _num(ka[0] - kb[0])  # year-only dates: diff in years
            return _num(_ordinal(ka) - _ordinal(kb))
        if a.numeric is not None and b.numeric is not None:
            return _num(a.numeric - b.numeric)
        raise IncomparableOperands(
            f"diff needs two numbers or two dates, got {a.text!r}, {b.text!r}")

    def _satisfies(self, cell: CellValue, kind: str, value: CellValue) -> bool:
        outcome = compare_cells(cell, value)
        is_eq = outcome in (Comparison.EQUAL, Comparison.FUZZY_EQUAL)
        if (not is_eq and kind in ("eq", "not_eq")
                and _loose_applies(cell, value)):
            # Annotated filter values are often truncated ("198" for a
            # 1987 season, "1-1" for "1 - 1") or pluralized ("finals"
            # against cell "final"), so fall back to prefix containment
            # with spacing removed, plus a bare plural-s check.
            is_eq = (_loose_contains(cell.text, value.text)
                     or (value.text == cell.text + "s"
                         and cell.text[-1:].isalpha()))
        if kind == "eq":
            return is_eq
        if kind == "not_eq":
            return not is_eq
        outcome = compare_cells(cell, value, ordering=True)
        if outcome is Comparison.INCOMPARABLE:
            return False
        if kind == "greater":
            return outcome is Comparison.GREATER
        if kind == "less":
            return outcome is Comparison.LESS
        if kind == "greater_eq":
            return is_eq or outcome is Comparison.GREATER
        if kind == "less_eq":
            return is_eq or outcome is Comparison.LESS
        raise EvalError(f"unknown predicate kind {kind!r}")

    def _filter(self, kind: str, node: FuncNode) -> View:
        view = self._view(node.children[0])
        col = self._column(node.children[1])
        value = self._obj(node.children[2])
        keep = tuple(r for r, cell in self._data_cells(view, col)
                     if self._satisfies(cell, kind, value))
        return View(self.table, keep)

    def _quantifier(self, kind: str, node: FuncNode, require_all: bool) -> bool:
        view = self._view(node.children[0])
        col = self._column(node.children[1])
        value = self._obj(node.children[2])
        cells = self._data_cells(view, col)
        total = len(cells)
        satisfied = sum(1 for _, cell in cells
                        if self._satisfies(cell, kind, value))
        if require_all:
            if total == 0:
                self.log.append("all_* over an empty view is vacuously true")
                return True
            return satisfied == total
        if total == 0:
            return False
        return satisfied > self.cfg.most_threshold * total


def _order_key(cell: CellValue) -> Optional[tuple]:
    """Ranking key for one cell; None when the cell carries no order.

    Dates key chronologically.  Bare years parse as Numbers, whose
    single-element keys still align with date keys.  Mixed text keys by
    an embedded year/month when present ("q1 2008", "may 30 , 2011"),
    else by its embedded number sequence ("1:15.978", "15.14 ( 104 )").
    """
    if cell.kind is Kind.DATE:
        return tuple(float(x) for x in cell.date.sort_key())
    if cell.kind is Kind.NUMBER:
        return (cell.number,)
    if cell.result_number is not None:
        return (cell.result_number,)
    dk = date_text_key(cell.text)
    if dk is not None:
        return dk
    nums = _text_numbers(cell)
    # Only the leading number orders mixed text ("5 - 1" keys as 5);
    # later numbers never break ties, the stable sort keeps row order.
    return (nums[0],) if nums else None


def _date_key(cell: CellValue) -> Optional[tuple[float, ...]]:
    """(year, month, day) or (month, day) for a Date cell or date-like
    text; None for everything else."""
    if cell.kind is Kind.DATE:
        d = cell.date
        return (float(d.year), float(d.month or 0), float(d.day or 0))
    if cell.kind is Kind.TEXT:
        return date_text_key(cell.text)
    return None


def _ordinal(key: tuple[float, ...]) -> int:
    """Calendar day number for a date key; keys without a year share a
    reference leap year so month arithmetic stays exact."""
    if len(key) == 2:
        month, day = key
        year = 2000.0
    else:
        year, month, day = key
    return datetime.date(int(year), int(month) or 1, int(day) or 1).toordinal()


def _last_place_unit(v: CellValue) -> float:
    """Unit in the last decimal place of the reference's written form."""
    text = v.text
    if "." in text:
        frac = text.split(".", 1)[1]
        digits = sum(c.isdigit() for c in frac)
        return 10.0 ** -digits
    return 1.0


def evaluate(ast: FuncNode, table: Table, cfg: Optional[ExecConfig] = None,
             log: Optional[list[str]] = None) -> Value:
    """Typecheck-free entry point: evaluate a program against a table."""
    return Evaluator(table, cfg, log).run(ast)
