"""The seven logic types: question sets, derivation from answers, and
structural classification of programs.

A logic type is a coarse description category (count, superlative,
comparative, aggregation, majority, unique, ordinal).  Each type has a
fixed question set; a complete set of answers instantiates that type's
prototype program.  classify() goes the other way, recovering the type
from program structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

from .lf import FuncNode, Node, TextNode, iter_func_nodes, print_logic_str
from .semantics import Evaluator, ExecConfig, typecheck
from .tables import Table, all_rows


class LogicType(Enum):
    COUNT = "count"
    SUPERLATIVE = "superlative"
    COMPARATIVE = "comparative"
    AGGREGATION = "aggregation"
    MAJORITY = "majority"
    UNIQUE = "unique"
    ORDINAL = "ordinal"


class Criterion(Enum):
    """Filter criteria offered by the annotation questions."""

    EQUAL = "equal"
    NOT_EQUAL = "not_equal"
    LESS = "less"
    LESS_EQ = "less_eq"
    GREATER = "greater"
    GREATER_EQ = "greater_eq"
    FUZZY_MATCH = "fuzzy_match"
    ALL = "all"
    OTHER = "other"

    @property
    def filter_name(self) -> str:
        if self is Criterion.ALL:
            return "filter_all"
        if self is Criterion.OTHER:
            raise UnbuildableCriterion("criterion 'other' has no function")
        return f"filter_{self.predicate_kind}"

    @property
    def predicate_kind(self) -> str:
        """The eq/not_eq/greater/... suffix shared by all_*/most_*."""
        if self in (Criterion.ALL, Criterion.OTHER):
            raise UnbuildableCriterion(f"criterion {self.value!r} is not a predicate")
        # the question wording says "equal"; the DSL spells it "eq"
        kinds = {"equal": "eq", "not_equal": "not_eq", "fuzzy_match": "eq"}
        return kinds.get(self.value, self.value)


class DerivationError(Exception):
    pass


class IncompleteAnswers(DerivationError):
    def __init__(self, missing: list[str]) -> None:
        super().__init__(f"unanswered: {', '.join(missing)}")
        self.missing = missing


class UnbuildableCriterion(DerivationError):
    pass


class Unclassifiable(Exception):
    pass


@dataclass(frozen=True)
class Question:
    id: str
    logic_type: LogicType
    prompt: str
    answer_kind: str  # choice | column | row | value | bool | columns
    choices: tuple[str, ...] = ()
    # id of a prior question plus the answer that makes this one askable
    depends_on: Optional[tuple[str, str]] = None


def _scope_questions(lt: LogicType, lead: str) -> list[Question]:
    """The scope question plus the follow-ups asked when scope = subset."""
    return [
        Question("scope", lt, lead, "choice", ("all", "subset")),
        Question("scope_column", lt,
                 "Select the column used to narrow the scope.",
                 "column", depends_on=("scope", "subset")),
        Question("scope_criterion", lt,
                 "Select the criterion for the scope filter.",
                 "choice", _CRITERIA, depends_on=("scope", "subset")),
        Question("scope_value", lt,
                 "Write the value the scope filter matches against.",
                 "value", depends_on=("scope", "subset")),
    ]


_CRITERIA = tuple(c.value for c in Criterion)
_PRED_CRITERIA = tuple(c.value for c in Criterion
                       if c not in (Criterion.ALL,))


def _build_question_sets() -> dict[LogicType, tuple[Question, ...]]:
    q: dict[LogicType, list[Question]] = {}
    LT = LogicType

    q[LT.COUNT] = _scope_questions(
        LT.COUNT,
        "Choose whether the counting is performed on the scope of all "
        "table rows, or on a subset of all rows.") + [
        Question("column", LT.COUNT,
                 "Select the table column that the counting is performed on.",
                 "column"),
        Question("criterion", LT.COUNT,
                 "Select the criterion, based on which we filter the table "
                 "records to be counted.", "choice", _CRITERIA),
        Question("value", LT.COUNT,
                 "Based on the selected criterion, write the value to be "
                 "filtered for counting.", "value"),
        Question("result", LT.COUNT,
                 "Write down the result of the counting.", "value"),
    ]

    q[LT.SUPERLATIVE] = _scope_questions(
        LT.SUPERLATIVE,
        "Is the superlative action performed on the scope of all table "
        "rows, or on a subset of all rows?") + [
        Question("column", LT.SUPERLATIVE,
                 "What is the table column that the superlative action is "
                 "performed on?", "column"),
        Question("kind", LT.SUPERLATIVE,
                 "Is the superlative action taking the numerical maximum, "
                 "or minimum value among the records?", "choice",
                 ("maximum", "minimum")),
        Question("row", LT.SUPERLATIVE,
                 "What is the table row containing this superlative value?",
                 "row"),
        Question("other_columns", LT.SUPERLATIVE,
                 "On this row with the superlative value, what are the "
                 "other column(s) mentioned? If not any other column is "
                 "mentioned, write 'n/a'.", "columns"),
        Question("value_mentioned", LT.SUPERLATIVE,
                 "Is this superlative value itself mentioned in the "
                 "statement?", "bool"),
    ]

    q[LT.ORDINAL] = _scope_questions(
        LT.ORDINAL,
        "What is the scope that the ordinal description is performed on? "
        "(all rows or a subset of rows)") + [
        Question("column", LT.ORDINAL,
                 "What is the table column that the ordinal description is "
                 "based on?", "column"),
        Question("ranking", LT.ORDINAL,
                 "Is the ordinal description based on a numerically max to "
                 "min or min to max ranking of the column records?",
                 "choice", ("max_to_min", "min_to_max")),
        Question("order", LT.ORDINAL,
                 "What is the order described in the statement, based on "
                 "this ranking?", "value"),
        Question("row", LT.ORDINAL,
                 "What is the table row containing this n-th record?", "row"),
        Question("other_columns", LT.ORDINAL,
                 "On this row, what are the other column(s) mentioned? If "
                 "not any other column is mentioned, write 'n/a'.", "columns"),
        Question("value_mentioned", LT.ORDINAL,
                 "Is this n-th record itself mentioned in the statement?",
                 "bool"),
    ]

    q[LT.COMPARATIVE] = [
        Question("column", LT.COMPARATIVE,
                 "Which column is the statement comparing?", "column"),
        Question("row1", LT.COMPARATIVE,
                 "What is the first row to be compared?", "row"),
        Question("row2", LT.COMPARATIVE,
                 "What is the second row to be compared?", "row"),
        Question("relation", LT.COMPARATIVE,
                 "What is the relationship comparing the records "
                 "numerically in the first row with the second?", "choice",
                 ("greater", "less", "equal", "not_equal",
                  "difference_value", "other")),
        Question("diff_value", LT.COMPARATIVE,
                 "Write the difference between the two records.", "value",
                 depends_on=("relation", "difference_value")),
        Question("values_mentioned", LT.COMPARATIVE,
                 "Is the compared records itself mentioned in the "
                 "statement?", "bool"),
        Question("other_columns", LT.COMPARATIVE,
                 "What are the other column(s) of these two rows mentioned "
                 "in the statement?", "columns"),
    ]

    q[LT.AGGREGATION] = _scope_questions(
        LT.AGGREGATION,
        "Choose whether the aggregation is performed on the scope of all "
        "table rows, or on a subset of all rows.") + [
        Question("column", LT.AGGREGATION,
                 "Select the table column that the aggregation is performed "
                 "on.", "column"),
        Question("kind", LT.AGGREGATION,
                 "What is the type of this aggregation, sum or average?",
                 "choice", ("sum", "average")),
        Question("result", LT.AGGREGATION,
                 "What is the result of this aggregation?", "value"),
    ]

    q[LT.MAJORITY] = _scope_questions(
        LT.MAJORITY, "What is the scope of this majority?") + [
        Question("column", LT.MAJORITY,
                 "Which column the statement is describing?", "column"),
        Question("kind", LT.MAJORITY,
                 "Is the statement describing all the records or most "
                 "frequent records within the scope?", "choice",
                 ("all", "most")),
        Question("criterion", LT.MAJORITY,
                 "Select the criterion, based on which we filter records "
                 "to describe the majority.", "choice", _PRED_CRITERIA),
        Question("value", LT.MAJORITY,
                 "Based on the selected criterion, write the value to be "
                 "filtered for describing the majority.", "value"),
    ]

    q[LT.UNIQUE] = _scope_questions(
        LT.UNIQUE,
        "What is the scope of this statement describing unique row?") + [
        Question("row", LT.UNIQUE, "What is this unique row?", "row"),
        Question("column", LT.UNIQUE,
                 "Write the table column that shows the uniqueness of this "
                 "row.", "column"),
        Question("criterion", LT.UNIQUE,
                 "Select the criterion, based on which we filter records "
                 "in this column to find the unique row.", "choice",
                 ("equal", "not_equal", "less", "greater", "fuzzy_match",
                  "other")),
        Question("value", LT.UNIQUE,
                 "Based on the selected criterion, write the value to be "
                 "filtered for the unique row.", "value"),
        Question("other_columns", LT.UNIQUE,
                 "On this unique row, what are the other column(s) "
                 "mentioned (except the column describing the scope)? If "
                 "not any other column is mentioned, write 'n/a'.",
                 "columns"),
    ]

    return {lt: tuple(qs) for lt, qs in q.items()}


QUESTION_SETS = _build_question_sets()


def question_set(lt: LogicType) -> tuple[Question, ...]:
    return QUESTION_SETS[lt]


@dataclass
class AnswerRecord:
    """Typed answers to one logic type's question set.

    Keys are question ids; values are strings except other_columns
    (list of column names, [] for 'n/a') and bool answers.
    """

    logic_type: LogicType
    answers: dict[str, Any] = field(default_factory=dict)

    def get(self, qid: str) -> Any:
        return self.answers.get(qid)

    def missing(self) -> list[str]:
        out = []
        for question in question_set(self.logic_type):
            if question.depends_on is not None:
                trigger_id, trigger_value = question.depends_on
                if self.answers.get(trigger_id) != trigger_value:
                    continue
            if question.id not in self.answers:
                out.append(question.id)
        return out


def _text(value: Any) -> TextNode:
    return TextNode(str(value))


def _scope_subtree(rec: AnswerRecord) -> Node:
    if rec.get("scope") == "all":
        return TextNode("all_rows")
    criterion = Criterion(rec.get("scope_criterion"))
    if criterion is Criterion.ALL:
        return FuncNode("filter_all", (TextNode("all_rows"),
                                       _text(rec.get("scope_column"))))
    return FuncNode(criterion.filter_name, (
        TextNode("all_rows"),
        _text(rec.get("scope_column")),
        _text(rec.get("scope_value"))))


def _subject_column(table: Table) -> str:
    # rows are keyed by the leftmost column unless told otherwise; the
    # question sets identify rows but never say how programs name them
    return table.columns[0]


def _row_selector(table: Table, row_answer: str,
                  subject_column: Optional[str] = None) -> FuncNode:
    """filter_eq subtree picking one row by its subject-column value."""
    col = subject_column or _subject_column(table)
    return FuncNode("filter_eq", (
        TextNode("all_rows"), TextNode(col), TextNode(str(row_answer))))


def _row_subject_value(table: Table, row_answer: str) -> str:
    """The subject-column cell text for a row given by index or by value."""
    if str(row_answer).isdigit() and int(row_answer) < table.row_count:
        return table.cell(int(row_answer), 0).text
    return str(row_answer)


def _and(parts: list[FuncNode]) -> FuncNode:
    node = parts[0]
    for part in parts[1:]:
        node = FuncNode("and", (node, part))
    return node


def _hop_eq(row_expr: FuncNode, column: str, value: str) -> FuncNode:
    return FuncNode("eq", (
        FuncNode("hop", (row_expr, TextNode(column))), TextNode(value)))


def build_from_answers(rec: AnswerRecord, table: Table) -> FuncNode:
    """Instantiate the logic type's prototype from a complete AnswerRecord."""
    missing = rec.missing()
    if missing:
        raise IncompleteAnswers(missing)
    builder = _BUILDERS[rec.logic_type]
    ast = builder(rec, table)
    typecheck(ast)
    return ast


def _build_count(rec: AnswerRecord, table: Table) -> FuncNode:
    scope = _scope_subtree(rec)
    criterion = Criterion(rec.get("criterion"))
    if criterion is Criterion.ALL:
        counted: Node = scope
    else:
        counted = FuncNode(criterion.filter_name, (
            scope, _text(rec.get("column")), _text(rec.get("value"))))
    return FuncNode("eq", (FuncNode("count", (counted,)),
                           _text(rec.get("result"))))


def _extreme_row(rec: AnswerRecord, table: Table, maximum: bool,
                 order: Optional[str]) -> FuncNode:
    scope = _scope_subtree(rec)
    col = _text(rec.get("column"))
    if order is None:
        name = "argmax" if maximum else "argmin"
        return FuncNode(name, (scope, col))
    name = "nth_argmax" if maximum else "nth_argmin"
    return FuncNode(name, (scope, col, TextNode(str(order))))


def _build_superlative_like(rec: AnswerRecord, table: Table,
                            order: Optional[str]) -> FuncNode:
    if order is None:
        maximum = rec.get("kind") == "maximum"
    else:
        maximum = rec.get("ranking") == "max_to_min"
    row = _extreme_row(rec, table, maximum, order)
    subject_col = _subject_column(table)
    subject = _row_subject_value(table, rec.get("row"))
    parts = [_hop_eq(row, subject_col, subject)]
    for other in rec.get("other_columns") or []:
        row_idx = _locate_row(table, subject, subject_col)
        parts.append(_hop_eq(row, other, table.cell(row_idx, _col_idx(table, other)).text))
    if rec.get("value_mentioned"):
        scope = _scope_subtree(rec)
        value_col = rec.get("column")
        if order is None:
            agg = FuncNode("max" if maximum else "min",
                           (scope, _text(value_col)))
        else:
            agg = FuncNode("nth_max" if maximum else "nth_min",
                           (scope, _text(value_col), TextNode(str(order))))
        row_idx = _locate_row(table, subject, subject_col)
        parts.append(FuncNode("eq", (
            agg, TextNode(table.cell(row_idx, _col_idx(table, value_col)).text))))
    return _and(parts)


def _build_superlative(rec: AnswerRecord, table: Table) -> FuncNode:
    return _build_superlative_like(rec, table, order=None)


def _build_ordinal(rec: AnswerRecord, table: Table) -> FuncNode:
    return _build_superlative_like(rec, table, order=rec.get("order"))


def _col_idx(table: Table, name: str) -> int:
    idx = table.column_index(name)
    if idx is None:
        raise DerivationError(f"no column named {name!r}")
    return idx


def _locate_row(table: Table, subject: str, subject_col: str) -> int:
    col = _col_idx(table, subject_col)
    want = str(subject).strip().lower()
    for r in range(table.row_count):
        if table.cell(r, col).text == want:
            return r
    raise DerivationError(f"no row whose {subject_col!r} is {subject!r}")


def _build_comparative(rec: AnswerRecord, table: Table) -> FuncNode:
    relation = rec.get("relation")
    if relation == "other":
        raise UnbuildableCriterion("comparative relation 'other'")
    col = rec.get("column")
    subject_col = _subject_column(table)
    sel1 = _row_selector(table, _row_subject_value(table, rec.get("row1")),
                         subject_col)
    sel2 = _row_selector(table, _row_subject_value(table, rec.get("row2")),
                         subject_col)
    hop1 = FuncNode("hop", (sel1, _text(col)))
    hop2 = FuncNode("hop", (sel2, _text(col)))
    if relation == "difference_value":
        return FuncNode("eq", (FuncNode("diff", (hop1, hop2)),
                               _text(rec.get("diff_value"))))
    name = {"greater": "greater", "less": "less",
            "equal": "eq", "not_equal": "not_eq"}[relation]
    return FuncNode(name, (hop1, hop2))


def _build_aggregation(rec: AnswerRecord, table: Table) -> FuncNode:
    scope = _scope_subtree(rec)
    fn = "sum" if rec.get("kind") == "sum" else "avg"
    agg = FuncNode(fn, (scope, _text(rec.get("column"))))
    return FuncNode("round_eq", (agg, _text(rec.get("result"))))


def _build_majority(rec: AnswerRecord, table: Table) -> FuncNode:
    scope = _scope_subtree(rec)
    criterion = Criterion(rec.get("criterion"))
    prefix = "all" if rec.get("kind") == "all" else "most"
    return FuncNode(f"{prefix}_{criterion.predicate_kind}", (
        scope, _text(rec.get("column")), _text(rec.get("value"))))


def _build_unique(rec: AnswerRecord, table: Table) -> FuncNode:
    scope = _scope_subtree(rec)
    criterion = Criterion(rec.get("criterion"))
    filtered = FuncNode(criterion.filter_name, (
        scope, _text(rec.get("column")), _text(rec.get("value"))))
    parts: list[FuncNode] = [FuncNode("only", (filtered,))]
    others = rec.get("other_columns") or []
    if others:
        subject_col = _subject_column(table)
        subject = _row_subject_value(table, rec.get("row"))
        row_idx = _locate_row(table, subject, subject_col)
        parts.append(_hop_eq(filtered, subject_col, subject))
        for other in others:
            parts.append(_hop_eq(
                filtered, other,
                table.cell(row_idx, _col_idx(table, other)).text))
    return _and(parts)


_BUILDERS = {
    LogicType.COUNT: _build_count,
    LogicType.SUPERLATIVE: _build_superlative,
    LogicType.ORDINAL: _build_ordinal,
    LogicType.COMPARATIVE: _build_comparative,
    LogicType.AGGREGATION: _build_aggregation,
    LogicType.MAJORITY: _build_majority,
    LogicType.UNIQUE: _build_unique,
}


def _func_names(ast: Node) -> set[str]:
    return {n.name for n in iter_func_nodes(ast)}


def _strip_and(ast: FuncNode) -> list[FuncNode]:
    """The conjuncts of a (possibly nested) and; [ast] when not an and."""
    if ast.name != "and":
        return [ast]
    out = []
    for child in ast.children:
        if isinstance(child, FuncNode):
            out.extend(_strip_and(child))
    return out


def classify(ast: FuncNode) -> LogicType:
    """Recover the logic type from program structure alone.

    Priority runs most-specific-first: the nth_* marker always wins
    (ordinal), then unique's only-wrapper, and so on down to the bare
    superlative shapes.  Deterministic by construction.
    """
    names = _func_names(ast)
    if names & {"nth_max", "nth_min", "nth_argmax", "nth_argmin"}:
        return LogicType.ORDINAL
    conjuncts = _strip_and(ast)
    if any(c.name == "only" for c in conjuncts):
        return LogicType.UNIQUE
    if any(c.name.startswith(("most_", "all_")) for c in conjuncts):
        return LogicType.MAJORITY
    for conjunct in conjuncts:
        args = [c for c in conjunct.children if isinstance(c, FuncNode)]
        if conjunct.name in ("eq", "not_eq", "round_eq", "greater", "less"):
            arg_names = {c.name for c in args}
            if "count" in arg_names:
                return LogicType.COUNT
            if arg_names & {"avg", "sum"}:
                return LogicType.AGGREGATION
    if any(_is_comparative(c) for c in conjuncts):
        return LogicType.COMPARATIVE
    if names & {"argmax", "argmin", "max", "min"}:
        return LogicType.SUPERLATIVE
    raise Unclassifiable(print_logic_str(ast))


def _is_comparative(ast: FuncNode) -> bool:
    """Two disjoint row selections compared at the root (directly or
    through diff)."""
    if ast.name not in ("eq", "not_eq", "round_eq", "greater", "less"):
        return False
    args = list(ast.children)
    if len(args) == 2 and isinstance(args[0], FuncNode) \
            and args[0].name == "diff":
        args = list(args[0].children)
    hops = [a for a in args if isinstance(a, FuncNode) and a.name == "hop"]
    if len(hops) == 2:
        return True
    # one side may be a literal mention of the other row's value; require
    # both sides to be row-valued hops to call it comparative
    return False


def validate_answers(rec: AnswerRecord, table: Table,
                     cfg: Optional[ExecConfig] = None) -> list[str]:
    """Front-line checks for the annotation UI; issues are data, not errors."""
    issues = [f"unanswered: {qid}" for qid in rec.missing()]
    for qid in ("column", "scope_column"):
        name = rec.get(qid)
        if name is not None and table.column_index(str(name)) is None:
            issues.append(f"unknown column for {qid}: {name!r}")
    for other in rec.get("other_columns") or []:
        if table.column_index(str(other)) is None:
            issues.append(f"unknown column in other_columns: {other!r}")
    if issues:
        return issues
    try:
        ast = build_from_answers(rec, table)
    except UnbuildableCriterion as exc:
        return [f"unbuildable: {exc}"]
    except DerivationError as exc:
        return [str(exc)]
    verdict = Evaluator(table, cfg).run(ast)
    if verdict is not True:
        issues.append("execution mismatch: program evaluates false")
    return issues
