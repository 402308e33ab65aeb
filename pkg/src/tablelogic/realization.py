"""Deterministic text from programs.

Two renderers: realize_template produces the rigid per-logic-type surface
used as a generation floor, and interpret produces a literal clause-by-
clause reading used for semantic verification.  Wording lives in
resources/realization.txt so it can be tuned without code changes.
"""

from __future__ import annotations

import re
from importlib import resources as importlib_resources
from typing import Optional

from .lf import FuncNode, Node, TextNode
from .logic_types import LogicType, Unclassifiable, _strip_and, classify
from .tables import Table


class SlotExtractionFailure(Exception):
    """A classified program did not yield the slots its template needs."""


def _load_phrases() -> dict[str, str]:
    out: dict[str, str] = {}
    text = (importlib_resources.files("tablelogic") / "resources"
            / "realization.txt").read_text(encoding="utf-8")
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


PHRASES = _load_phrases()


_CRIT_BY_FUNC = {
    "eq": "crit.eq", "not_eq": "crit.not_eq", "greater": "crit.greater",
    "less": "crit.less", "greater_eq": "crit.greater_eq",
    "less_eq": "crit.less_eq",
}


def _crit(kind: str) -> str:
    return PHRASES[_CRIT_BY_FUNC[kind]]


def _fill(key: str, **slots: str) -> str:
    return PHRASES[key].format(**slots)


def _text_of(node: Node) -> str:
    if not isinstance(node, TextNode):
        raise SlotExtractionFailure(f"expected a text node, got {node!r}")
    return node.text


def _fn(node: Node) -> FuncNode:
    if not isinstance(node, FuncNode):
        raise SlotExtractionFailure(f"expected a function node, got {node!r}")
    return node


def _scope_clause(scope: Node) -> str:
    """The optional "among the ones whose ..." clause, or ""."""
    if isinstance(scope, TextNode):
        return ""
    if scope.name == "filter_all":
        return ""
    if not scope.name.startswith("filter_"):
        raise SlotExtractionFailure(f"unexpected scope {scope.name}")
    kind = scope.name[len("filter_"):]
    return _fill("tpl.scope",
                 scope_column=_text_of(scope.children[1]),
                 scope_criterion=_crit(kind),
                 scope_value=_text_of(scope.children[2]))


def _split_scoped_filter(node: FuncNode) -> tuple[Node, Optional[FuncNode]]:
    """(scope, innermost filter) for a possibly stacked filter chain."""
    if node.name.startswith("filter_") and node.name != "filter_all":
        inner = node.children[0]
        return inner, node
    return node, None


def _squash(text: str) -> str:
    return re.sub(r"\s+", " ", text).strip()


def realize_template(ast: FuncNode, table: Table) -> str:
    """Appendix-style rigid surface for a classified program."""
    lt = classify(ast)
    body = _REALIZERS[lt](ast)
    return _squash(f"{_fill('tpl.intro', caption=table.caption)} {body}")


def _realize_count(ast: FuncNode) -> str:
    root = next(c for c in _strip_and(ast)
                if any(isinstance(a, FuncNode) and a.name == "count"
                       for a in c.children))
    count_node = _fn(root.children[0])
    result = _text_of(root.children[1])
    counted = count_node.children[0]
    if isinstance(counted, TextNode) or counted.name == "filter_all":
        return _fill("tpl.count_all", result=result)
    scope, flt = _split_scoped_filter(_fn(counted))
    if flt is None:
        return f"{_scope_clause(scope)} " + _fill("tpl.count_all",
                                                  result=result)
    kind = flt.name[len("filter_"):]
    return f"{_scope_clause(scope)} " + _fill(
        "tpl.count", result=result, column=_text_of(flt.children[1]),
        criterion=_crit(kind), value=_text_of(flt.children[2]))


def _extreme_word(name: str, n: Optional[str]) -> str:
    base = "maximum" if name.endswith("max") else "minimum"
    return f"{n} -th {base}" if n is not None else base


def _realize_superlative_like(ast: FuncNode) -> str:
    conjuncts = _strip_and(ast)
    subject = None
    others = []
    value = ""
    scope: Node = TextNode("all_rows")
    column = extreme = None
    for c in conjuncts:
        left = c.children[0]
        if isinstance(left, FuncNode) and left.name == "hop":
            target = _fn(left.children[0])
            n = (_text_of(target.children[2])
                 if target.name.startswith("nth_") else None)
            scope = target.children[0]
            column_here = _text_of(target.children[1])
            if extreme is None:
                extreme = _extreme_word(target.name, n)
                column = column_here
                subject = _text_of(c.children[1])
            else:
                others.append((_text_of(left.children[1]),
                               _text_of(c.children[1])))
        elif isinstance(left, FuncNode) and left.name in (
                "max", "min", "nth_max", "nth_min"):
            n = (_text_of(left.children[2])
                 if left.name.startswith("nth_") else None)
            scope = left.children[0]
            if extreme is None:
                extreme = _extreme_word(left.name, n)
                column = _text_of(left.children[1])
            value = _text_of(c.children[1])
    if extreme is None or column is None:
        raise SlotExtractionFailure("no superlative core found")
    if subject is None:
        return f"{_scope_clause(scope)} " + _fill(
            "tpl.superlative.value", extreme=extreme, column=column,
            value=value)
    others_txt = ""
    if others:
        inner = " ; ".join(f"{col} {val}" for col, val in others)
        others_txt = f", with {inner} , "
    value_txt = f", {value} , " if value else ""
    return f"{_scope_clause(scope)} " + _fill(
        "tpl.superlative.subject", subject=subject, others=others_txt,
        extreme=extreme, column=column, value=value_txt)


def _subject_of_hop(hop: FuncNode) -> str:
    sel = _fn(hop.children[0])
    if sel.name.startswith("filter_") and len(sel.children) == 3:
        return _text_of(sel.children[2])
    raise SlotExtractionFailure("comparative hop without a row filter")


def _realize_comparative(ast: FuncNode) -> str:
    conjuncts = _strip_and(ast)
    core = None
    mentions: dict[str, list[str]] = {}
    for c in conjuncts:
        a, b = c.children
        if isinstance(a, FuncNode) and a.name == "diff":
            core = ("diff", _fn(a.children[0]), _fn(a.children[1]),
                    _text_of(b))
        elif isinstance(a, FuncNode) and a.name == "hop" \
                and isinstance(b, FuncNode) and b.name == "hop":
            if core is None:
                core = (c.name, a, b, None)
        elif isinstance(a, FuncNode) and a.name == "hop":
            mentions.setdefault(_subject_of_hop(a), []).append(
                f"{_text_of(a.children[1])} {_text_of(b)}")
    if core is None:
        raise SlotExtractionFailure("no comparative core found")
    relation, hop1, hop2, diff = core
    column = _text_of(hop1.children[1])
    s1, s2 = _subject_of_hop(hop1), _subject_of_hop(hop2)
    if diff is not None:
        return _fill("tpl.comparative.diff", subject1=s1, diff=diff,
                     column=column, subject2=s2)
    if relation in ("eq", "round_eq"):
        return _fill("tpl.comparative.eq", subject1=s1, column=column,
                     subject2=s2)
    rel_word = {"greater": "greater", "less": "less",
                "not_eq": "different"}[relation]
    def mention(s: str) -> str:
        vals = mentions.get(s)
        return f", with {' ; '.join(vals)} , " if vals else ""
    return _fill("tpl.comparative", subject1=s1, others1=mention(s1),
                 relation=rel_word, column=column, subject2=s2,
                 others2=mention(s2))


def _realize_unique(ast: FuncNode) -> str:
    conjuncts = _strip_and(ast)
    only = next(c for c in conjuncts if c.name == "only")
    flt = _fn(only.children[0])
    scope, inner = _split_scoped_filter(flt)
    if inner is None:
        raise SlotExtractionFailure("only over a bare view")
    # a stacked filter chain means the outer filter is the uniqueness test
    # and the inner one is the scope
    if isinstance(scope, FuncNode) and scope.name.startswith("filter_"):
        scope_clause = _scope_clause(scope)
    else:
        scope_clause = ""
    kind = flt.name[len("filter_"):]
    column = _text_of(flt.children[1])
    value = _text_of(flt.children[2])
    subject = None
    for c in conjuncts:
        left = c.children[0] if c.children else None
        if c.name == "eq" and isinstance(left, FuncNode) \
                and left.name == "hop":
            subject = _text_of(c.children[1])
            break
    if subject is None:
        return f"{scope_clause} " + _fill(
            "tpl.unique", column=column, criterion=_crit(kind), value=value)
    return f"{scope_clause} " + _fill(
        "tpl.unique.subject", column=column, criterion=_crit(kind),
        value=value, subject=subject)


def _realize_aggregation(ast: FuncNode) -> str:
    root = next(c for c in _strip_and(ast)
                if any(isinstance(a, FuncNode) and a.name in ("avg", "sum")
                       for a in c.children))
    agg = _fn(root.children[0])
    scope = agg.children[0]
    word = "average" if agg.name == "avg" else "sum"
    return f"{_scope_clause(scope)} " + _fill(
        "tpl.aggregation", agg=word, column=_text_of(agg.children[1]),
        result=_text_of(root.children[1]))


def _realize_majority(ast: FuncNode) -> str:
    node = next(c for c in _strip_and(ast)
                if c.name.startswith(("most_", "all_")))
    quant, _, kind = node.name.partition("_")
    scope = node.children[0]
    return f"{_scope_clause(scope)} " + _fill(
        "tpl.majority", quant=quant, column=_text_of(node.children[1]),
        criterion=_crit(kind), value=_text_of(node.children[2]))


_REALIZERS = {
    LogicType.COUNT: _realize_count,
    LogicType.SUPERLATIVE: _realize_superlative_like,
    LogicType.ORDINAL: _realize_superlative_like,
    LogicType.COMPARATIVE: _realize_comparative,
    LogicType.UNIQUE: _realize_unique,
    LogicType.AGGREGATION: _realize_aggregation,
    LogicType.MAJORITY: _realize_majority,
}


# -- interpretation ---------------------------------------------------------

def interpret(ast: FuncNode) -> str:
    """Literal bottom-up reading of a program, one clause per function."""
    return _squash(_describe(ast) + " .")


def _describe(node: Node) -> str:
    if isinstance(node, TextNode):
        return "all table rows" if node.text == "all_rows" else node.text
    name = node.name
    ch = node.children
    if name == "and":
        return _fill("int.and", a=_describe(ch[0]), b=_describe(ch[1]))
    if name == "count":
        return _fill("int.count", view=_describe(ch[0]))
    if name == "only":
        return _fill("int.only", view=_describe(ch[0]))
    if name == "hop":
        return _fill("int.hop", column=_text_of(ch[1]), row=_describe(ch[0]))
    if name in ("max", "min", "avg", "sum"):
        return _fill(f"int.agg.{name}", column=_text_of(ch[1]),
                     view=_describe(ch[0]))
    if name in ("nth_max", "nth_min", "nth_argmax", "nth_argmin"):
        return _fill(f"int.{name}", column=_text_of(ch[1]),
                     view=_describe(ch[0]), n=_text_of(ch[2]))
    if name in ("argmax", "argmin"):
        return _fill(f"int.{name}", column=_text_of(ch[1]),
                     view=_describe(ch[0]))
    if name in ("eq", "not_eq", "round_eq", "greater", "less", "diff"):
        return _fill(f"int.{name}", a=_describe(ch[0]), b=_describe(ch[1]))
    if name == "filter_all":
        return _fill("int.filter_all", view=_describe(ch[0]),
                     column=_text_of(ch[1]))
    if name.startswith("filter_"):
        return _fill("int.filter", view=_describe(ch[0]),
                     column=_text_of(ch[1]),
                     criterion=_crit(name[len("filter_"):]),
                     value=_text_of(ch[2]))
    if name.startswith(("all_", "most_")):
        quant, _, kind = name.partition("_")
        return _fill(f"int.{quant}", view=_describe(ch[0]),
                     column=_text_of(ch[1]), criterion=_crit(kind),
                     value=_text_of(ch[2]))
    raise Unclassifiable(name)
