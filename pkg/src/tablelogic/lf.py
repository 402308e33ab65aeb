"""Concrete syntax and program graph for table logical forms.

A program is a tree of function nodes and text-node leaves, serialized as
``name { arg ; arg ; ... }`` with whitespace-separated tokens.  An optional
trailing ``= true`` marker on the top level is accepted and discarded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


class LogicSyntaxError(Exception):
    """Malformed serialized program; carries the failing token offset."""

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} (at token offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class TextNode:
    text: str


@dataclass(frozen=True)
class FuncNode:
    name: str
    children: tuple["Node", ...]


Node = Union[FuncNode, TextNode]


@dataclass(frozen=True)
class NodeStats:
    """Size measures for one program.

    total/function/text count plain tree nodes.  The graph_* fields count
    nodes in the shared-subtree form (identical function subtrees merged,
    text leaves per remaining occurrence, plus one root result node) used
    for whole-corpus averages.
    """

    total_nodes: int
    function_nodes: int
    text_nodes: int
    linearized_length: int
    graph_nodes: int
    graph_function_nodes: int


def parse_logic_str(text: str) -> FuncNode:
    """Parse a serialized program.  Inverse of print_logic_str."""
    toks = text.split()
    if toks[-2:] == ["=", "true"]:
        toks = toks[:-2]
    if not toks:
        raise LogicSyntaxError("empty program", 0)
    pos = 0

    def expr() -> Node:
        nonlocal pos
        if pos + 1 < len(toks) and toks[pos + 1] == "{":
            name = toks[pos]
            if name in ("{", "}", ";"):
                raise LogicSyntaxError("function name expected", pos)
            pos += 2
            children = [expr()]
            while pos < len(toks) and toks[pos] == ";":
                pos += 1
                children.append(expr())
            if pos >= len(toks) or toks[pos] != "}":
                raise LogicSyntaxError("unbalanced braces", pos)
            pos += 1
            return FuncNode(name, tuple(children))
        atoms = []
        while pos < len(toks) and toks[pos] not in (";", "}"):
            if toks[pos] == "{":
                raise LogicSyntaxError("unexpected '{'", pos)
            atoms.append(toks[pos])
            pos += 1
        # blank-header columns serialize as empty arguments ("; ;")
        return TextNode(" ".join(atoms))

    root = expr()
    if pos != len(toks):
        raise LogicSyntaxError("trailing tokens after program", pos)
    if not isinstance(root, FuncNode):
        raise LogicSyntaxError("a bare text node is not a program", 0)
    return root


def print_logic_str(ast: Node) -> str:
    """Canonical serialization: tokens joined by single spaces."""
    return " ".join(linearize(ast))


def linearize(ast: Node) -> list[str]:
    """Depth-first token emission; text nodes split on whitespace."""
    out: list[str] = []

    def emit(node: Node) -> None:
        if isinstance(node, TextNode):
            out.extend(node.text.split())
            return
        out.append(node.name)
        out.append("{")
        for i, child in enumerate(node.children):
            if i:
                out.append(";")
            emit(child)
        out.append("}")

    emit(ast)
    return out


def iter_nodes(ast: Node) -> Iterator[Node]:
    yield ast
    if isinstance(ast, FuncNode):
        for child in ast.children:
            yield from iter_nodes(child)


def iter_func_nodes(ast: Node) -> Iterator[FuncNode]:
    for node in iter_nodes(ast):
        if isinstance(node, FuncNode):
            yield node


def node_stats(ast: Node) -> NodeStats:
    total = func = text = 0
    for node in iter_nodes(ast):
        total += 1
        if isinstance(node, FuncNode):
            func += 1
        else:
            text += 1
    graph_total, graph_func = _graph_counts(ast)
    return NodeStats(
        total_nodes=total,
        function_nodes=func,
        text_nodes=text,
        linearized_length=len(linearize(ast)),
        graph_nodes=graph_total,
        graph_function_nodes=graph_func,
    )


def _graph_counts(ast: Node) -> tuple[int, int]:
    """Node counts in shared-subtree form: a repeated function subtree is
    one node; text leaves count once per surviving parent edge; plus one
    root result node."""
    seen: set[FuncNode] = set()
    count = 0

    def visit(node: Node) -> None:
        nonlocal count
        if isinstance(node, TextNode):
            count += 1
            return
        if node in seen:
            return
        seen.add(node)
        count += 1
        for child in node.children:
            visit(child)

    visit(ast)
    return count + 1, len(seen)
