"""Dataset ingestion, whole-corpus validation, statistics, and metrics.

Records arrive as JSON lines (optionally gzipped), one example per line.
The canonical field names are table_id, caption, columns, rows,
logic_type, logic_str, sentence, split; a field_map can rename them for
other releases of the same data.
"""

from __future__ import annotations

import collections
import gzip
import json
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .lf import FuncNode, node_stats, parse_logic_str
from .logic_types import LogicType, Unclassifiable, classify
from .semantics import EvalError, Evaluator, ExecConfig, TypecheckError, typecheck
from .tables import Table, load_table


class MissingField(Exception):
    pass


class EmptyCorpus(Exception):
    pass


DEFAULT_FIELD_MAP = {
    "table_id": "table_id", "caption": "caption", "columns": "columns",
    "rows": "rows", "logic_type": "logic_type", "logic_str": "logic_str",
    "sentence": "sentence", "split": "split",
}


@dataclass
class Example:
    table: Table
    logic_type: LogicType
    logic_str: str
    ast: FuncNode
    sentence: str
    split: str
    interpretation: Optional[str] = None


@dataclass
class LoadResult:
    examples: list[Example]
    errors: list[str] = field(default_factory=list)


def _open_text(path):
    if str(path).endswith(".gz"):
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, encoding="utf-8")


def load_dataset(path, field_map: Optional[dict[str, str]] = None,
                 strict: bool = False) -> LoadResult:
    """Load every .jsonl/.jsonl.gz under path (or the single file at path).

    Tables are deduplicated by content so repeated examples over one
    table share a single Table object.  Per-record failures are collected
    in the result, not raised, unless strict is set.
    """
    fmap = dict(DEFAULT_FIELD_MAP)
    if field_map:
        fmap.update(field_map)
    files: list[str]
    if os.path.isdir(path):
        files = sorted(
            os.path.join(path, f) for f in os.listdir(path)
            if f.endswith((".jsonl", ".jsonl.gz")))
    else:
        files = [path]
    tables: dict[tuple, Table] = {}
    out = LoadResult(examples=[])
    for fname in files:
        default_split = os.path.basename(fname).split(".")[0]
        with _open_text(fname) as f:
            for lineno, line in enumerate(f, 1):
                if not line.strip():
                    continue
                where = f"{fname}:{lineno}"
                try:
                    out.examples.append(
                        _to_example(json.loads(line), fmap, tables,
                                    default_split))
                except Exception as exc:
                    if strict:
                        raise
                    out.errors.append(f"{where}: {type(exc).__name__}: {exc}")
    return out


def _to_example(rec: dict, fmap: dict[str, str],
                tables: dict[tuple, Table], default_split: str) -> Example:
    def get(name: str, required: bool = True):
        key = fmap[name]
        if key not in rec:
            if required:
                raise MissingField(name)
            return None
        return rec[key]

    columns = get("columns")
    rows = get("rows")
    key = (get("table_id"), tuple(columns),
           tuple(tuple(r) for r in rows))
    if key not in tables:
        tables[key] = load_table({
            "table_id": get("table_id"), "caption": get("caption"),
            "columns": columns, "rows": rows})
    logic_str = get("logic_str")
    return Example(
        table=tables[key],
        logic_type=LogicType(get("logic_type")),
        logic_str=logic_str,
        ast=parse_logic_str(logic_str),
        sentence=get("sentence"),
        split=get("split", required=False) or default_split,
    )


# -- validation -------------------------------------------------------------

@dataclass
@dataclass
class Failure:
    index: int
    table_id: str
    logic_str: str
    stage: str      # parse | typecheck | exec_error | exec_false
    diagnostic: str


@dataclass
class ValidationReport:
    total: int = 0
    parse_ok: int = 0
    typecheck_ok: int = 0
    exec_true: int = 0
    exec_false: int = 0
    exec_error: int = 0
    per_type: dict[str, collections.Counter] = field(default_factory=dict)
    failures: list[Failure] = field(default_factory=list)

    @property
    def exec_true_rate(self) -> float:
        return self.exec_true / self.total if self.total else 0.0

    def summary(self) -> str:
        lines = [
            f"examples          {self.total}",
            f"parse ok          {self.parse_ok}",
            f"typecheck ok      {self.typecheck_ok}",
            f"exec true         {self.exec_true}"
            f"  ({100 * self.exec_true_rate:.3f}%)",
            f"exec false        {self.exec_false}",
            f"exec error        {self.exec_error}",
        ]
        for lt in sorted(self.per_type):
            c = self.per_type[lt]
            lines.append(f"  {lt:<12} true {c['exec_true']:>5}"
                         f"  false {c['exec_false']:>3}"
                         f"  error {c['exec_error']:>3}")
        return "\n".join(lines)


def _diagnose(ex: Example, verdict, log: list[str]) -> str:
    """Attribute a non-true outcome to a config knob or cell-parse gap."""
    names = {n.name for n in _walk(ex.ast)}
    hints = []
    if "round_eq" in names:
        hints.append("round_eq tolerance (ExecConfig.round_eq_relative_tol)")
    if any(n.startswith("most_") for n in names):
        hints.append("majority cutoff (ExecConfig.most_threshold)")
    for entry in log:
        if "skipped" in entry or "excluded" in entry:
            hints.append(f"cell-parse gap: {entry}")
    if not hints:
        hints.append("cell-parse gap: value/cell comparison mismatch")
    return "; ".join(hints)


def _walk(node):
    from .lf import iter_func_nodes
    return iter_func_nodes(node)


def validate_dataset(examples: Sequence[Example],
                     cfg: Optional[ExecConfig] = None) -> ValidationReport:
    cfg = cfg or ExecConfig()
    report = ValidationReport()
    for i, ex in enumerate(examples):
        report.total += 1
        tally = report.per_type.setdefault(
            ex.logic_type.value, collections.Counter())
        report.parse_ok += 1   # the loader already parsed ex.ast
        try:
            typecheck(ex.ast)
        except TypecheckError as exc:
            report.failures.append(Failure(
                i, ex.table.table_id, ex.logic_str, "typecheck", str(exc)))
            tally["typecheck_fail"] += 1
            continue
        report.typecheck_ok += 1
        log: list[str] = []
        try:
            verdict = Evaluator(ex.table, cfg, log).run(ex.ast)
        except EvalError as exc:
            report.exec_error += 1
            tally["exec_error"] += 1
            report.failures.append(Failure(
                i, ex.table.table_id, ex.logic_str, "exec_error",
                f"{type(exc).__name__}: {exc}"))
            continue
        if verdict is True:
            report.exec_true += 1
            tally["exec_true"] += 1
        else:
            report.exec_false += 1
            tally["exec_false"] += 1
            report.failures.append(Failure(
                i, ex.table.table_id, ex.logic_str, "exec_false",
                _diagnose(ex, verdict, log)))
    return report


# -- statistics -------------------------------------------------------------

@dataclass
class DatasetStats:
    n_examples: int
    n_tables: int
    vocab_size: int
    vocab_size_cased: int
    avg_sentence_len: float
    avg_total_nodes: float
    avg_function_nodes: float
    avg_linearized_len: float
    min_nodes: int
    max_nodes: int
    per_type_counts: dict[str, int]
    per_type_avg_nodes: dict[str, float]
    node_histogram: dict[int, int]

    def summary(self) -> str:
        lines = [
            f"examples            {self.n_examples}",
            f"tables              {self.n_tables}",
            f"vocabulary          {self.vocab_size}"
            f" (cased {self.vocab_size_cased})",
            f"avg sentence len    {self.avg_sentence_len:.2f}",
            f"avg nodes           {self.avg_total_nodes:.2f}",
            f"avg function nodes  {self.avg_function_nodes:.2f}",
            f"avg linearized len  {self.avg_linearized_len:.2f}",
            f"node count range    [{self.min_nodes}, {self.max_nodes}]",
        ]
        for lt, n in sorted(self.per_type_counts.items()):
            lines.append(f"  {lt:<12} {n:>5}"
                         f"  avg nodes {self.per_type_avg_nodes[lt]:.2f}")
        return "\n".join(lines)


def compute_stats(examples: Sequence[Example]) -> DatasetStats:
    """Whole-corpus statistics.

    Node averages use the shared-subtree graph form (repeated function
    subtrees merged, plus a root result node), which is how the programs
    are sized as graphs rather than trees.
    """
    vocab: set[str] = set()
    vocab_cased: set[str] = set()
    tables: set[tuple] = set()
    sent_len = nodes = fnodes = lin = 0
    min_nodes, max_nodes = 10 ** 9, 0
    per_type: collections.Counter = collections.Counter()
    per_type_nodes: collections.Counter = collections.Counter()
    hist: collections.Counter = collections.Counter()
    for ex in examples:
        toks = ex.sentence.split()
        sent_len += len(toks)
        vocab.update(t.lower() for t in toks)
        vocab_cased.update(toks)
        st = node_stats(ex.ast)
        nodes += st.graph_nodes
        fnodes += st.graph_function_nodes
        # serialized programs end with the "= true" verification marker
        lin += st.linearized_length + 2
        min_nodes = min(min_nodes, st.graph_nodes)
        max_nodes = max(max_nodes, st.graph_nodes)
        hist[st.graph_nodes] += 1
        per_type[ex.logic_type.value] += 1
        per_type_nodes[ex.logic_type.value] += st.graph_nodes
        t = ex.table
        tables.add((t.table_id, t.columns,
                    tuple(tuple(c.raw for c in row) for row in t.rows)))
    n = len(examples)
    if n == 0:
        raise EmptyCorpus("no examples")
    return DatasetStats(
        n_examples=n,
        n_tables=len(tables),
        vocab_size=len(vocab),
        vocab_size_cased=len(vocab_cased),
        avg_sentence_len=sent_len / n,
        avg_total_nodes=nodes / n,
        avg_function_nodes=fnodes / n,
        avg_linearized_len=lin / n,
        min_nodes=min_nodes,
        max_nodes=max_nodes,
        per_type_counts=dict(per_type),
        per_type_avg_nodes={lt: per_type_nodes[lt] / c
                            for lt, c in per_type.items()},
        node_histogram=dict(sorted(hist.items())),
    )


def check_splits(examples: Sequence[Example]) -> dict:
    """Split sizes plus any table shared between two splits."""
    sizes: collections.Counter = collections.Counter()
    by_table: dict[tuple, set[str]] = {}
    for ex in examples:
        sizes[ex.split] += 1
        t = ex.table
        key = (t.table_id, t.columns,
               tuple(tuple(c.raw for c in row) for row in t.rows))
        by_table.setdefault(key, set()).add(ex.split)
    overlaps = [key[0] for key, splits in by_table.items() if len(splits) > 1]
    return {"sizes": dict(sizes), "overlapping_tables": sorted(set(overlaps))}


# -- model input export -----------------------------------------------------

@dataclass
class ModelInput:
    caption: list[str]
    headers: list[str]
    content: list[str]
    logic: list[str]

    def tokens(self) -> list[str]:
        return (["<caption>"] + self.caption + ["<header>"] + self.headers
                + ["<content>"] + self.content + ["<logic>"] + self.logic)


def export_model_input(ex: Example, content_cap: int = 200) -> ModelInput:
    from .lf import linearize
    headers: list[str] = []
    for col in ex.table.columns:
        headers.extend(col.split() or ["<empty>"])
    content: list[str] = []
    done = False
    for row in ex.table.rows:
        for cell in row:
            toks = cell.raw.split()
            if len(content) + len(toks) > content_cap:
                done = True
                break
            content.extend(toks)
        if done:
            break
    return ModelInput(
        caption=ex.table.caption.split(),
        headers=headers,
        content=content,
        logic=linearize(ex.ast),
    )


# -- metrics ----------------------------------------------------------------

def _ngrams(tokens: Sequence[str], n: int) -> collections.Counter:
    return collections.Counter(
        tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu4(candidates: Sequence[str], references: Sequence[str]) -> float:
    """Corpus-level BLEU-4 (mteval definition), as a percentage."""
    if len(candidates) != len(references):
        raise ValueError("candidate/reference lists differ in length")
    if not candidates:
        raise EmptyCorpus("empty corpus")
    match = [0] * 4
    total = [0] * 4
    cand_len = ref_len = 0
    for cand, ref in zip(candidates, references):
        c, r = cand.split(), ref.split()
        cand_len += len(c)
        ref_len += len(r)
        for n in range(1, 5):
            cn, rn = _ngrams(c, n), _ngrams(r, n)
            total[n - 1] += max(len(c) - n + 1, 0)
            match[n - 1] += sum((cn & rn).values())
    if 0 in total or 0 in match:
        return 0.0
    log_precision = sum(math.log(m / t) for m, t in zip(match, total)) / 4
    bp = 1.0 if cand_len > ref_len else math.exp(1 - ref_len / max(cand_len, 1))
    return 100.0 * bp * math.exp(log_precision)


def _lcs_len(a: Sequence[str], b: Sequence[str]) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[-1]))
        prev = cur
    return prev[-1]


def rouge(candidates: Sequence[str], references: Sequence[str],
          variant: str = "L") -> float:
    """ROUGE F-measure as a percentage: variant "1", "2", "4", or "L".

    Corpus score is the mean of per-sentence F1 values.
    """
    if len(candidates) != len(references):
        raise ValueError("candidate/reference lists differ in length")
    if not candidates:
        raise EmptyCorpus("empty corpus")
    scores = []
    for cand, ref in zip(candidates, references):
        c, r = cand.split(), ref.split()
        if variant == "L":
            overlap = _lcs_len(c, r)
            c_total, r_total = len(c), len(r)
        else:
            n = int(variant)
            cn, rn = _ngrams(c, n), _ngrams(r, n)
            overlap = sum((cn & rn).values())
            c_total = max(len(c) - n + 1, 0)
            r_total = max(len(r) - n + 1, 0)
        if overlap == 0 or c_total == 0 or r_total == 0:
            scores.append(0.0)
            continue
        p, rec = overlap / c_total, overlap / r_total
        scores.append(2 * p * rec / (p + rec))
    return 100.0 * sum(scores) / len(scores)
