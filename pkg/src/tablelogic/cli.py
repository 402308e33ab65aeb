"""Command-line front door.

Exit codes: 0 success, 1 domain error (bad program, failed validation
target, execution false is still 0 -- it prints "false"), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .dataset import (bleu4, check_splits, compute_stats, export_model_input,
                      load_dataset, rouge, validate_dataset)
from .lf import (LogicSyntaxError, linearize, node_stats, parse_logic_str,
                 print_logic_str)
from .logic_types import (LogicType, Unclassifiable, classify, question_set)
from .realization import interpret, realize_template
from .semantics import (EvalError, Evaluator, ExecConfig, TypecheckError,
                        typecheck)
from .tables import TableError, load_table_file


class _Abort(Exception):
    """Domain error carrying the message to print on stderr."""


def _load_cfg(path) -> ExecConfig:
    return ExecConfig.from_file(path) if path else ExecConfig()


def _parse_program(text: str):
    try:
        return parse_logic_str(text)
    except LogicSyntaxError as exc:
        raise _Abort(f"syntax error: {exc}")


def _cmd_parse(args) -> int:
    ast = _parse_program(args.logic)
    st = node_stats(ast)
    print(print_logic_str(ast))
    print(f"nodes: {st.total_nodes} ({st.function_nodes} function, "
          f"{st.text_nodes} text)")
    return 0


def _cmd_check(args) -> int:
    ast = _parse_program(args.logic)
    try:
        typed = typecheck(ast)
    except TypecheckError as exc:
        raise _Abort(f"typecheck failed: {exc}")
    print(f"ok: {typed.result_type.value}")
    return 0


def _cmd_exec(args) -> int:
    ast = _parse_program(args.logic)
    try:
        typecheck(ast)
        table = load_table_file(args.table)
        result = Evaluator(table, _load_cfg(args.config)).run(ast)
    except (TypecheckError, EvalError, TableError, OSError) as exc:
        raise _Abort(str(exc))
    if isinstance(result, bool):
        print("true" if result else "false")
    else:
        print(getattr(result, "text", result))
    return 0


def _cmd_classify(args) -> int:
    ast = _parse_program(args.logic)
    try:
        print(classify(ast).value)
    except Unclassifiable as exc:
        raise _Abort(f"unclassifiable: {exc}")
    return 0


def _cmd_realize(args) -> int:
    ast = _parse_program(args.logic)
    try:
        table = load_table_file(args.table)
        print(realize_template(ast, table))
    except (Unclassifiable, TableError, OSError) as exc:
        raise _Abort(str(exc))
    return 0


def _cmd_interpret(args) -> int:
    print(interpret(_parse_program(args.logic)))
    return 0


def _cmd_linearize(args) -> int:
    print(" ".join(linearize(_parse_program(args.logic))))
    return 0


def _cmd_validate(args) -> int:
    res = load_dataset(args.data)
    for err in res.errors:
        print(f"load error: {err}", file=sys.stderr)
    report = validate_dataset(res.examples, _load_cfg(args.config))
    print(report.summary())
    if args.failures:
        for f in report.failures:
            print(f"[{f.stage}] {f.table_id}  {f.logic_str}")
            print(f"    {f.diagnostic}")
    return 0 if report.exec_true_rate >= args.min_rate else 1


def _cmd_stats(args) -> int:
    res = load_dataset(args.data)
    print(compute_stats(res.examples).summary())
    return 0


def _cmd_splits(args) -> int:
    res = load_dataset(args.data)
    report = check_splits(res.examples)
    print(json.dumps(report, indent=2))
    return 0 if not report["overlapping_tables"] else 1


def _cmd_export_inputs(args) -> int:
    res = load_dataset(args.data)
    out = sys.stdout if args.out == "-" else open(args.out, "w")
    try:
        for ex in res.examples:
            mi = export_model_input(ex, content_cap=args.content_cap)
            print(" ".join(mi.tokens()), file=out)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _read_lines(path) -> list[str]:
    with open(path, encoding="utf-8") as f:
        return [line.rstrip("\n") for line in f]


def _cmd_score(args) -> int:
    cands, refs = _read_lines(args.cand), _read_lines(args.ref)
    if args.metric == "bleu4":
        value = bleu4(cands, refs)
    else:
        value = rouge(cands, refs, args.metric[len("rouge"):])
    print(f"{value:.2f}")
    return 0


def _cmd_derive(args) -> int:
    table = load_table_file(args.table)
    lt = LogicType(args.logic_type)
    from .logic_types import AnswerRecord, build_from_answers, validate_answers
    rec = AnswerRecord(lt)
    print(f"deriving a {lt.value} program over {table.table_id!r}; "
          "answer each question (blank = n/a)")
    for q in question_set(lt):
        if q.depends_on is not None:
            trigger_id, trigger_value = q.depends_on
            if rec.answers.get(trigger_id) != trigger_value:
                continue
        prompt = q.prompt
        if q.choices:
            prompt += f" [{'/'.join(q.choices)}]"
        raw = input(f"{prompt}\n> ").strip()
        if q.answer_kind == "columns":
            rec.answers[q.id] = ([] if raw.lower() in ("", "n/a")
                                 else [c.strip() for c in raw.split(";")])
        elif q.answer_kind == "bool":
            rec.answers[q.id] = raw.lower() in ("y", "yes", "true")
        else:
            rec.answers[q.id] = raw
    issues = validate_answers(rec, table)
    if issues:
        for issue in issues:
            print(f"issue: {issue}")
        return 1
    ast = build_from_answers(rec, table)
    print(print_logic_str(ast))
    print(interpret(ast))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn
    from .service import create_app
    app = create_app(data_dir=args.data, config_path=args.config)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tablelogic",
                                description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, fn, **kwargs):
        sp = sub.add_parser(name, **kwargs)
        sp.set_defaults(fn=fn)
        return sp

    sp = cmd("parse", _cmd_parse, help="parse and echo a program")
    sp.add_argument("logic")
    sp = cmd("check", _cmd_check, help="typecheck a program")
    sp.add_argument("logic")
    sp = cmd("exec", _cmd_exec, help="execute a program against a table")
    sp.add_argument("--table", required=True)
    sp.add_argument("--logic", required=True)
    sp.add_argument("--config")
    sp = cmd("classify", _cmd_classify, help="logic type of a program")
    sp.add_argument("logic")
    sp = cmd("realize", _cmd_realize, help="template surface for a program")
    sp.add_argument("--table", required=True)
    sp.add_argument("--logic", required=True)
    sp = cmd("interpret", _cmd_interpret,
             help="literal reading of a program")
    sp.add_argument("logic")
    sp = cmd("linearize", _cmd_linearize, help="token serialization")
    sp.add_argument("logic")
    sp = cmd("validate", _cmd_validate, help="run the corpus validation")
    sp.add_argument("--data", required=True)
    sp.add_argument("--config")
    sp.add_argument("--failures", action="store_true")
    sp.add_argument("--min-rate", type=float, default=0.0)
    sp = cmd("stats", _cmd_stats, help="corpus statistics")
    sp.add_argument("--data", required=True)
    sp = cmd("splits", _cmd_splits, help="split sizes and overlap check")
    sp.add_argument("--data", required=True)
    sp = cmd("export-inputs", _cmd_export_inputs,
             help="serialize model input contexts")
    sp.add_argument("--data", required=True)
    sp.add_argument("--out", default="-")
    sp.add_argument("--content-cap", type=int, default=200)
    sp = cmd("score", _cmd_score, help="corpus metric between two files")
    sp.add_argument("--metric", required=True,
                    choices=["bleu4", "rouge1", "rouge2", "rouge4", "rougeL"])
    sp.add_argument("--cand", required=True)
    sp.add_argument("--ref", required=True)
    sp = cmd("derive", _cmd_derive, help="interactive program derivation")
    sp.add_argument("--table", required=True)
    sp.add_argument("--logic-type", required=True,
                    choices=[lt.value for lt in LogicType])
    sp = cmd("serve", _cmd_serve, help="run the annotation HTTP service")
    sp.add_argument("--data")
    sp.add_argument("--config")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8000)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except _Abort as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
