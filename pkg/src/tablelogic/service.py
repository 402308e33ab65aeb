"""HTTP annotation service.

Stateless program endpoints (/parse, /typecheck, /execute, /realize,
/interpret) plus stateful derivation sessions driving the annotation
wizard.  Sessions live in memory, expire after an idle timeout, and
reject concurrent mutation via a per-session revision token.
"""

from __future__ import annotations

import itertools
import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Any, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .lf import LogicSyntaxError, node_stats, parse_logic_str, print_logic_str
from .logic_types import (AnswerRecord, DerivationError, LogicType, Question,
                          UnbuildableCriterion, build_from_answers,
                          question_set)
from .realization import interpret, realize_template
from .semantics import (EvalError, Evaluator, ExecConfig, TypecheckError,
                        typecheck)
from .tables import Table, TableError, load_table, load_table_file

SESSION_IDLE_SECONDS = 30 * 60


class ParseBody(BaseModel):
    logic_str: str


class ExecuteBody(BaseModel):
    logic_str: str
    table_id: Optional[str] = None
    table: Optional[dict] = None
    config: Optional[dict] = None


class RealizeBody(BaseModel):
    logic_str: str
    table_id: Optional[str] = None
    table: Optional[dict] = None


class SessionBody(BaseModel):
    table_id: str
    logic_type: str


class AnswerBody(BaseModel):
    question_id: str
    answer: Any
    revision: Optional[int] = None


class FinalizeBody(BaseModel):
    sentence: Optional[str] = None
    revision: Optional[int] = None


@dataclass
class Session:
    session_id: str
    table: Table
    record: AnswerRecord
    revision: int = 0
    touched: float = field(default_factory=time.monotonic)
    lock: threading.Lock = field(default_factory=threading.Lock)
    finalized: bool = False


def _error(status: int, code: str, message: str) -> HTTPException:
    return HTTPException(status_code=status,
                         detail={"code": code, "message": message})


def _question_json(q: Question) -> dict:
    return {"id": q.id, "prompt": q.prompt, "answer_kind": q.answer_kind,
            "choices": list(q.choices), "depends_on": q.depends_on}


def create_app(data_dir: Optional[str] = None,
               config_path: Optional[str] = None) -> FastAPI:
    data_dir = data_dir or os.environ.get("TABLELOGIC_DATA")
    config_path = config_path or os.environ.get("TABLELOGIC_EXEC_CONFIG")
    cfg = ExecConfig.from_file(config_path) if config_path else ExecConfig()
    annotations_path = os.path.join(data_dir or ".", "annotations.jsonl")

    app = FastAPI(title="tablelogic annotation service")
    tables: dict[str, Table] = {}
    sessions: dict[str, Session] = {}
    sessions_lock = threading.Lock()

    if data_dir and os.path.isdir(data_dir):
        for name in sorted(os.listdir(data_dir)):
            if name.endswith(".json"):
                try:
                    t = load_table_file(os.path.join(data_dir, name))
                    tables[t.table_id] = t
                except (TableError, ValueError):
                    pass
    if not tables:
        fixture = os.path.join(os.path.dirname(__file__),
                               "fixtures", "opec_2012.json")
        t = load_table_file(fixture)
        tables[t.table_id] = t

    def _table_for(body) -> Table:
        if body.table is not None:
            try:
                return load_table(body.table)
            except TableError as exc:
                raise _error(400, "bad_table", str(exc))
        if body.table_id is not None:
            t = tables.get(body.table_id)
            if t is None:
                raise _error(404, "unknown_table", body.table_id)
            return t
        raise _error(400, "missing_table", "need table_id or inline table")

    def _parse(logic_str: str):
        try:
            return parse_logic_str(logic_str)
        except LogicSyntaxError as exc:
            raise _error(400, "syntax_error", str(exc))

    def _session(session_id: str) -> Session:
        with sessions_lock:
            now = time.monotonic()
            for sid in [s for s, ses in sessions.items()
                        if now - ses.touched > SESSION_IDLE_SECONDS]:
                del sessions[sid]
            ses = sessions.get(session_id)
        if ses is None:
            raise _error(404, "unknown_session", session_id)
        ses.touched = time.monotonic()
        return ses

    def _askable(ses: Session) -> list[Question]:
        out = []
        for q in question_set(ses.record.logic_type):
            if q.id in ses.record.answers:
                continue
            if q.depends_on is not None:
                trigger_id, trigger_value = q.depends_on
                if ses.record.answers.get(trigger_id) != trigger_value:
                    continue
            out.append(q)
        return out

    def _preview(ses: Session) -> Optional[dict]:
        if ses.record.missing():
            return None
        try:
            ast = build_from_answers(ses.record, ses.table)
        except DerivationError as exc:
            return {"error": str(exc)}
        verdict = Evaluator(ses.table, cfg).run(ast)
        return {
            "logic_str": print_logic_str(ast),
            "interpretation": interpret(ast),
            "exec_result": verdict is True,
            "node_stats": node_stats(ast).__dict__,
        }

    def _session_json(ses: Session) -> dict:
        askable = _askable(ses)
        return {
            "session_id": ses.session_id,
            "table_id": ses.table.table_id,
            "logic_type": ses.record.logic_type.value,
            "revision": ses.revision,
            "answers": ses.record.answers,
            "pending": [_question_json(q) for q in askable],
            "next_question": _question_json(askable[0]) if askable else None,
            "preview": _preview(ses),
            "finalized": ses.finalized,
        }

    @app.get("/tables")
    def list_tables():
        return {"tables": sorted(tables)}

    @app.get("/tables/{table_id}")
    def get_table(table_id: str):
        t = tables.get(table_id)
        if t is None:
            raise _error(404, "unknown_table", table_id)
        return {"table_id": t.table_id, "caption": t.caption,
                "columns": list(t.columns),
                "rows": [[c.raw for c in row] for row in t.rows]}

    @app.get("/logic-types")
    def logic_types():
        return {lt.value: [_question_json(q) for q in question_set(lt)]
                for lt in LogicType}

    @app.post("/parse")
    def parse(body: ParseBody):
        ast = _parse(body.logic_str)
        return {"logic_str": print_logic_str(ast),
                "node_stats": node_stats(ast).__dict__}

    @app.post("/typecheck")
    def typecheck_ep(body: ParseBody):
        ast = _parse(body.logic_str)
        try:
            typed = typecheck(ast)
        except TypecheckError as exc:
            raise _error(422, "typecheck_error", str(exc))
        return {"result_type": typed.result_type.value}

    @app.post("/execute")
    def execute(body: ExecuteBody):
        ast = _parse(body.logic_str)
        try:
            typecheck(ast)
        except TypecheckError as exc:
            raise _error(422, "typecheck_error", str(exc))
        table = _table_for(body)
        run_cfg = ExecConfig(**body.config) if body.config else cfg
        log: list[str] = []
        try:
            value = Evaluator(table, run_cfg, log).run(ast)
        except EvalError as exc:
            raise _error(422, "eval_error",
                         f"{type(exc).__name__}: {exc}")
        out = value if isinstance(value, bool) else getattr(
            value, "text", str(value))
        return {"value": out, "trace": log}

    @app.post("/realize")
    def realize(body: RealizeBody):
        ast = _parse(body.logic_str)
        table = _table_for(body)
        return {"text": realize_template(ast, table)}

    @app.post("/interpret")
    def interpret_ep(body: ParseBody):
        return {"text": interpret(_parse(body.logic_str))}

    @app.post("/sessions")
    def create_session(body: SessionBody):
        t = tables.get(body.table_id)
        if t is None:
            raise _error(404, "unknown_table", body.table_id)
        try:
            lt = LogicType(body.logic_type)
        except ValueError:
            raise _error(400, "unknown_logic_type", body.logic_type)
        ses = Session(session_id=uuid.uuid4().hex, table=t,
                      record=AnswerRecord(lt))
        with sessions_lock:
            sessions[ses.session_id] = ses
        return _session_json(ses)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_json(_session(session_id))

    @app.post("/sessions/{session_id}/answers")
    def answer(session_id: str, body: AnswerBody):
        ses = _session(session_id)
        with ses.lock:
            if body.revision is not None and body.revision != ses.revision:
                raise _error(409, "conflict",
                             f"session at revision {ses.revision}, "
                             f"request at {body.revision}")
            # an already-answered question may be answered again so a
            # false verdict can be repaired without starting over
            candidates = {q.id: q for q in _askable(ses)}
            for q in question_set(ses.record.logic_type):
                if q.id in ses.record.answers:
                    candidates[q.id] = q
            q = candidates.get(body.question_id)
            if q is None:
                raise _error(422, "question_not_askable", body.question_id)
            value = body.answer
            if q.answer_kind == "bool" and not isinstance(value, bool):
                raise _error(422, "wrong_answer_type", "expected a boolean")
            if q.answer_kind == "columns":
                if not isinstance(value, list):
                    raise _error(422, "wrong_answer_type",
                                 "expected a list of column names")
            elif q.answer_kind != "bool" and not isinstance(value, str):
                raise _error(422, "wrong_answer_type", "expected a string")
            if q.choices and value not in q.choices:
                raise _error(422, "wrong_answer_type",
                             f"expected one of {list(q.choices)}")
            ses.record.answers[q.id] = value
            # drop follow-up answers whose trigger no longer holds
            for other in question_set(ses.record.logic_type):
                if other.depends_on is None:
                    continue
                trigger_id, trigger_value = other.depends_on
                if (other.id in ses.record.answers
                        and ses.record.answers.get(trigger_id)
                        != trigger_value):
                    del ses.record.answers[other.id]
            ses.revision += 1
        return _session_json(ses)

    @app.post("/sessions/{session_id}/finalize")
    def finalize(session_id: str, body: FinalizeBody):
        ses = _session(session_id)
        with ses.lock:
            if body.revision is not None and body.revision != ses.revision:
                raise _error(409, "conflict",
                             f"session at revision {ses.revision}")
            missing = ses.record.missing()
            if missing:
                raise _error(422, "incomplete_session",
                             f"unanswered: {', '.join(missing)}")
            try:
                ast = build_from_answers(ses.record, ses.table)
            except UnbuildableCriterion as exc:
                raise _error(422, "unbuildable", str(exc))
            except DerivationError as exc:
                raise _error(422, "derivation_error", str(exc))
            verdict = Evaluator(ses.table, cfg).run(ast)
            if verdict is not True:
                raise _error(422, "execution_false",
                             "program does not evaluate true")
            ses.finalized = True
            record = {
                "table_id": ses.table.table_id,
                "logic_type": ses.record.logic_type.value,
                "logic_str": print_logic_str(ast) + " = true",
                "interpretation": interpret(ast),
                "sentence": body.sentence or "",
            }
        try:
            with open(annotations_path, "a", encoding="utf-8") as f:
                import json as _json
                f.write(_json.dumps(record) + "\n")
        except OSError:
            pass
        return {"logic_str": record["logic_str"],
                "logic_type": record["logic_type"],
                "interpretation": record["interpretation"],
                "exec_result": True}

    return app
