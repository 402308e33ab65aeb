/** Typed client for the tablelogic annotation service HTTP API. */

export interface NodeStats {
  total_nodes: number;
  function_nodes: number;
  text_nodes: number;
  linearized_length: number;
  graph_nodes: number;
  graph_function_nodes: number;
}

export interface Question {
  id: string;
  prompt: string;
  answer_kind: "choice" | "column" | "row" | "value" | "bool" | "columns";
  choices: string[];
  depends_on: [string, unknown] | null;
}

export interface Preview {
  logic_str?: string;
  interpretation?: string;
  exec_result?: boolean;
  node_stats?: NodeStats;
  error?: string;
}

export interface SessionState {
  session_id: string;
  table_id: string;
  logic_type: string;
  revision: number;
  answers: Record<string, unknown>;
  pending: Question[];
  next_question: Question | null;
  preview: Preview | null;
  finalized: boolean;
}

export interface TableData {
  table_id: string;
  caption: string;
  columns: string[];
  rows: string[][];
}

export interface FinalizeResult {
  logic_str: string;
  logic_type: string;
  interpretation: string;
  exec_result: boolean;
}

export type AnswerValue = string | boolean | string[];

/** A structured error from the service, e.g. conflict or execution_false. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class Client {
  constructor(readonly baseUrl: string) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const res = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload: unknown = await res.json();
    if (!res.ok) {
      const detail = (payload as { detail?: { code?: string; message?: string } })
        .detail;
      throw new ApiError(
        res.status,
        detail?.code ?? "unknown_error",
        detail?.message ?? res.statusText,
      );
    }
    return payload as T;
  }

  listTables(): Promise<{ tables: string[] }> {
    return this.request("GET", "/tables");
  }

  getTable(tableId: string): Promise<TableData> {
    return this.request("GET", `/tables/${tableId}`);
  }

  logicTypes(): Promise<Record<string, Question[]>> {
    return this.request("GET", "/logic-types");
  }

  parse(logicStr: string): Promise<{ logic_str: string; node_stats: NodeStats }> {
    return this.request("POST", "/parse", { logic_str: logicStr });
  }

  execute(logicStr: string, tableId: string): Promise<{ value: unknown }> {
    return this.request("POST", "/execute", {
      logic_str: logicStr,
      table_id: tableId,
    });
  }

  createSession(tableId: string, logicType: string): Promise<SessionState> {
    return this.request("POST", "/sessions", {
      table_id: tableId,
      logic_type: logicType,
    });
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  answer(
    sessionId: string,
    questionId: string,
    answer: AnswerValue,
    revision: number,
  ): Promise<SessionState> {
    return this.request("POST", `/sessions/${sessionId}/answers`, {
      question_id: questionId,
      answer,
      revision,
    });
  }

  finalize(
    sessionId: string,
    revision: number,
    sentence?: string,
  ): Promise<FinalizeResult> {
    return this.request("POST", `/sessions/${sessionId}/finalize`, {
      revision,
      sentence,
    });
  }
}
