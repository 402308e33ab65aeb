/** Single-page wizard UI.  Everything goes through the service API; the
 * page can be reloaded at any point and re-attaches to the session named
 * in the URL hash. */

import { ApiError, Client, Question, TableData } from "./api.js";
import { renderGraph } from "./graph.js";
import { Wizard } from "./wizard.js";

const baseUrl =
  new URLSearchParams(location.search).get("api") ?? "http://127.0.0.1:8000";
const client = new Client(baseUrl);
const wizard = new Wizard(client);

const $ = (id: string) => document.getElementById(id)!;

let table: TableData | null = null;
let selectedRow: number | null = null;

function renderTable(): void {
  if (table === null) return;
  const head = table.columns.map((c) => `<th>${c}</th>`).join("");
  const body = table.rows
    .map((row, r) => {
      const cells = row.map((c) => `<td>${c}</td>`).join("");
      const cls = r === selectedRow ? ' class="selected"' : "";
      return `<tr data-row="${r}"${cls}>${cells}</tr>`;
    })
    .join("");
  $("table-view").innerHTML =
    `<caption>${table.caption}</caption>` +
    `<thead><tr>${head}</tr></thead><tbody>${body}</tbody>`;
  document.querySelectorAll("#table-view tbody tr").forEach((tr) => {
    tr.addEventListener("click", () => {
      selectedRow = Number((tr as HTMLElement).dataset.row);
      renderTable();
    });
  });
}

/** Widget per answer kind; column/row answers are bound to the table so
 * a nonexistent column cannot be entered. */
function answerWidget(q: Question): string {
  if (q.answer_kind === "choice") {
    return q.choices
      .map(
        (c) =>
          `<label><input type="radio" name="answer" value="${c}">${c}</label>`,
      )
      .join(" ");
  }
  if (q.answer_kind === "column") {
    const opts = table!.columns
      .map((c) => `<option value="${c}">${c}</option>`)
      .join("");
    return `<select name="answer">${opts}</select>`;
  }
  if (q.answer_kind === "columns") {
    return table!.columns
      .map(
        (c) =>
          `<label><input type="checkbox" name="answer" value="${c}">${c}</label>`,
      )
      .join(" ");
  }
  if (q.answer_kind === "bool") {
    return (
      `<label><input type="radio" name="answer" value="true">yes</label>` +
      `<label><input type="radio" name="answer" value="false">no</label>`
    );
  }
  if (q.answer_kind === "row") {
    return `<em>click the row in the table, then submit</em>`;
  }
  return `<input type="text" name="answer">`;
}

function readAnswer(q: Question): string | boolean | string[] | null {
  const form = $("question-form") as HTMLFormElement;
  if (q.answer_kind === "row") {
    if (selectedRow === null || table === null) return null;
    return table.rows[selectedRow]![0]!;
  }
  if (q.answer_kind === "columns") {
    return Array.from(
      form.querySelectorAll<HTMLInputElement>("input[name=answer]:checked"),
    ).map((el) => el.value);
  }
  if (q.answer_kind === "bool") {
    const el = form.querySelector<HTMLInputElement>(
      "input[name=answer]:checked",
    );
    return el === null ? null : el.value === "true";
  }
  const el = form.querySelector<HTMLInputElement | HTMLSelectElement>(
    "[name=answer]:checked, select[name=answer], input[type=text][name=answer]",
  );
  return el === null || el.value === "" ? null : el.value;
}

function showError(message: string): void {
  $("error").textContent = message;
}

function render(): void {
  const s = wizard.state;
  location.hash = s.session_id;
  const q = wizard.currentQuestion;
  if (q !== null) {
    $("question-prompt").textContent = q.prompt;
    $("question-widget").innerHTML = answerWidget(q);
  } else {
    $("question-prompt").textContent = s.finalized
      ? "annotation saved."
      : "all questions answered.";
    $("question-widget").innerHTML = "";
  }
  const preview = s.preview;
  $("program-view").innerHTML = renderGraph(preview?.logic_str ?? null);
  $("interpretation").textContent = preview?.interpretation ?? "";
  const banner = $("verdict");
  if (wizard.verdict === null) {
    banner.textContent = "";
    banner.className = "";
  } else {
    banner.textContent = wizard.verdict
      ? "executes true"
      : "executes false - revisit your answers";
    banner.className = wizard.verdict ? "verdict-true" : "verdict-false";
  }
  ($("finalize") as HTMLButtonElement).disabled = !wizard.canFinalize;
  showError(preview?.error ?? "");
}

async function startSession(): Promise<void> {
  const tableId = ($("table-picker") as HTMLSelectElement).value;
  const logicType = ($("type-picker") as HTMLSelectElement).value;
  table = await client.getTable(tableId);
  selectedRow = null;
  renderTable();
  await wizard.start(tableId, logicType);
  render();
}

async function main(): Promise<void> {
  const { tables } = await client.listTables();
  $("table-picker").innerHTML = tables
    .map((t) => `<option value="${t}">${t}</option>`)
    .join("");
  const types = Object.keys(await client.logicTypes());
  $("type-picker").innerHTML = types
    .map((t) => `<option value="${t}">${t}</option>`)
    .join("");

  $("start").addEventListener("click", () => {
    startSession().catch((err) => showError(String(err)));
  });

  $("question-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    const q = wizard.currentQuestion;
    if (q === null) return;
    const value = readAnswer(q);
    if (value === null) {
      showError("answer the question first");
      return;
    }
    wizard
      .answerCurrent(value)
      .then(render)
      .catch((err) => {
        // conflicts and validation problems surface next to the question
        showError(err instanceof ApiError ? `${err.code}: ${err.message}` : String(err));
        render();
      });
  });

  $("finalize").addEventListener("click", () => {
    const sentence = ($("sentence") as HTMLInputElement).value;
    wizard
      .finalize(sentence || undefined)
      .then(render)
      .catch((err) => showError(String(err)));
  });

  // re-attach after a reload
  const existing = location.hash.slice(1);
  if (existing) {
    await wizard.attach(existing);
    table = await client.getTable(wizard.state.table_id);
    renderTable();
    render();
  }
}

main().catch((err) => showError(String(err)));
