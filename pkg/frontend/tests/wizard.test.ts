/** End-to-end wizard tests against a real service process.
 *
 * A `tablelogic serve` instance is spawned on a free port with an empty
 * data directory, so it serves its bundled fixture table.  The tests
 * drive the same Client/Wizard code the page uses.
 */

import { type ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiError, Client } from "../src/api.js";
import { countNodes, parseProgram } from "../src/graph.js";
import { Wizard, WizardError } from "../src/wizard.js";

const GOLDEN_SUPERLATIVE =
  "and { eq { hop { argmax { all_rows ; joined } ; country } ; angola } ; " +
  "eq { hop { argmax { all_rows ; joined } ; region } ; africa } }";

let server: ChildProcess;
let client: Client;
let dataDir: string;

beforeAll(async () => {
  const port = 8300 + Math.floor(Math.random() * 500);
  dataDir = mkdtempSync(join(tmpdir(), "wizard-"));
  server = spawn("tablelogic", ["serve", "--port", String(port),
                                "--data", dataDir],
                 { stdio: "ignore" });
  client = new Client(`http://127.0.0.1:${port}`);
  for (let i = 0; ; i += 1) {
    try {
      await client.listTables();
      break;
    } catch {
      if (i > 100) throw new Error("service did not come up");
      await new Promise((r) => setTimeout(r, 100));
    }
  }
}, 30_000);

afterAll(() => {
  server.kill();
});

describe("superlative flow", () => {
  it("walks the question sequence to the golden program and finalizes", async () => {
    const wizard = new Wizard(client);
    const { tables } = await client.listTables();
    expect(tables).toContain("opec_2012");

    await wizard.start("opec_2012", "superlative");
    expect(wizard.state.preview).toBeNull();
    expect(wizard.canFinalize).toBe(false);

    const script: Record<string, string | boolean | string[]> = {
      scope: "all",
      column: "joined",
      kind: "maximum",
      row: "angola",
      other_columns: ["region"],
      value_mentioned: false,
    };
    while (wizard.currentQuestion !== null) {
      const q = wizard.currentQuestion;
      expect(script).toHaveProperty(q.id);
      await wizard.answerCurrent(script[q.id]!);
    }

    const preview = wizard.state.preview!;
    expect(preview.logic_str).toBe(GOLDEN_SUPERLATIVE);
    expect(wizard.verdict).toBe(true);
    expect(wizard.canFinalize).toBe(true);
    // the client-side graph agrees with the service node counts
    const counts = countNodes(parseProgram(preview.logic_str!));
    expect(counts.func).toBe(preview.node_stats!.function_nodes);
    expect(counts.total).toBe(preview.node_stats!.total_nodes);

    const result = await wizard.finalize(
      "angola is the latest country to join opec .",
    );
    expect(result.logic_type).toBe("superlative");
    expect(result.logic_str.endsWith(" = true")).toBe(true);
    expect(result.exec_result).toBe(true);

    // the finalized string reparses and still executes true server-side
    const reparsed = await client.parse(result.logic_str);
    expect(reparsed.node_stats.function_nodes).toBe(7);
    const run = await client.execute(result.logic_str, "opec_2012");
    expect(run.value).toBe(true);

    expect(wizard.state.finalized).toBe(true);
    expect(wizard.canFinalize).toBe(false);
    const saved = readFileSync(join(dataDir, "annotations.jsonl"), "utf8");
    expect(JSON.parse(saved.split("\n")[0]!).logic_type).toBe("superlative");
  });
});

describe("finalize gating", () => {
  it("blocks finalize while the verdict is false", async () => {
    const wizard = new Wizard(client);
    await wizard.start("opec_2012", "count");
    for (const [qid, val] of Object.entries({
      scope: "all",
      column: "region",
      criterion: "equal",
      value: "africa",
      result: "9", // wrong on purpose: only 4 rows match
    })) {
      await wizard.answer(qid, val);
    }
    expect(wizard.verdict).toBe(false);
    expect(wizard.canFinalize).toBe(false);
    await expect(wizard.finalize()).rejects.toThrow(WizardError);

    // even bypassing the wizard, the service refuses
    const { session_id, revision } = wizard.state;
    const err = await client
      .finalize(session_id, revision)
      .then(() => null, (e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(422);
    expect((err as ApiError).code).toBe("execution_false");

    // correcting the answer opens the gate
    await wizard.answer("result", "4");
    expect(wizard.verdict).toBe(true);
    expect(wizard.canFinalize).toBe(true);
  });
});

describe("state lives on the service", () => {
  it("a fresh wizard attach restores the full session", async () => {
    const first = new Wizard(client);
    await first.start("opec_2012", "count");
    await first.answer("scope", "all");
    await first.answer("column", "country");

    const second = new Wizard(client); // simulates a page reload
    await second.attach(first.state.session_id);
    expect(second.state).toEqual(first.state);
    expect(second.currentQuestion?.id).toBe("criterion");
  });

  it("surfaces edit conflicts and resyncs instead of retrying", async () => {
    const a = new Wizard(client);
    await a.start("opec_2012", "count");
    const b = new Wizard(client);
    await b.attach(a.state.session_id);

    await a.answer("scope", "all"); // b's revision is now stale
    const err = await b
      .answer("column", "region")
      .then(() => null, (e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(409);
    // b resynced to the post-conflict truth before rethrowing
    expect(b.state.revision).toBe(a.state.revision);
    expect(b.state.answers).toHaveProperty("scope");
  });
});
