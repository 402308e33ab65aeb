/** The derivation conversation as a state machine over the service API.
 *
 * The browser never owns state: every mutation round-trips through the
 * service and the local snapshot is replaced wholesale, so a page reload
 * (refresh()) reconstructs exactly what the service knows.
 */

import {
  AnswerValue,
  ApiError,
  Client,
  Question,
  SessionState,
} from "./api.js";

export class WizardError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "WizardError";
  }
}

export class Wizard {
  private snapshot: SessionState | null = null;

  constructor(private readonly client: Client) {}

  get state(): SessionState {
    if (this.snapshot === null) {
      throw new WizardError("no active session");
    }
    return this.snapshot;
  }

  get currentQuestion(): Question | null {
    return this.state.next_question;
  }

  /** All questions still to answer, in the order they will be asked. */
  get pendingQuestions(): Question[] {
    return this.state.pending;
  }

  get verdict(): boolean | null {
    const preview = this.state.preview;
    if (preview === null || preview.exec_result === undefined) return null;
    return preview.exec_result;
  }

  /** The execution gate: finalize is only offered on a green verdict. */
  get canFinalize(): boolean {
    return (
      this.state.pending.length === 0 &&
      this.verdict === true &&
      !this.state.finalized
    );
  }

  async start(tableId: string, logicType: string): Promise<SessionState> {
    this.snapshot = await this.client.createSession(tableId, logicType);
    return this.snapshot;
  }

  /** Re-attach to an existing session (page reload / second tab). */
  async attach(sessionId: string): Promise<SessionState> {
    this.snapshot = await this.client.getSession(sessionId);
    return this.snapshot;
  }

  async refresh(): Promise<SessionState> {
    return this.attach(this.state.session_id);
  }

  async answerCurrent(value: AnswerValue): Promise<SessionState> {
    const question = this.currentQuestion;
    if (question === null) {
      throw new WizardError("all questions are answered");
    }
    return this.answer(question.id, value);
  }

  async answer(questionId: string, value: AnswerValue): Promise<SessionState> {
    const { session_id, revision } = this.state;
    try {
      this.snapshot = await this.client.answer(
        session_id,
        questionId,
        value,
        revision,
      );
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // someone else moved the session; resync so the caller can see
        // the real state, then surface the conflict (never retry blind)
        await this.refresh();
      }
      throw err;
    }
    return this.snapshot;
  }

  async finalize(sentence?: string) {
    if (!this.canFinalize) {
      throw new WizardError(
        this.verdict === false
          ? "the program does not execute true; fix the answers first"
          : "the session is not ready to finalize",
      );
    }
    const result = await this.client.finalize(
      this.state.session_id,
      this.state.revision,
      sentence,
    );
    await this.refresh();
    return result;
  }
}
