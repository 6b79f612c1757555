// Bridges UI events to the session service. No optimistic updates:
// state advances only when a server-acknowledged view comes back, and
// the resilience report is re-requested (debounced) after every edit.

import { Api, ApiError } from "./api.js";
import {
  attackPayload,
  mapServerError,
  validateAttackFields,
  type AttackFields,
  type FieldName,
} from "./attackForm.js";
import { Store } from "./state.js";
import type { AttackKind, CommandBody, SensorRef, SessionView } from "./types.js";

export type AttackResult =
  | { ok: true; session: SessionView }
  | { ok: false; errors: Partial<Record<FieldName, string>>; formError?: string };

export class Controller {
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    readonly api: Api,
    readonly store: Store,
    readonly debounceMs = 350,
  ) {}

  async open(inp: string, name: string): Promise<SessionView> {
    const session = await this.api.createSession(inp, name);
    this.store.setSession(session);
    await this.refreshReport();
    return session;
  }

  /** Apply one command; the acknowledged view replaces local state. */
  async send(body: CommandBody): Promise<SessionView> {
    this.store.setPending(true);
    try {
      const session = await this.api.command(this.sessionId(), body);
      this.store.setSession(session);
      this.scheduleReport();
      return session;
    } finally {
      this.store.setPending(false);
    }
  }

  addNode(id: string, sensors: SensorRef[] = [], actuators: string[] = []) {
    return this.send({ kind: "add_node", payload: { id, sensors, actuators } });
  }

  removeNode(id: string) {
    return this.send({ kind: "remove_node", payload: { id } });
  }

  addLink(source: string, destination: string, sensors: SensorRef[] = []) {
    return this.send({ kind: "add_link", payload: { source, destination, sensors } });
  }

  removeLink(source: string, destination: string) {
    return this.send({ kind: "remove_link", payload: { source, destination } });
  }

  removeAttack(id: string) {
    return this.send({ kind: "remove_attack", payload: { id } });
  }

  /** Validate locally, then submit; rejections come back per-field. */
  async addAttack(kind: AttackKind, fields: AttackFields): Promise<AttackResult> {
    const errors = validateAttackFields(kind, fields);
    if (Object.keys(errors).length) {
      return { ok: false, errors };
    }
    try {
      const session = await this.send({ kind: "add_attack", payload: attackPayload(kind, fields) });
      return { ok: true, session };
    } catch (error) {
      if (error instanceof ApiError) {
        const { field, message } = mapServerError(error);
        if (field) {
          return { ok: false, errors: { [field]: message } };
        }
        return { ok: false, errors: {}, formError: message };
      }
      throw error;
    }
  }

  async setLambdas(lambdas: number[]): Promise<void> {
    this.store.setLambdas(lambdas);
    await this.send({ kind: "set_params", payload: { lambdas } });
    await this.refreshReport();
  }

  /** Debounced report refresh; keeps the panel calm during drag-edits. */
  scheduleReport() {
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.refreshReport();
    }, this.debounceMs);
  }

  async refreshReport(): Promise<void> {
    const id = this.sessionId();
    try {
      this.store.setReport(await this.api.report(id, this.store.get().lambdas));
    } catch (error) {
      if (error instanceof ApiError) {
        this.store.setReportError(error.message);
        return;
      }
      throw error;
    }
  }

  exportText(): Promise<string> {
    return this.api.exportCpa(this.sessionId());
  }

  private sessionId(): string {
    const session = this.store.get().session;
    if (!session) {
      throw new Error("no session open");
    }
    return session.id;
  }
}
