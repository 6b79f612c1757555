// Single source of truth for what the page renders. Every field here
// either came from a server response or is pure presentation (layout,
// selection); the UI never invents numbers. A report is stale whenever
// its revision trails the session's — stale values stay on screen but
// get flagged until the refreshed report lands.

import type { Report, SessionView } from "./types.js";

export type Selection =
  | { kind: "node"; id: string }
  | { kind: "link"; source: string; destination: string }
  | null;

export interface ViewState {
  session: SessionView | null;
  report: Report | null;
  /** Why the last report request failed (e.g. fewer than 2 nodes). */
  reportError: string | null;
  selection: Selection;
  /** True while a command is in flight; edits are not applied locally. */
  pending: boolean;
  /** Lambda sweep used for report requests (editable in the panel). */
  lambdas: number[];
}

export const DEFAULT_LAMBDAS = [0.2, 1, 5];

type Listener = (state: ViewState) => void;

export class Store {
  private state: ViewState = {
    session: null,
    report: null,
    reportError: null,
    selection: null,
    pending: false,
    lambdas: [...DEFAULT_LAMBDAS],
  };
  private listeners: Listener[] = [];

  get(): ViewState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit() {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  /** Accept a server-acknowledged session view (the only way state advances). */
  setSession(session: SessionView) {
    this.state = { ...this.state, session, pending: false };
    this.emit();
  }

  setReport(report: Report) {
    this.state = { ...this.state, report, reportError: null };
    this.emit();
  }

  setReportError(message: string) {
    this.state = { ...this.state, reportError: message };
    this.emit();
  }

  setPending(pending: boolean) {
    this.state = { ...this.state, pending };
    this.emit();
  }

  setSelection(selection: Selection) {
    this.state = { ...this.state, selection };
    this.emit();
  }

  setLambdas(lambdas: number[]) {
    this.state = { ...this.state, lambdas };
    this.emit();
  }

  /** Stale = the displayed report was computed at an older revision. */
  reportIsStale(): boolean {
    const { session, report } = this.state;
    if (!session) {
      return false;
    }
    return report === null || report.revision !== session.revision;
  }
}

/** The server keys TGD/EPD maps by printf-%g lambda text; mirror it. */
export function lambdaKey(lambda: number): string {
  const abs = Math.abs(lambda);
  if (lambda !== 0 && (abs < 1e-4 || abs >= 1e6)) {
    const [mantissa, rawExp] = lambda.toExponential(5).split("e");
    const exp = Number(rawExp);
    const sign = exp < 0 ? "-" : "+";
    return `${Number(mantissa)}e${sign}${String(Math.abs(exp)).padStart(2, "0")}`;
  }
  return String(Number(lambda.toPrecision(6)));
}

export function parseLambdaList(text: string): number[] | null {
  const parts = text.split(",").map((part) => part.trim()).filter(Boolean);
  if (!parts.length) {
    return null;
  }
  const values = parts.map(Number);
  if (values.some((v) => !Number.isFinite(v) || v <= 0)) {
    return null;
  }
  return values;
}
