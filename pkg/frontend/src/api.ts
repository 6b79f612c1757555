import type { ApiErrorBody, CommandBody, Report, SessionView } from "./types.js";

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;
  readonly line?: number;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.code = body.code;
    this.status = status;
    this.line = body.line;
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let body: ApiErrorBody;
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    body = { code: "HttpError", message: `${response.status} ${response.statusText}` };
  }
  throw new ApiError(response.status, body);
}

export class Api {
  constructor(readonly baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async createSession(inp: string, name: string): Promise<SessionView> {
    const response = await fetch(this.url("/sessions"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ inp, name }),
    });
    return unwrap<SessionView>(response);
  }

  async getSession(id: string): Promise<SessionView> {
    return unwrap<SessionView>(await fetch(this.url(`/sessions/${id}`)));
  }

  async command(id: string, body: CommandBody): Promise<SessionView> {
    const response = await fetch(this.url(`/sessions/${id}/commands`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return unwrap<SessionView>(response);
  }

  async report(id: string, lambdas?: number[]): Promise<Report> {
    const query = lambdas?.length ? `?lambda=${lambdas.join(",")}` : "";
    return unwrap<Report>(await fetch(this.url(`/sessions/${id}/report${query}`)));
  }

  /** Raw scenario text; the server renders it byte-deterministically. */
  async exportCpa(id: string): Promise<string> {
    const response = await fetch(this.url(`/sessions/${id}/export.cpa`));
    if (!response.ok) {
      return unwrap<never>(response);
    }
    return response.text();
  }
}
