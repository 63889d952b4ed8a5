/**
 * Typed client for the chainweaver HTTP service. All chain semantics live
 * on the server; this module only moves JSON.
 */

import type {
  ApiErrorBody,
  ChainFileDoc,
  DiagnosticDoc,
  GalleryEntryDoc,
  NodeRunRecordDoc,
  RunSnapshotDoc,
  UserActionAnswer,
  ValueDoc,
} from "./types";

export class ApiError extends Error {
  readonly status: number;
  readonly body: ApiErrorBody;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.status = status;
    this.body = body;
  }

  /** Server-side diagnostics attached to a 422, when present. */
  get diagnostics(): DiagnosticDoc[] {
    return this.body.diagnostics ?? [];
  }
}

async function parseError(res: Response): Promise<never> {
  let body: ApiErrorBody;
  try {
    body = (await res.json()) as ApiErrorBody;
  } catch {
    body = { code: "HTTP_" + res.status, message: res.statusText };
  }
  throw new ApiError(res.status, body);
}

export interface RunRequest {
  inputs?: Record<string, ValueDoc>;
  breakpoints?: string[];
  backend?: { kind: "echo" | "scripted" | "http"; configRef?: string };
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const res = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!res.ok) {
      await parseError(res);
    }
    if (res.status === 204) {
      return undefined as T;
    }
    return (await res.json()) as T;
  }

  listChains(): Promise<{ id: string; name: string; description: string }[]> {
    return this.request("GET", "/chains");
  }

  getChain(chainId: string): Promise<ChainFileDoc> {
    return this.request("GET", `/chains/${encodeURIComponent(chainId)}`);
  }

  putChain(chainId: string, doc: ChainFileDoc): Promise<ChainFileDoc> {
    return this.request("PUT", `/chains/${encodeURIComponent(chainId)}`, doc);
  }

  deleteChain(chainId: string): Promise<void> {
    return this.request("DELETE", `/chains/${encodeURIComponent(chainId)}`);
  }

  validateChain(chainId: string, doc?: ChainFileDoc): Promise<DiagnosticDoc[]> {
    return this.request("POST", `/chains/${encodeURIComponent(chainId)}/validate`, doc);
  }

  listGallery(): Promise<GalleryEntryDoc[]> {
    return this.request("GET", "/gallery");
  }

  startRun(chainId: string, body: RunRequest): Promise<{ runId: string }> {
    return this.request("POST", `/chains/${encodeURIComponent(chainId)}/runs`, body);
  }

  getRun(runId: string): Promise<RunSnapshotDoc> {
    return this.request("GET", `/runs/${encodeURIComponent(runId)}`);
  }

  resumeRun(runId: string): Promise<RunSnapshotDoc> {
    return this.request("POST", `/runs/${encodeURIComponent(runId)}/resume`);
  }

  editNodeOutput(
    runId: string,
    nodeId: string,
    handle: string,
    value: ValueDoc,
  ): Promise<RunSnapshotDoc> {
    return this.request(
      "POST",
      `/runs/${encodeURIComponent(runId)}/nodes/${encodeURIComponent(nodeId)}/output`,
      { handle, value },
    );
  }

  answerUserAction(
    runId: string,
    nodeId: string,
    answer: UserActionAnswer,
  ): Promise<RunSnapshotDoc> {
    return this.request(
      "POST",
      `/runs/${encodeURIComponent(runId)}/nodes/${encodeURIComponent(nodeId)}/answer`,
      answer,
    );
  }

  unitTestNode(
    chainId: string,
    nodeId: string,
    bindings: Record<string, ValueDoc>,
    backend?: RunRequest["backend"],
  ): Promise<NodeRunRecordDoc> {
    return this.request(
      "POST",
      `/chains/${encodeURIComponent(chainId)}/nodes/${encodeURIComponent(nodeId)}/unit-test`,
      { bindings, backend },
    );
  }
}
