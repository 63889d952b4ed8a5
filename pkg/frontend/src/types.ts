/**
 * Wire types for the chainweaver service.
 *
 * These mirror the service's JSON exactly; the editor holds no richer
 * model of chain semantics than what the server sends back.
 */

export type ValueKind = "Text" | "TextList";

export type ValueDoc =
  | { kind: "Text"; text: string }
  | { kind: "TextList"; items: string[] };

export type NodeKind =
  | "DataInput"
  | "GenericLLM"
  | "LLMClassifier"
  | "Evaluation"
  | "Processing"
  | "GenericScript"
  | "UserAction"
  | "APICall";

export interface HandleDoc {
  name: string;
  kind: ValueKind;
}

export interface NodeDoc {
  id: string;
  kind: NodeKind;
  label: string;
  config: Record<string, unknown>;
  inputs: HandleDoc[];
  outputs: HandleDoc[];
  position: { x: number; y: number };
}

export interface PortDoc {
  node: string;
  handle: string;
}

export interface EdgeDoc {
  from: PortDoc;
  to: PortDoc;
}

export interface ChainDoc {
  id: string;
  name: string;
  description: string;
  nodes: NodeDoc[];
  edges: EdgeDoc[];
}

export interface ChainFileDoc {
  formatVersion: number;
  chain: ChainDoc;
  fixtures?: Record<string, unknown>;
}

export interface DiagnosticDoc {
  code: string;
  message: string;
  nodeId: string | null;
}

export interface GalleryEntryDoc {
  id: string;
  title: string;
  description: string;
  chainFile: ChainFileDoc;
}

export type NodeStatus = "pending" | "running" | "success" | "error" | "skipped";

export type RunStatus =
  | "running"
  | "pausedAtBreakpoint"
  | "awaitingUserAction"
  | "done"
  | "failed";

export interface LineageEntryDoc {
  itemIndex: number;
  sourceNodeId: string;
  sourceItemIndex: number;
}

export interface NodeRunRecordDoc {
  nodeId: string;
  status: NodeStatus;
  inputs: Record<string, ValueDoc>;
  output: Record<string, ValueDoc>;
  itemLineage: LineageEntryDoc[];
  edited: boolean;
  errorMessage: string | null;
  durationMs: number;
}

export interface PendingInteractionDoc {
  nodeId: string;
  mode: "selectOne" | "selectMany" | "editText";
  candidates: ValueDoc;
}

export interface RunSnapshotDoc {
  runId: string;
  chainId: string;
  status: RunStatus;
  breakpoints: string[];
  records: Record<string, NodeRunRecordDoc>;
  pendingInteraction: PendingInteractionDoc | null;
  pausedNodeId: string | null;
  finalOutputs: Record<string, Record<string, ValueDoc>>;
}

export type RunEventPayload =
  | { type: "runStarted" }
  | { type: "nodeStarted"; nodeId: string }
  | { type: "nodeFinished"; nodeId: string; record: NodeRunRecordDoc }
  | { type: "pausedAtBreakpoint"; nodeId: string }
  | {
      type: "awaitingUserAction";
      nodeId: string;
      mode: PendingInteractionDoc["mode"];
      candidates: ValueDoc;
    }
  | { type: "runFinished"; status: RunStatus };

export interface RunEventEnvelope {
  runId: string;
  sequence: number;
  payload: RunEventPayload;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  path?: string;
  diagnostics?: DiagnosticDoc[];
}

export type UserActionAnswer = { select: number | number[] } | { text: string };
