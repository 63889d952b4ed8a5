/**
 * Editor state.
 *
 * The store mirrors the last server-accepted chain document and queues
 * every edit as a PUT; a 422 rolls the optimistic change back, so the
 * server-validated chain is always the single source of truth. Run state
 * is a pure fold of the run's event stream (order-safe on any gapless
 * prefix), reconciled against GET snapshots.
 */

import { ApiClient, ApiError } from "./api";
import type {
  ChainFileDoc,
  DiagnosticDoc,
  EdgeDoc,
  NodeRunRecordDoc,
  PendingInteractionDoc,
  PortDoc,
  RunEventEnvelope,
  RunSnapshotDoc,
  RunStatus,
} from "./types";

export interface RunView {
  runId: string;
  status: RunStatus | null;
  records: Record<string, NodeRunRecordDoc>;
  liveNodes: Set<string>;
  pending: PendingInteractionDoc | null;
  pausedNodeId: string | null;
  lastSequence: number;
  finalOutputs: RunSnapshotDoc["finalOutputs"] | null;
}

export function emptyRunView(runId: string): RunView {
  return {
    runId,
    status: null,
    records: {},
    liveNodes: new Set(),
    pending: null,
    pausedNodeId: null,
    lastSequence: 0,
    finalOutputs: null,
  };
}

/** Fold one event envelope into a run view (pure; returns a new view). */
export function applyRunEvent(view: RunView, envelope: RunEventEnvelope): RunView {
  const next: RunView = {
    ...view,
    records: { ...view.records },
    liveNodes: new Set(view.liveNodes),
    lastSequence: envelope.sequence,
  };
  const payload = envelope.payload;
  switch (payload.type) {
    case "runStarted":
      next.status = "running";
      break;
    case "nodeStarted":
      next.liveNodes.add(payload.nodeId);
      break;
    case "nodeFinished":
      next.liveNodes.delete(payload.nodeId);
      next.records[payload.nodeId] = payload.record;
      break;
    case "pausedAtBreakpoint":
      next.status = "pausedAtBreakpoint";
      next.pausedNodeId = payload.nodeId;
      break;
    case "awaitingUserAction":
      next.status = "awaitingUserAction";
      next.pausedNodeId = payload.nodeId;
      next.pending = {
        nodeId: payload.nodeId,
        mode: payload.mode,
        candidates: payload.candidates,
      };
      break;
    case "runFinished":
      next.status = payload.status;
      next.pausedNodeId = null;
      next.pending = null;
      break;
  }
  return next;
}

export function foldRunEvents(runId: string, envelopes: RunEventEnvelope[]): RunView {
  return envelopes.reduce(applyRunEvent, emptyRunView(runId));
}

/** Adopt an authoritative GET snapshot (reconciles any folded view). */
export function viewFromSnapshot(snapshot: RunSnapshotDoc, lastSequence: number): RunView {
  return {
    runId: snapshot.runId,
    status: snapshot.status,
    records: snapshot.records,
    liveNodes: new Set(),
    pending: snapshot.pendingInteraction,
    pausedNodeId: snapshot.pausedNodeId,
    lastSequence,
    finalOutputs: snapshot.finalOutputs,
  };
}

export interface Viewport {
  x: number;
  y: number;
  zoom: number;
}

export interface Rejection {
  message: string;
  diagnostics: DiagnosticDoc[];
}

type Listener = () => void;

export class EditorStore {
  readonly api: ApiClient;
  chainFile: ChainFileDoc | null = null;
  private serverChain: ChainFileDoc | null = null;
  selection: string | null = null;
  viewport: Viewport = { x: 0, y: 0, zoom: 1 };
  dirty = false;
  breakpoints = new Set<string>();
  run: RunView | null = null;
  lastRejection: Rejection | null = null;
  private listeners = new Set<Listener>();

  constructor(api: ApiClient) {
    this.api = api;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private changed(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }

  get chainId(): string | null {
    return this.chainFile?.chain.id ?? null;
  }

  async loadChain(chainId: string): Promise<void> {
    const doc = await this.api.getChain(chainId);
    this.adoptServerChain(doc);
    this.selection = null;
    this.run = null;
    this.breakpoints.clear();
    this.changed();
  }

  private adoptServerChain(doc: ChainFileDoc): void {
    this.serverChain = doc;
    this.chainFile = structuredClone(doc);
    this.dirty = false;
  }

  select(nodeId: string | null): void {
    this.selection = nodeId;
    this.changed();
  }

  toggleBreakpoint(nodeId: string): void {
    if (this.breakpoints.has(nodeId)) {
      this.breakpoints.delete(nodeId);
    } else {
      this.breakpoints.add(nodeId);
    }
    this.changed();
  }

  /**
   * Apply an optimistic chain edit and PUT it. On 422 the edit rolls back
   * to the last server-accepted chain and the rejection is surfaced.
   */
  async commitChainEdit(mutate: (doc: ChainFileDoc) => void): Promise<boolean> {
    if (this.chainFile === null) {
      throw new Error("no chain loaded");
    }
    const draft = structuredClone(this.chainFile);
    mutate(draft);
    this.chainFile = draft;
    this.dirty = true;
    this.lastRejection = null;
    this.changed();
    try {
      const accepted = await this.api.putChain(draft.chain.id, draft);
      this.adoptServerChain(accepted);
      this.changed();
      return true;
    } catch (err) {
      if (err instanceof ApiError) {
        this.chainFile = structuredClone(this.serverChain!);
        this.dirty = false;
        this.lastRejection = { message: err.message, diagnostics: err.diagnostics };
        this.changed();
        return false;
      }
      throw err;
    }
  }

  /** Create an edge (replacing any edge into the same input handle). */
  connectEdge(from: PortDoc, to: PortDoc): Promise<boolean> {
    return this.commitChainEdit((doc) => {
      doc.chain.edges = doc.chain.edges.filter(
        (e) => !(e.to.node === to.node && e.to.handle === to.handle),
      );
      doc.chain.edges.push({ from, to });
    });
  }

  disconnectEdge(edge: EdgeDoc): Promise<boolean> {
    return this.commitChainEdit((doc) => {
      doc.chain.edges = doc.chain.edges.filter(
        (e) =>
          !(
            e.from.node === edge.from.node &&
            e.from.handle === edge.from.handle &&
            e.to.node === edge.to.node &&
            e.to.handle === edge.to.handle
          ),
      );
    });
  }

  moveNode(nodeId: string, x: number, y: number): Promise<boolean> {
    return this.commitChainEdit((doc) => {
      const node = doc.chain.nodes.find((n) => n.id === nodeId);
      if (node) {
        node.position = { x, y };
      }
    });
  }

  setRun(view: RunView | null): void {
    this.run = view;
    this.changed();
  }

  applyEvent(envelope: RunEventEnvelope): void {
    if (this.run === null || envelope.runId !== this.run.runId) {
      return;
    }
    this.run = applyRunEvent(this.run, envelope);
    this.changed();
  }

  adoptSnapshot(snapshot: RunSnapshotDoc): void {
    const last = this.run?.runId === snapshot.runId ? this.run.lastSequence : 0;
    this.run = viewFromSnapshot(snapshot, last);
    this.changed();
  }
}
