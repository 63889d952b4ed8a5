/**
 * Chain View: one draggable card per node with its status icon, named
 * input/output ports, and an inline output preview; SVG curves for edges.
 * Edges are created by dragging from an output port to an input port and
 * removed by clicking them; both edits round-trip through the store's
 * PUT-and-rollback path, so illegal connections surface the server's
 * diagnostic and leave the model untouched.
 */

import { previewValue } from "./preview";
import type { EditorStore } from "./state";
import type { EdgeDoc, NodeDoc, NodeStatus, PortDoc } from "./types";

const CARD_WIDTH = 190;
const HEADER_HEIGHT = 26;
const ROW_HEIGHT = 20;

const STATUS_GLYPHS: Record<NodeStatus, string> = {
  pending: "…",
  running: "▶",
  success: "✓",
  error: "✗",
  skipped: "–",
};

interface DragState {
  kind: "edge";
  from: PortDoc;
}

interface MoveState {
  kind: "move";
  nodeId: string;
  startX: number;
  startY: number;
  origX: number;
  origY: number;
}

export class ChainView {
  private pendingDrag: DragState | MoveState | null = null;

  constructor(
    private readonly container: HTMLElement,
    private readonly store: EditorStore,
  ) {
    container.classList.add("chain-canvas");
    container.addEventListener("mouseup", () => {
      // a drag released over empty canvas is abandoned
      this.pendingDrag = null;
      this.render();
    });
  }

  render(): void {
    const doc = this.store.chainFile;
    this.container.textContent = "";
    if (doc === null) {
      const empty = document.createElement("div");
      empty.className = "canvas-empty";
      empty.textContent = "No chain loaded";
      this.container.append(empty);
      return;
    }
    this.container.append(this.renderEdges(doc.chain.nodes, doc.chain.edges));
    for (const node of doc.chain.nodes) {
      this.container.append(this.renderCard(node));
    }
  }

  private portPosition(nodes: NodeDoc[], port: PortDoc, direction: "in" | "out"): { x: number; y: number } {
    const node = nodes.find((n) => n.id === port.node);
    if (!node) {
      return { x: 0, y: 0 };
    }
    const handles = direction === "in" ? node.inputs : node.outputs;
    const index = Math.max(0, handles.findIndex((h) => h.name === port.handle));
    const y = node.position.y + HEADER_HEIGHT + ROW_HEIGHT * (index + 0.5);
    const x = direction === "in" ? node.position.x : node.position.x + CARD_WIDTH;
    return { x, y };
  }

  private renderEdges(nodes: NodeDoc[], edges: EdgeDoc[]): SVGSVGElement {
    const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
    svg.classList.add("edge-layer");
    for (const edge of edges) {
      const from = this.portPosition(nodes, edge.from, "out");
      const to = this.portPosition(nodes, edge.to, "in");
      const path = document.createElementNS("http://www.w3.org/2000/svg", "path");
      const bend = Math.max(40, (to.x - from.x) / 2);
      path.setAttribute(
        "d",
        `M ${from.x} ${from.y} C ${from.x + bend} ${from.y}, ${to.x - bend} ${to.y}, ${to.x} ${to.y}`,
      );
      path.classList.add("edge");
      path.dataset.edgeKey = `${edge.from.node}.${edge.from.handle}->${edge.to.node}.${edge.to.handle}`;
      path.addEventListener("click", () => {
        void this.store.disconnectEdge(edge);
      });
      svg.append(path);
    }
    return svg;
  }

  private renderCard(node: NodeDoc): HTMLElement {
    const card = document.createElement("div");
    card.className = "node-card";
    card.dataset.nodeId = node.id;
    card.style.left = `${node.position.x}px`;
    card.style.top = `${node.position.y}px`;
    card.style.width = `${CARD_WIDTH}px`;
    if (this.store.selection === node.id) {
      card.classList.add("selected");
    }

    const record = this.store.run?.records[node.id];
    const live = this.store.run?.liveNodes.has(node.id) ?? false;
    const status: NodeStatus | null = live ? "running" : record?.status ?? null;
    if (status !== null) {
      card.classList.add(`status-${status}`);
    }

    const header = document.createElement("div");
    header.className = "node-header";
    const icon = document.createElement("span");
    icon.className = "status-icon";
    icon.textContent = status === null ? "" : STATUS_GLYPHS[status];
    const title = document.createElement("span");
    title.className = "node-title";
    title.textContent = node.label;
    title.title = `${node.id} (${node.kind})`;
    const bp = document.createElement("button");
    bp.className = "bp-toggle";
    bp.dataset.nodeId = node.id;
    bp.title = "toggle breakpoint";
    bp.textContent = "●";
    if (this.store.breakpoints.has(node.id)) {
      bp.classList.add("bp-on");
    }
    bp.addEventListener("click", (event) => {
      event.stopPropagation();
      this.store.toggleBreakpoint(node.id);
    });
    header.append(icon, title, bp);
    header.addEventListener("mousedown", (event) => {
      this.pendingDrag = {
        kind: "move",
        nodeId: node.id,
        startX: event.clientX,
        startY: event.clientY,
        origX: node.position.x,
        origY: node.position.y,
      };
    });
    header.addEventListener("mouseup", (event) => {
      const drag = this.pendingDrag;
      if (drag?.kind === "move" && drag.nodeId === node.id) {
        this.pendingDrag = null;
        const dx = event.clientX - drag.startX;
        const dy = event.clientY - drag.startY;
        if (dx !== 0 || dy !== 0) {
          event.stopPropagation();
          void this.store.moveNode(node.id, drag.origX + dx, drag.origY + dy);
        }
      }
    });
    card.append(header);

    const body = document.createElement("div");
    body.className = "node-body";
    const rows = Math.max(node.inputs.length, node.outputs.length);
    for (let i = 0; i < rows; i++) {
      const row = document.createElement("div");
      row.className = "port-row";
      row.append(
        this.renderPort(node, node.inputs[i], "in"),
        this.renderPort(node, node.outputs[i], "out"),
      );
      body.append(row);
    }
    card.append(body);

    if (record && record.status === "error" && record.errorMessage) {
      const err = document.createElement("div");
      err.className = "node-error";
      err.textContent = record.errorMessage;
      card.append(err);
    }
    if (record && Object.keys(record.output).length > 0) {
      const details = document.createElement("details");
      details.className = "node-preview-drawer";
      const summary = document.createElement("summary");
      summary.className = "node-preview";
      summary.textContent = Object.entries(record.output)
        .map(([handle, value]) => `${handle}: ${previewValue(value)}`)
        .join("  ");
      details.append(summary);
      const full = document.createElement("pre");
      full.className = "node-preview-full";
      full.textContent = Object.entries(record.output)
        .map(([handle, value]) => `${handle}:\n${JSON.stringify(value, null, 2)}`)
        .join("\n");
      details.append(full);
      card.append(details);
    }

    card.addEventListener("click", () => this.store.select(node.id));
    return card;
  }

  private renderPort(node: NodeDoc, handle: { name: string; kind: string } | undefined, direction: "in" | "out"): HTMLElement {
    const cell = document.createElement("span");
    cell.className = `port-cell port-cell-${direction}`;
    if (!handle) {
      return cell;
    }
    const dot = document.createElement("span");
    dot.className = `port port-${direction}`;
    dot.dataset.node = node.id;
    dot.dataset.handle = handle.name;
    dot.title = `${handle.name}: ${handle.kind}`;
    const label = document.createElement("span");
    label.className = "port-name";
    label.textContent = handle.name;
    if (direction === "in") {
      cell.append(dot, label);
      dot.addEventListener("mouseup", (event) => {
        const drag = this.pendingDrag;
        if (drag?.kind === "edge") {
          event.stopPropagation();
          this.pendingDrag = null;
          void this.store.connectEdge(drag.from, { node: node.id, handle: handle.name });
        }
      });
    } else {
      cell.append(label, dot);
      dot.addEventListener("mousedown", (event) => {
        event.stopPropagation();
        this.pendingDrag = { kind: "edge", from: { node: node.id, handle: handle.name } };
      });
    }
    return cell;
  }
}
