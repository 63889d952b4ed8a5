// src/api.ts
var ApiError = class extends Error {
  status;
  body;
  constructor(status, body) {
    super(body.message);
    this.status = status;
    this.body = body;
  }
  /** Server-side diagnostics attached to a 422, when present. */
  get diagnostics() {
    return this.body.diagnostics ?? [];
  }
};
async function parseError(res) {
  let body;
  try {
    body = await res.json();
  } catch {
    body = { code: "HTTP_" + res.status, message: res.statusText };
  }
  throw new ApiError(res.status, body);
}
var ApiClient = class {
  constructor(baseUrl = "") {
    this.baseUrl = baseUrl;
  }
  async request(method, path, body) {
    const res = await fetch(this.baseUrl + path, {
      method,
      headers: body === void 0 ? {} : { "Content-Type": "application/json" },
      body: body === void 0 ? void 0 : JSON.stringify(body)
    });
    if (!res.ok) {
      await parseError(res);
    }
    if (res.status === 204) {
      return void 0;
    }
    return await res.json();
  }
  listChains() {
    return this.request("GET", "/chains");
  }
  getChain(chainId) {
    return this.request("GET", `/chains/${encodeURIComponent(chainId)}`);
  }
  putChain(chainId, doc) {
    return this.request("PUT", `/chains/${encodeURIComponent(chainId)}`, doc);
  }
  deleteChain(chainId) {
    return this.request("DELETE", `/chains/${encodeURIComponent(chainId)}`);
  }
  validateChain(chainId, doc) {
    return this.request("POST", `/chains/${encodeURIComponent(chainId)}/validate`, doc);
  }
  listGallery() {
    return this.request("GET", "/gallery");
  }
  startRun(chainId, body) {
    return this.request("POST", `/chains/${encodeURIComponent(chainId)}/runs`, body);
  }
  getRun(runId) {
    return this.request("GET", `/runs/${encodeURIComponent(runId)}`);
  }
  resumeRun(runId) {
    return this.request("POST", `/runs/${encodeURIComponent(runId)}/resume`);
  }
  editNodeOutput(runId, nodeId, handle, value) {
    return this.request(
      "POST",
      `/runs/${encodeURIComponent(runId)}/nodes/${encodeURIComponent(nodeId)}/output`,
      { handle, value }
    );
  }
  answerUserAction(runId, nodeId, answer) {
    return this.request(
      "POST",
      `/runs/${encodeURIComponent(runId)}/nodes/${encodeURIComponent(nodeId)}/answer`,
      answer
    );
  }
  unitTestNode(chainId, nodeId, bindings, backend) {
    return this.request(
      "POST",
      `/chains/${encodeURIComponent(chainId)}/nodes/${encodeURIComponent(nodeId)}/unit-test`,
      { bindings, backend }
    );
  }
};

// src/preview.ts
var PREVIEW_CHARS = 80;
var PREVIEW_ITEMS = 3;
function previewText(text) {
  return text.length > PREVIEW_CHARS ? text.slice(0, PREVIEW_CHARS) + "\u2026" : text;
}
function previewValue(value) {
  if (value.kind === "Text") {
    return previewText(value.text);
  }
  const shown = value.items.slice(0, PREVIEW_ITEMS).map(previewText);
  const suffix = value.items.length > PREVIEW_ITEMS ? ` \u2026 +${value.items.length - PREVIEW_ITEMS}` : "";
  return `[${value.items.length}] ` + shown.join(" | ") + suffix;
}
function fullValue(value) {
  return value.kind === "Text" ? value.text : value.items.join("\n");
}

// src/chainView.ts
var CARD_WIDTH = 190;
var HEADER_HEIGHT = 26;
var ROW_HEIGHT = 20;
var STATUS_GLYPHS = {
  pending: "\u2026",
  running: "\u25B6",
  success: "\u2713",
  error: "\u2717",
  skipped: "\u2013"
};
var ChainView = class {
  constructor(container, store) {
    this.container = container;
    this.store = store;
    container.classList.add("chain-canvas");
    container.addEventListener("mouseup", () => {
      this.pendingDrag = null;
      this.render();
    });
  }
  pendingDrag = null;
  render() {
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
  portPosition(nodes, port, direction) {
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
  renderEdges(nodes, edges) {
    const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
    svg.classList.add("edge-layer");
    for (const edge of edges) {
      const from = this.portPosition(nodes, edge.from, "out");
      const to = this.portPosition(nodes, edge.to, "in");
      const path = document.createElementNS("http://www.w3.org/2000/svg", "path");
      const bend = Math.max(40, (to.x - from.x) / 2);
      path.setAttribute(
        "d",
        `M ${from.x} ${from.y} C ${from.x + bend} ${from.y}, ${to.x - bend} ${to.y}, ${to.x} ${to.y}`
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
  renderCard(node) {
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
    const status = live ? "running" : record?.status ?? null;
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
    bp.textContent = "\u25CF";
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
        origY: node.position.y
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
        this.renderPort(node, node.outputs[i], "out")
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
      summary.textContent = Object.entries(record.output).map(([handle, value]) => `${handle}: ${previewValue(value)}`).join("  ");
      details.append(summary);
      const full = document.createElement("pre");
      full.className = "node-preview-full";
      full.textContent = Object.entries(record.output).map(([handle, value]) => `${handle}:
${JSON.stringify(value, null, 2)}`).join("\n");
      details.append(full);
      card.append(details);
    }
    card.addEventListener("click", () => this.store.select(node.id));
    return card;
  }
  renderPort(node, handle, direction) {
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
};

// src/events.ts
async function* readNdjson(body) {
  const reader = body.getReader();
  const decoder = new TextDecoder();
  let buffer = "";
  for (; ; ) {
    const { done, value } = await reader.read();
    if (done) {
      break;
    }
    buffer += decoder.decode(value, { stream: true });
    let newline = buffer.indexOf("\n");
    while (newline >= 0) {
      const line = buffer.slice(0, newline).trim();
      buffer = buffer.slice(newline + 1);
      if (line) {
        yield JSON.parse(line);
      }
      newline = buffer.indexOf("\n");
    }
  }
  const rest = buffer.trim();
  if (rest) {
    yield JSON.parse(rest);
  }
}
async function streamRunEvents(baseUrl, runId, since, options) {
  const fetchImpl = options.fetchImpl ?? fetch;
  const follow = options.follow ?? false;
  const res = await fetchImpl(
    `${baseUrl}/runs/${encodeURIComponent(runId)}/events?since=${since}&follow=${follow}`
  );
  if (!res.ok || res.body === null) {
    throw new Error(`event stream failed: ${res.status}`);
  }
  let cursor = since;
  for await (const raw of readNdjson(res.body)) {
    const envelope = raw;
    if (envelope.sequence !== cursor + 1) {
      options.onGap?.(cursor + 1, envelope.sequence);
      return cursor;
    }
    cursor = envelope.sequence;
    options.onEvent(envelope);
  }
  return cursor;
}

// src/state.ts
function emptyRunView(runId) {
  return {
    runId,
    status: null,
    records: {},
    liveNodes: /* @__PURE__ */ new Set(),
    pending: null,
    pausedNodeId: null,
    lastSequence: 0,
    finalOutputs: null
  };
}
function applyRunEvent(view, envelope) {
  const next = {
    ...view,
    records: { ...view.records },
    liveNodes: new Set(view.liveNodes),
    lastSequence: envelope.sequence
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
        candidates: payload.candidates
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
function viewFromSnapshot(snapshot, lastSequence) {
  return {
    runId: snapshot.runId,
    status: snapshot.status,
    records: snapshot.records,
    liveNodes: /* @__PURE__ */ new Set(),
    pending: snapshot.pendingInteraction,
    pausedNodeId: snapshot.pausedNodeId,
    lastSequence,
    finalOutputs: snapshot.finalOutputs
  };
}
var EditorStore = class {
  api;
  chainFile = null;
  serverChain = null;
  selection = null;
  viewport = { x: 0, y: 0, zoom: 1 };
  dirty = false;
  breakpoints = /* @__PURE__ */ new Set();
  run = null;
  lastRejection = null;
  listeners = /* @__PURE__ */ new Set();
  constructor(api) {
    this.api = api;
  }
  subscribe(listener) {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }
  changed() {
    for (const listener of this.listeners) {
      listener();
    }
  }
  get chainId() {
    return this.chainFile?.chain.id ?? null;
  }
  async loadChain(chainId) {
    const doc = await this.api.getChain(chainId);
    this.adoptServerChain(doc);
    this.selection = null;
    this.run = null;
    this.breakpoints.clear();
    this.changed();
  }
  adoptServerChain(doc) {
    this.serverChain = doc;
    this.chainFile = structuredClone(doc);
    this.dirty = false;
  }
  select(nodeId) {
    this.selection = nodeId;
    this.changed();
  }
  toggleBreakpoint(nodeId) {
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
  async commitChainEdit(mutate) {
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
        this.chainFile = structuredClone(this.serverChain);
        this.dirty = false;
        this.lastRejection = { message: err.message, diagnostics: err.diagnostics };
        this.changed();
        return false;
      }
      throw err;
    }
  }
  /** Create an edge (replacing any edge into the same input handle). */
  connectEdge(from, to) {
    return this.commitChainEdit((doc) => {
      doc.chain.edges = doc.chain.edges.filter(
        (e) => !(e.to.node === to.node && e.to.handle === to.handle)
      );
      doc.chain.edges.push({ from, to });
    });
  }
  disconnectEdge(edge) {
    return this.commitChainEdit((doc) => {
      doc.chain.edges = doc.chain.edges.filter(
        (e) => !(e.from.node === edge.from.node && e.from.handle === edge.from.handle && e.to.node === edge.to.node && e.to.handle === edge.to.handle)
      );
    });
  }
  moveNode(nodeId, x, y) {
    return this.commitChainEdit((doc) => {
      const node = doc.chain.nodes.find((n) => n.id === nodeId);
      if (node) {
        node.position = { x, y };
      }
    });
  }
  setRun(view) {
    this.run = view;
    this.changed();
  }
  applyEvent(envelope) {
    if (this.run === null || envelope.runId !== this.run.runId) {
      return;
    }
    this.run = applyRunEvent(this.run, envelope);
    this.changed();
  }
  adoptSnapshot(snapshot) {
    const last = this.run?.runId === snapshot.runId ? this.run.lastSequence : 0;
    this.run = viewFromSnapshot(snapshot, last);
    this.changed();
  }
};

// src/debugControls.ts
var DebugControls = class {
  constructor(container, store) {
    this.container = container;
    this.store = store;
    container.classList.add("debug-controls");
  }
  backendKind = "scripted";
  busy = false;
  /** Pull any events recorded past the view's cursor and apply them in order. */
  async replayEvents(runId) {
    const since = this.store.run?.lastSequence ?? 0;
    await streamRunEvents(this.store.api.baseUrl, runId, since, {
      onEvent: (envelope) => this.store.applyEvent(envelope)
    });
  }
  async startRun() {
    const chainId = this.store.chainId;
    if (chainId === null || this.busy) {
      return;
    }
    this.busy = true;
    try {
      const { runId } = await this.store.api.startRun(chainId, {
        breakpoints: [...this.store.breakpoints],
        backend: { kind: this.backendKind }
      });
      this.store.setRun(emptyRunView(runId));
      await this.replayEvents(runId);
      this.store.adoptSnapshot(await this.store.api.getRun(runId));
    } finally {
      this.busy = false;
    }
  }
  async resume() {
    const run = this.store.run;
    if (run === null || this.busy) {
      return;
    }
    this.busy = true;
    try {
      const snapshot = await this.store.api.resumeRun(run.runId);
      await this.replayEvents(run.runId);
      this.store.adoptSnapshot(snapshot);
    } finally {
      this.busy = false;
    }
  }
  async saveOutputEdit(nodeId, handle, value) {
    const run = this.store.run;
    if (run === null) {
      return;
    }
    const snapshot = await this.store.api.editNodeOutput(run.runId, nodeId, handle, value);
    await this.replayEvents(run.runId);
    this.store.adoptSnapshot(snapshot);
  }
  async answer(answer) {
    const run = this.store.run;
    const pending = run?.pending;
    if (!run || !pending) {
      return;
    }
    const snapshot = await this.store.api.answerUserAction(run.runId, pending.nodeId, answer);
    await this.replayEvents(run.runId);
    this.store.adoptSnapshot(snapshot);
    await this.resume();
  }
  render() {
    this.container.textContent = "";
    const run = this.store.run;
    const bar = document.createElement("div");
    bar.className = "run-bar";
    const backendSelect = document.createElement("select");
    backendSelect.className = "backend-select";
    for (const kind of ["scripted", "echo"]) {
      const option = document.createElement("option");
      option.value = kind;
      option.textContent = kind;
      option.selected = kind === this.backendKind;
      backendSelect.append(option);
    }
    backendSelect.addEventListener("change", () => {
      this.backendKind = backendSelect.value;
    });
    const runButton = document.createElement("button");
    runButton.className = "run-button";
    runButton.textContent = "Run";
    runButton.disabled = this.store.chainId === null;
    runButton.addEventListener("click", () => void this.startRun().catch((err) => this.fail(err)));
    const resumeButton = document.createElement("button");
    resumeButton.className = "resume-button";
    resumeButton.textContent = "Resume";
    resumeButton.disabled = run === null || run.status === "done" || run.status === "failed" || run.status === null || run.status === "running" || run.pending !== null;
    resumeButton.addEventListener("click", () => void this.resume().catch((err) => this.fail(err)));
    const status = document.createElement("span");
    status.className = "run-status";
    status.textContent = run === null ? "no run" : `${run.runId}: ${run.status ?? "starting"}`;
    bar.append(backendSelect, runButton, resumeButton, status);
    this.container.append(bar);
    if (run?.status === "pausedAtBreakpoint" && run.pausedNodeId !== null) {
      this.container.append(this.renderPausedPanel(run.pausedNodeId));
    }
    if (run?.pending) {
      this.container.append(this.renderUserActionDialog());
    }
    if ((run?.status === "done" || run?.status === "failed") && run.finalOutputs !== null) {
      this.container.append(this.renderFinalOutputs(run.finalOutputs));
    }
  }
  renderPausedPanel(nodeId) {
    const run = this.store.run;
    const record = run.records[nodeId];
    const panel = document.createElement("div");
    panel.className = "paused-panel";
    const title = document.createElement("h3");
    title.textContent = `Paused after ${nodeId}`;
    panel.append(title);
    if (!record) {
      return panel;
    }
    const handles = Object.keys(record.output);
    const handleSelect = document.createElement("select");
    handleSelect.className = "handle-select";
    for (const handle of handles) {
      const option = document.createElement("option");
      option.value = handle;
      option.textContent = handle;
      handleSelect.append(option);
    }
    const editor = document.createElement("textarea");
    editor.className = "output-editor";
    const loadValue = () => {
      const value = record.output[handleSelect.value];
      editor.value = value ? fullValue(value) : "";
      editor.dataset.kind = value?.kind ?? "Text";
    };
    handleSelect.addEventListener("change", loadValue);
    if (handles.length > 0) {
      loadValue();
    }
    const save = document.createElement("button");
    save.className = "save-output";
    save.textContent = "Save output";
    save.addEventListener("click", () => {
      const kind = editor.dataset.kind === "TextList" ? "TextList" : "Text";
      const value = kind === "TextList" ? { kind: "TextList", items: editor.value === "" ? [] : editor.value.split("\n") } : { kind: "Text", text: editor.value };
      void this.saveOutputEdit(nodeId, handleSelect.value, value).catch((err) => this.fail(err));
    });
    panel.append(handleSelect, editor, save);
    if (record.status === "error" && record.errorMessage) {
      const note = document.createElement("div");
      note.className = "paused-error";
      note.textContent = record.errorMessage;
      panel.append(note);
    }
    return panel;
  }
  renderUserActionDialog() {
    const pending = this.store.run.pending;
    const dialog = document.createElement("div");
    dialog.className = "ua-dialog";
    const title = document.createElement("h3");
    title.textContent = `${pending.nodeId}: ${pending.mode}`;
    dialog.append(title);
    const candidates = pending.candidates.kind === "TextList" ? pending.candidates.items : [pending.candidates.text];
    if (pending.mode === "editText") {
      const editor = document.createElement("textarea");
      editor.className = "ua-text";
      editor.value = candidates[0] ?? "";
      const submit2 = document.createElement("button");
      submit2.className = "ua-answer";
      submit2.textContent = "Submit";
      submit2.addEventListener("click", () => {
        void this.answer({ text: editor.value }).catch((err) => this.fail(err));
      });
      dialog.append(editor, submit2);
      return dialog;
    }
    const many = pending.mode === "selectMany";
    const list = document.createElement("div");
    list.className = "ua-candidates";
    candidates.forEach((candidate, index) => {
      const row = document.createElement("label");
      row.className = "ua-candidate";
      const input = document.createElement("input");
      input.type = many ? "checkbox" : "radio";
      input.name = "ua-choice";
      input.value = String(index);
      const text = document.createElement("span");
      text.textContent = candidate;
      row.append(input, text);
      list.append(row);
    });
    const submit = document.createElement("button");
    submit.className = "ua-answer";
    submit.textContent = "Choose";
    submit.addEventListener("click", () => {
      const chosen = [...list.querySelectorAll("input:checked")].map(
        (el) => Number(el.value)
      );
      if (chosen.length === 0) {
        return;
      }
      const answer = many ? { select: chosen } : { select: chosen[0] };
      void this.answer(answer).catch((err) => this.fail(err));
    });
    dialog.append(list, submit);
    return dialog;
  }
  renderFinalOutputs(outputs) {
    const panel = document.createElement("div");
    panel.className = "final-outputs";
    const title = document.createElement("h3");
    title.textContent = "Final outputs";
    panel.append(title);
    for (const [nodeId, handles] of Object.entries(outputs)) {
      for (const [handle, value] of Object.entries(handles)) {
        const row = document.createElement("div");
        row.className = "final-output";
        row.dataset.node = nodeId;
        row.dataset.handle = handle;
        const label = document.createElement("span");
        label.className = "final-output-label";
        label.textContent = `${nodeId}.${handle}`;
        const text = document.createElement("pre");
        text.className = "final-output-value";
        text.textContent = fullValue(value);
        row.append(label, text);
        panel.append(row);
      }
    }
    return panel;
  }
  fail(err) {
    const note = document.createElement("div");
    note.className = "debug-error";
    note.textContent = err instanceof ApiError ? `${err.body.code}: ${err.message}` : String(err);
    this.container.append(note);
  }
};

// src/sync.ts
var PLACEHOLDER_RE = /\[\[([A-Za-z_][A-Za-z0-9_]*)\]\]/g;
function extractPlaceholders(raw) {
  const seen = [];
  for (const match of raw.matchAll(PLACEHOLDER_RE)) {
    if (!seen.includes(match[1])) {
      seen.push(match[1]);
    }
  }
  return seen;
}
function diffHandleNames(current, wanted) {
  const added = wanted.filter((n) => !current.includes(n));
  const removed = current.filter((n) => !wanted.includes(n));
  if (added.length === 1 && removed.length === 1) {
    return { added: [], removed: [], renamed: [removed[0], added[0]] };
  }
  return { added, removed, renamed: null };
}
function templateParts(node) {
  switch (node.kind) {
    case "GenericLLM":
    case "LLMClassifier":
      return { key: "template" };
    case "APICall":
      return { key: "urlTemplate", extra: "bodyTemplate" };
    default:
      return null;
  }
}
function nodePlaceholders(node) {
  const parts = templateParts(node);
  if (parts === null) {
    return null;
  }
  const primary = node.config[parts.key];
  const names = extractPlaceholders(typeof primary === "string" ? primary : "");
  if (parts.extra) {
    const body = node.config[parts.extra];
    if (typeof body === "string") {
      for (const name of extractPlaceholders(body)) {
        if (!names.includes(name)) {
          names.push(name);
        }
      }
    }
  }
  return names;
}
function previewTemplateEdit(node, raw, part = "template") {
  const current = node.inputs.map((h) => h.name);
  const draft = { ...node, config: { ...node.config, [partKey(node, part)]: raw } };
  const wanted = nodePlaceholders(draft) ?? current;
  return diffHandleNames(current, wanted);
}
function partKey(node, part) {
  if (node.kind === "APICall") {
    return part === "body" ? "bodyTemplate" : "urlTemplate";
  }
  return "template";
}
function applyTemplateEdit(chain, nodeId, raw, part = "template") {
  const node = chain.nodes.find((n) => n.id === nodeId);
  if (!node) {
    throw new Error(`no node ${nodeId}`);
  }
  const key = partKey(node, part);
  const updated = { ...node, config: { ...node.config, [key]: raw } };
  const wanted = nodePlaceholders(updated);
  if (wanted === null) {
    throw new Error(`node ${nodeId} has no editable template`);
  }
  const current = updated.inputs.map((h) => h.name);
  const preview = diffHandleNames(current, wanted);
  let inputs;
  if (preview.renamed) {
    const [oldName, newName] = preview.renamed;
    inputs = updated.inputs.map((h) => h.name === oldName ? { ...h, name: newName } : h);
  } else {
    const survivors = updated.inputs.filter((h) => wanted.includes(h.name));
    const additions = preview.added.map((name) => ({ name, kind: "Text" }));
    inputs = [...survivors, ...additions];
  }
  const synced = { ...updated, inputs };
  if (synced.kind === "LLMClassifier" && preview.renamed) {
    const [oldName, newName] = preview.renamed;
    if (synced.config["payloadInput"] === oldName) {
      synced.config = { ...synced.config, payloadInput: newName };
    }
  }
  const keep = new Set(inputs.map((h) => h.name));
  const edges = [];
  for (const edge of chain.edges) {
    if (edge.to.node !== nodeId) {
      edges.push(edge);
    } else if (preview.renamed && edge.to.handle === preview.renamed[0]) {
      edges.push({ ...edge, to: { node: nodeId, handle: preview.renamed[1] } });
    } else if (keep.has(edge.to.handle)) {
      edges.push(edge);
    }
  }
  return {
    ...chain,
    nodes: chain.nodes.map((n) => n.id === nodeId ? synced : n),
    edges
  };
}
function highlightSpans(raw) {
  const spans = [];
  let last = 0;
  for (const match of raw.matchAll(PLACEHOLDER_RE)) {
    if (match.index > last) {
      spans.push({ text: raw.slice(last, match.index), placeholder: false });
    }
    spans.push({ text: match[0], placeholder: true });
    last = match.index + match[0].length;
  }
  if (last < raw.length) {
    spans.push({ text: raw.slice(last), placeholder: false });
  }
  return spans;
}

// src/nodeView.ts
var NodeView = class {
  constructor(container, store) {
    this.container = container;
    this.store = store;
    container.classList.add("node-view");
  }
  render() {
    this.container.textContent = "";
    const doc = this.store.chainFile;
    const nodeId = this.store.selection;
    const node = doc?.chain.nodes.find((n) => n.id === nodeId);
    if (!doc || !node) {
      const hint = document.createElement("div");
      hint.className = "node-view-empty";
      hint.textContent = "Select a node to edit it";
      this.container.append(hint);
      return;
    }
    const heading = document.createElement("h2");
    heading.textContent = `${node.label} \u2014 ${node.kind}`;
    this.container.append(heading);
    switch (node.kind) {
      case "GenericLLM":
      case "LLMClassifier":
        this.renderPromptEditor(node, "template");
        break;
      case "APICall":
        this.renderPromptEditor(node, "url");
        if (typeof node.config["bodyTemplate"] === "string") {
          this.renderPromptEditor(node, "body");
        }
        break;
      case "GenericScript":
        this.renderScriptEditor(node);
        break;
      default:
        this.renderConfigSummary(node);
    }
    this.renderTestingBlock(node);
  }
  templateText(node, part) {
    const key = node.kind === "APICall" ? part === "body" ? "bodyTemplate" : "urlTemplate" : "template";
    const raw = node.config[key];
    return typeof raw === "string" ? raw : "";
  }
  renderPromptEditor(node, part) {
    const section = document.createElement("section");
    section.className = `prompt-section prompt-section-${part}`;
    const highlight = document.createElement("div");
    highlight.className = "prompt-highlight";
    const editor = document.createElement("textarea");
    editor.className = "prompt-editor";
    editor.dataset.part = part;
    editor.value = this.templateText(node, part);
    const syncPreview = document.createElement("div");
    syncPreview.className = "sync-preview";
    const refresh = () => {
      highlight.textContent = "";
      for (const span of highlightSpans(editor.value)) {
        const el = document.createElement(span.placeholder ? "mark" : "span");
        if (span.placeholder) {
          el.className = "placeholder";
        }
        el.textContent = span.text;
        highlight.append(el);
      }
      const preview = previewTemplateEdit(node, editor.value, part);
      const parts = [];
      if (preview.renamed) {
        parts.push(`renames ${preview.renamed[0]} \u2192 ${preview.renamed[1]} (edge kept)`);
      }
      if (preview.added.length) {
        parts.push(`adds ${preview.added.join(", ")}`);
      }
      if (preview.removed.length) {
        parts.push(`removes ${preview.removed.join(", ")} (edges dropped)`);
      }
      syncPreview.textContent = parts.length ? `Saving ${parts.join("; ")}` : "Handles unchanged";
    };
    editor.addEventListener("input", refresh);
    refresh();
    const save = document.createElement("button");
    save.className = "save-prompt";
    save.textContent = "Save prompt";
    save.addEventListener("click", () => {
      void this.store.commitChainEdit((doc) => {
        doc.chain = applyTemplateEdit(doc.chain, node.id, editor.value, part);
      });
    });
    section.append(highlight, editor, syncPreview, save);
    this.container.append(section);
  }
  renderScriptEditor(node) {
    const section = document.createElement("section");
    section.className = "script-section";
    const editor = document.createElement("textarea");
    editor.className = "script-editor";
    editor.value = typeof node.config["source"] === "string" ? node.config["source"] : "";
    const diagnostics = document.createElement("div");
    diagnostics.className = "script-diagnostics";
    const check = document.createElement("button");
    check.className = "check-script";
    check.textContent = "Check";
    check.addEventListener("click", () => {
      void this.checkScript(node, editor.value, diagnostics);
    });
    const save = document.createElement("button");
    save.className = "save-script";
    save.textContent = "Save script";
    save.addEventListener("click", () => {
      void this.store.commitChainEdit((doc) => {
        const target = doc.chain.nodes.find((n) => n.id === node.id);
        if (target) {
          target.config = { ...target.config, source: editor.value };
        }
      });
    });
    section.append(editor, diagnostics, check, save);
    this.container.append(section);
  }
  async checkScript(node, source, out) {
    const doc = structuredClone(this.store.chainFile);
    const target = doc.chain.nodes.find((n) => n.id === node.id);
    target.config = { ...target.config, source };
    try {
      const diagnostics = await this.store.api.validateChain(doc.chain.id, doc);
      const relevant = diagnostics.filter((d) => d.nodeId === node.id);
      out.textContent = relevant.length ? relevant.map((d) => `[${d.code}] ${d.message}`).join("\n") : "Script OK";
      out.classList.toggle("has-errors", relevant.length > 0);
    } catch (err) {
      out.textContent = err instanceof ApiError ? err.message : String(err);
      out.classList.add("has-errors");
    }
  }
  renderConfigSummary(node) {
    const pre = document.createElement("pre");
    pre.className = "config-summary";
    pre.textContent = JSON.stringify(node.config, null, 2);
    this.container.append(pre);
  }
  renderTestingBlock(node) {
    const block = document.createElement("section");
    block.className = "testing-block";
    const title = document.createElement("h3");
    title.textContent = "Test this node";
    block.append(title);
    const fields = /* @__PURE__ */ new Map();
    for (const handle of node.inputs) {
      const row = document.createElement("label");
      row.className = "test-bind-row";
      row.textContent = `${handle.name} (${handle.kind}) `;
      const field = document.createElement("textarea");
      field.className = "test-bind";
      field.dataset.handle = handle.name;
      field.rows = handle.kind === "TextList" ? 3 : 1;
      if (handle.kind === "TextList") {
        field.placeholder = "one item per line";
      }
      row.append(field);
      fields.set(handle.name, field);
      block.append(row);
    }
    const runButton = document.createElement("button");
    runButton.className = "run-unit-test";
    runButton.textContent = "Run unit test";
    const result = document.createElement("div");
    result.className = "unit-result";
    runButton.addEventListener("click", () => {
      void this.runUnitTest(node, fields, result);
    });
    block.append(runButton, result);
    this.container.append(block);
  }
  async runUnitTest(node, fields, result) {
    const bindings = {};
    for (const handle of node.inputs) {
      const raw = fields.get(handle.name)?.value ?? "";
      bindings[handle.name] = handle.kind === "TextList" ? { kind: "TextList", items: raw === "" ? [] : raw.split("\n") } : { kind: "Text", text: raw };
    }
    result.textContent = "Running\u2026";
    try {
      const record = await this.store.api.unitTestNode(
        this.store.chainId,
        node.id,
        bindings,
        { kind: "scripted" }
      );
      result.textContent = "";
      result.append(renderRecord(record));
    } catch (err) {
      result.textContent = err instanceof ApiError ? err.message : String(err);
    }
  }
};
function renderRecord(record) {
  const el = document.createElement("div");
  el.className = `record record-${record.status}`;
  const status = document.createElement("div");
  status.className = "record-status";
  status.textContent = `status: ${record.status}`;
  el.append(status);
  if (record.errorMessage) {
    const msg = document.createElement("div");
    msg.className = "record-error";
    msg.textContent = record.errorMessage;
    el.append(msg);
  }
  for (const [handle, value] of Object.entries(record.output)) {
    const row = document.createElement("div");
    row.className = "record-output";
    row.dataset.handle = handle;
    row.textContent = `${handle}: ${fullValue(value)}`;
    el.append(row);
  }
  return el;
}

// src/main.ts
function mountApp(root, baseUrl = "") {
  root.innerHTML = `
    <div class="layout">
      <aside class="sidebar">
        <h1>chainweaver</h1>
        <h2>Gallery</h2>
        <ul class="gallery-list"></ul>
        <h2>Chains</h2>
        <ul class="chain-list"></ul>
      </aside>
      <main class="workspace">
        <div class="debug-slot"></div>
        <div class="canvas-slot"></div>
      </main>
      <aside class="panel-slot"></aside>
      <div class="toast-area"></div>
    </div>
  `;
  const api = new ApiClient(baseUrl);
  const store = new EditorStore(api);
  const chainView = new ChainView(root.querySelector(".canvas-slot"), store);
  const nodeView = new NodeView(root.querySelector(".panel-slot"), store);
  const debugControls = new DebugControls(root.querySelector(".debug-slot"), store);
  const toastArea = root.querySelector(".toast-area");
  const refresh = () => {
    chainView.render();
    nodeView.render();
    debugControls.render();
    renderToast();
  };
  const renderToast = () => {
    toastArea.textContent = "";
    const rejection = store.lastRejection;
    if (rejection === null) {
      return;
    }
    const toast = document.createElement("div");
    toast.className = "toast toast-error";
    const lines = [
      rejection.message,
      ...rejection.diagnostics.map((d) => `[${d.code}] ${d.message}`)
    ];
    toast.textContent = lines.join("\n");
    toastArea.append(toast);
  };
  store.subscribe(refresh);
  void populateSidebar(root, store);
  refresh();
  return { store, chainView, nodeView, debugControls, refresh };
}
async function populateSidebar(root, store) {
  const galleryList = root.querySelector(".gallery-list");
  const chainList = root.querySelector(".chain-list");
  const [gallery, chains] = await Promise.all([store.api.listGallery(), store.api.listChains()]);
  for (const entry of gallery) {
    const item = document.createElement("li");
    const button = document.createElement("button");
    button.className = "gallery-item";
    button.dataset.entryId = entry.id;
    button.textContent = entry.title;
    button.title = entry.description;
    button.addEventListener("click", () => void store.loadChain(entry.id));
    item.append(button);
    galleryList.append(item);
  }
  for (const chain of chains) {
    const item = document.createElement("li");
    const button = document.createElement("button");
    button.className = "chain-item";
    button.dataset.chainId = chain.id;
    button.textContent = chain.name;
    button.addEventListener("click", () => void store.loadChain(chain.id));
    item.append(button);
    chainList.append(item);
  }
}
if (typeof document !== "undefined" && document.getElementById("app")) {
  mountApp(document.getElementById("app"));
}
export {
  mountApp
};
//# sourceMappingURL=app.js.map
