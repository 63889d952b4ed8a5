/**
 * Run and debug controls: start a run with the toggled breakpoints, watch
 * its event stream, edit a paused node's output, answer user actions, and
 * resume. Every value shown comes from a service response or run event.
 */

import { ApiError } from "./api";
import { streamRunEvents } from "./events";
import { fullValue } from "./preview";
import type { EditorStore } from "./state";
import { emptyRunView } from "./state";
import type { ValueDoc } from "./types";

export class DebugControls {
  private backendKind: "scripted" | "echo" = "scripted";
  private busy = false;

  constructor(
    private readonly container: HTMLElement,
    private readonly store: EditorStore,
  ) {
    container.classList.add("debug-controls");
  }

  /** Pull any events recorded past the view's cursor and apply them in order. */
  private async replayEvents(runId: string): Promise<void> {
    const since = this.store.run?.lastSequence ?? 0;
    await streamRunEvents(this.store.api.baseUrl, runId, since, {
      onEvent: (envelope) => this.store.applyEvent(envelope),
    });
  }

  async startRun(): Promise<void> {
    const chainId = this.store.chainId;
    if (chainId === null || this.busy) {
      return;
    }
    this.busy = true;
    try {
      const { runId } = await this.store.api.startRun(chainId, {
        breakpoints: [...this.store.breakpoints],
        backend: { kind: this.backendKind },
      });
      this.store.setRun(emptyRunView(runId));
      await this.replayEvents(runId);
      this.store.adoptSnapshot(await this.store.api.getRun(runId));
    } finally {
      this.busy = false;
    }
  }

  async resume(): Promise<void> {
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

  async saveOutputEdit(nodeId: string, handle: string, value: ValueDoc): Promise<void> {
    const run = this.store.run;
    if (run === null) {
      return;
    }
    const snapshot = await this.store.api.editNodeOutput(run.runId, nodeId, handle, value);
    await this.replayEvents(run.runId);
    this.store.adoptSnapshot(snapshot);
  }

  async answer(answer: { select: number | number[] } | { text: string }): Promise<void> {
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

  render(): void {
    this.container.textContent = "";
    const run = this.store.run;

    const bar = document.createElement("div");
    bar.className = "run-bar";

    const backendSelect = document.createElement("select");
    backendSelect.className = "backend-select";
    for (const kind of ["scripted", "echo"] as const) {
      const option = document.createElement("option");
      option.value = kind;
      option.textContent = kind;
      option.selected = kind === this.backendKind;
      backendSelect.append(option);
    }
    backendSelect.addEventListener("change", () => {
      this.backendKind = backendSelect.value as "scripted" | "echo";
    });

    const runButton = document.createElement("button");
    runButton.className = "run-button";
    runButton.textContent = "Run";
    runButton.disabled = this.store.chainId === null;
    runButton.addEventListener("click", () => void this.startRun().catch((err) => this.fail(err)));

    const resumeButton = document.createElement("button");
    resumeButton.className = "resume-button";
    resumeButton.textContent = "Resume";
    resumeButton.disabled =
      run === null ||
      run.status === "done" ||
      run.status === "failed" ||
      run.status === null ||
      run.status === "running" ||
      run.pending !== null;
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

  private renderPausedPanel(nodeId: string): HTMLElement {
    const run = this.store.run!;
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
      const value: ValueDoc =
        kind === "TextList"
          ? { kind: "TextList", items: editor.value === "" ? [] : editor.value.split("\n") }
          : { kind: "Text", text: editor.value };
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

  private renderUserActionDialog(): HTMLElement {
    const pending = this.store.run!.pending!;
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
      const submit = document.createElement("button");
      submit.className = "ua-answer";
      submit.textContent = "Submit";
      submit.addEventListener("click", () => {
        void this.answer({ text: editor.value }).catch((err) => this.fail(err));
      });
      dialog.append(editor, submit);
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
      const chosen = [...list.querySelectorAll<HTMLInputElement>("input:checked")].map((el) =>
        Number(el.value),
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

  private renderFinalOutputs(outputs: Record<string, Record<string, ValueDoc>>): HTMLElement {
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

  private fail(err: unknown): void {
    const note = document.createElement("div");
    note.className = "debug-error";
    note.textContent = err instanceof ApiError ? `${err.body.code}: ${err.message}` : String(err);
    this.container.append(note);
  }
}
