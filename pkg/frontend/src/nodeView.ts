/**
 * Node View: the kind-specific editing panel for the selected node, plus
 * the testing block that runs the node on its own with manual bindings.
 *
 * Prompt edits are previewed live (placeholder highlighting and the
 * handle changes a save would make) and saved through the store's
 * PUT path; script sources are checked by asking the server to validate
 * a draft, so parse errors come back with positions from the one true
 * validator.
 */

import { ApiError } from "./api";
import { fullValue } from "./preview";
import { applyTemplateEdit, highlightSpans, previewTemplateEdit } from "./sync";
import type { EditorStore } from "./state";
import type { ChainFileDoc, NodeDoc, NodeRunRecordDoc, ValueDoc } from "./types";

export class NodeView {
  constructor(
    private readonly container: HTMLElement,
    private readonly store: EditorStore,
  ) {
    container.classList.add("node-view");
  }

  render(): void {
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
    heading.textContent = `${node.label} — ${node.kind}`;
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

  private templateText(node: NodeDoc, part: string): string {
    const key =
      node.kind === "APICall" ? (part === "body" ? "bodyTemplate" : "urlTemplate") : "template";
    const raw = node.config[key];
    return typeof raw === "string" ? raw : "";
  }

  private renderPromptEditor(node: NodeDoc, part: string): void {
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
      const parts: string[] = [];
      if (preview.renamed) {
        parts.push(`renames ${preview.renamed[0]} → ${preview.renamed[1]} (edge kept)`);
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
      void this.store.commitChainEdit((doc: ChainFileDoc) => {
        doc.chain = applyTemplateEdit(doc.chain, node.id, editor.value, part);
      });
    });

    section.append(highlight, editor, syncPreview, save);
    this.container.append(section);
  }

  private renderScriptEditor(node: NodeDoc): void {
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

  private async checkScript(node: NodeDoc, source: string, out: HTMLElement): Promise<void> {
    const doc = structuredClone(this.store.chainFile!);
    const target = doc.chain.nodes.find((n) => n.id === node.id)!;
    target.config = { ...target.config, source };
    try {
      const diagnostics = await this.store.api.validateChain(doc.chain.id, doc);
      const relevant = diagnostics.filter((d) => d.nodeId === node.id);
      out.textContent = relevant.length
        ? relevant.map((d) => `[${d.code}] ${d.message}`).join("\n")
        : "Script OK";
      out.classList.toggle("has-errors", relevant.length > 0);
    } catch (err) {
      out.textContent = err instanceof ApiError ? err.message : String(err);
      out.classList.add("has-errors");
    }
  }

  private renderConfigSummary(node: NodeDoc): void {
    const pre = document.createElement("pre");
    pre.className = "config-summary";
    pre.textContent = JSON.stringify(node.config, null, 2);
    this.container.append(pre);
  }

  private renderTestingBlock(node: NodeDoc): void {
    const block = document.createElement("section");
    block.className = "testing-block";
    const title = document.createElement("h3");
    title.textContent = "Test this node";
    block.append(title);

    const fields = new Map<string, HTMLTextAreaElement>();
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

  private async runUnitTest(
    node: NodeDoc,
    fields: Map<string, HTMLTextAreaElement>,
    result: HTMLElement,
  ): Promise<void> {
    const bindings: Record<string, ValueDoc> = {};
    for (const handle of node.inputs) {
      const raw = fields.get(handle.name)?.value ?? "";
      bindings[handle.name] =
        handle.kind === "TextList"
          ? { kind: "TextList", items: raw === "" ? [] : raw.split("\n") }
          : { kind: "Text", text: raw };
    }
    result.textContent = "Running…";
    try {
      const record = await this.store.api.unitTestNode(
        this.store.chainId!,
        node.id,
        bindings,
        { kind: "scripted" },
      );
      result.textContent = "";
      result.append(renderRecord(record));
    } catch (err) {
      result.textContent = err instanceof ApiError ? err.message : String(err);
    }
  }
}

export function renderRecord(record: NodeRunRecordDoc): HTMLElement {
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
