/**
 * Authoring-side handle synchronization.
 *
 * Editing a prompt re-derives the node's input handles from its
 * `[[placeholder]]` set, treating a single name swap as a rename that
 * keeps the attached edge. This mirrors the chain-file semantics so the
 * editor can preview an edit before saving; the server remains the
 * validator of record — every save round-trips through PUT.
 */

import type { ChainDoc, EdgeDoc, NodeDoc } from "./types";

const PLACEHOLDER_RE = /\[\[([A-Za-z_][A-Za-z0-9_]*)\]\]/g;

export function extractPlaceholders(raw: string): string[] {
  const seen: string[] = [];
  for (const match of raw.matchAll(PLACEHOLDER_RE)) {
    if (!seen.includes(match[1])) {
      seen.push(match[1]);
    }
  }
  return seen;
}

export interface SyncPreview {
  added: string[];
  removed: string[];
  renamed: [string, string] | null;
}

export function diffHandleNames(current: string[], wanted: string[]): SyncPreview {
  const added = wanted.filter((n) => !current.includes(n));
  const removed = current.filter((n) => !wanted.includes(n));
  if (added.length === 1 && removed.length === 1) {
    return { added: [], removed: [], renamed: [removed[0], added[0]] };
  }
  return { added, removed, renamed: null };
}

function templateParts(node: NodeDoc): { key: string; extra?: string } | null {
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

export function nodePlaceholders(node: NodeDoc): string[] | null {
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

/** Preview of what saving a new prompt text would do to a node's handles. */
export function previewTemplateEdit(node: NodeDoc, raw: string, part = "template"): SyncPreview {
  const current = node.inputs.map((h) => h.name);
  const draft: NodeDoc = { ...node, config: { ...node.config, [partKey(node, part)]: raw } };
  const wanted = nodePlaceholders(draft) ?? current;
  return diffHandleNames(current, wanted);
}

function partKey(node: NodeDoc, part: string): string {
  if (node.kind === "APICall") {
    return part === "body" ? "bodyTemplate" : "urlTemplate";
  }
  return "template";
}

/**
 * Apply a prompt edit to the chain mirror: update the template, re-derive
 * input handles (a rename keeps the handle's kind and edge; removals drop
 * their edges), and rewire. The result is what gets PUT to the server.
 */
export function applyTemplateEdit(
  chain: ChainDoc,
  nodeId: string,
  raw: string,
  part = "template",
): ChainDoc {
  const node = chain.nodes.find((n) => n.id === nodeId);
  if (!node) {
    throw new Error(`no node ${nodeId}`);
  }
  const key = partKey(node, part);
  const updated: NodeDoc = { ...node, config: { ...node.config, [key]: raw } };
  const wanted = nodePlaceholders(updated);
  if (wanted === null) {
    throw new Error(`node ${nodeId} has no editable template`);
  }
  const current = updated.inputs.map((h) => h.name);
  const preview = diffHandleNames(current, wanted);

  let inputs;
  if (preview.renamed) {
    const [oldName, newName] = preview.renamed;
    inputs = updated.inputs.map((h) => (h.name === oldName ? { ...h, name: newName } : h));
  } else {
    const survivors = updated.inputs.filter((h) => wanted.includes(h.name));
    const additions = preview.added.map((name) => ({ name, kind: "Text" as const }));
    inputs = [...survivors, ...additions];
  }
  const synced: NodeDoc = { ...updated, inputs };
  if (synced.kind === "LLMClassifier" && preview.renamed) {
    const [oldName, newName] = preview.renamed;
    if (synced.config["payloadInput"] === oldName) {
      synced.config = { ...synced.config, payloadInput: newName };
    }
  }

  const keep = new Set(inputs.map((h) => h.name));
  const edges: EdgeDoc[] = [];
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
    nodes: chain.nodes.map((n) => (n.id === nodeId ? synced : n)),
    edges,
  };
}

/** Split prompt text into literal and placeholder spans for highlighting. */
export function highlightSpans(raw: string): { text: string; placeholder: boolean }[] {
  const spans: { text: string; placeholder: boolean }[] = [];
  let last = 0;
  for (const match of raw.matchAll(PLACEHOLDER_RE)) {
    if (match.index! > last) {
      spans.push({ text: raw.slice(last, match.index), placeholder: false });
    }
    spans.push({ text: match[0], placeholder: true });
    last = match.index! + match[0].length;
  }
  if (last < raw.length) {
    spans.push({ text: raw.slice(last), placeholder: false });
  }
  return spans;
}
