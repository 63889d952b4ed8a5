/**
 * Inline value previews: the canvas shows at most 80 characters of a text
 * or the first 3 items of a list; the full value lives in an expandable
 * drawer. Pure truncation — values are rendered exactly as the service
 * sent them, never computed here.
 */

import type { ValueDoc } from "./types";

export const PREVIEW_CHARS = 80;
export const PREVIEW_ITEMS = 3;

export function previewText(text: string): string {
  return text.length > PREVIEW_CHARS ? text.slice(0, PREVIEW_CHARS) + "…" : text;
}

export function previewValue(value: ValueDoc): string {
  if (value.kind === "Text") {
    return previewText(value.text);
  }
  const shown = value.items.slice(0, PREVIEW_ITEMS).map(previewText);
  const suffix = value.items.length > PREVIEW_ITEMS ? ` … +${value.items.length - PREVIEW_ITEMS}` : "";
  return `[${value.items.length}] ` + shown.join(" | ") + suffix;
}

export function fullValue(value: ValueDoc): string {
  return value.kind === "Text" ? value.text : value.items.join("\n");
}
