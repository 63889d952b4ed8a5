import { describe, expect, test, vi } from "vitest";

import { readNdjson, streamRunEvents } from "../src/events";
import type { RunEventEnvelope } from "../src/types";

function bodyFromLines(lines: string[]): ReadableStream<Uint8Array> {
  const encoder = new TextEncoder();
  return new ReadableStream({
    start(controller) {
      for (const line of lines) {
        controller.enqueue(encoder.encode(line));
      }
      controller.close();
    },
  });
}

describe("readNdjson", () => {
  test("parses one document per line across chunk boundaries", async () => {
    const body = bodyFromLines(['{"a":', '1}\n{"b":2}\n', '{"c":3}']);
    const docs: unknown[] = [];
    for await (const doc of readNdjson(body)) {
      docs.push(doc);
    }
    expect(docs).toEqual([{ a: 1 }, { b: 2 }, { c: 3 }]);
  });

  test("skips blank lines", async () => {
    const docs: unknown[] = [];
    for await (const doc of readNdjson(bodyFromLines(["{}\n", "\n", "{}\n"]))) {
      docs.push(doc);
    }
    expect(docs).toEqual([{}, {}]);
  });
});

function envelope(sequence: number): RunEventEnvelope {
  return { runId: "r", sequence, payload: { type: "runStarted" } };
}

function fetchReturningEnvelopes(envelopes: RunEventEnvelope[]): typeof fetch {
  return (async () => ({
    ok: true,
    status: 200,
    body: bodyFromLines(envelopes.map((e) => JSON.stringify(e) + "\n")),
  })) as unknown as typeof fetch;
}

describe("streamRunEvents", () => {
  test("delivers events in order and returns the last sequence", async () => {
    const seen: number[] = [];
    const last = await streamRunEvents("", "r", 0, {
      onEvent: (e) => seen.push(e.sequence),
      fetchImpl: fetchReturningEnvelopes([envelope(1), envelope(2), envelope(3)]),
    });
    expect(seen).toEqual([1, 2, 3]);
    expect(last).toBe(3);
  });

  test("resumes from a cursor", async () => {
    const seen: number[] = [];
    const last = await streamRunEvents("", "r", 2, {
      onEvent: (e) => seen.push(e.sequence),
      fetchImpl: fetchReturningEnvelopes([envelope(3), envelope(4)]),
    });
    expect(seen).toEqual([3, 4]);
    expect(last).toBe(4);
  });

  test("stops and reports on a sequence gap", async () => {
    const seen: number[] = [];
    const onGap = vi.fn();
    const last = await streamRunEvents("", "r", 0, {
      onEvent: (e) => seen.push(e.sequence),
      onGap,
      fetchImpl: fetchReturningEnvelopes([envelope(1), envelope(3)]),
    });
    expect(seen).toEqual([1]);
    expect(onGap).toHaveBeenCalledWith(2, 3);
    expect(last).toBe(1);
  });
});
