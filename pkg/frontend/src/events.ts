/**
 * Run event stream reader.
 *
 * The service publishes newline-delimited JSON envelopes with gapless
 * per-run sequence numbers. The reader tracks the last sequence it has
 * seen, so a dropped connection (or a paused run whose stream the server
 * closed) resumes exactly where it left off via `?since=`.
 */

import type { RunEventEnvelope } from "./types";

export interface EventStreamOptions {
  /** Called for each event, in sequence order. */
  onEvent: (envelope: RunEventEnvelope) => void;
  /** Called when a sequence gap is detected; the stream stops. */
  onGap?: (expected: number, got: number) => void;
  /** Keep the connection open while the run is live. */
  follow?: boolean;
  fetchImpl?: typeof fetch;
}

export async function* readNdjson(
  body: ReadableStream<Uint8Array>,
): AsyncGenerator<unknown> {
  const reader = body.getReader();
  const decoder = new TextDecoder();
  let buffer = "";
  for (;;) {
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

/**
 * Read one connection's worth of events starting after `since`.
 * Returns the last sequence seen (== `since` if nothing arrived).
 */
export async function streamRunEvents(
  baseUrl: string,
  runId: string,
  since: number,
  options: EventStreamOptions,
): Promise<number> {
  const fetchImpl = options.fetchImpl ?? fetch;
  const follow = options.follow ?? false;
  const res = await fetchImpl(
    `${baseUrl}/runs/${encodeURIComponent(runId)}/events?since=${since}&follow=${follow}`,
  );
  if (!res.ok || res.body === null) {
    throw new Error(`event stream failed: ${res.status}`);
  }
  let cursor = since;
  for await (const raw of readNdjson(res.body)) {
    const envelope = raw as RunEventEnvelope;
    if (envelope.sequence !== cursor + 1) {
      options.onGap?.(cursor + 1, envelope.sequence);
      return cursor;
    }
    cursor = envelope.sequence;
    options.onEvent(envelope);
  }
  return cursor;
}
