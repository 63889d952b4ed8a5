/**
 * The editor never computes chain semantics locally: values on screen come
 * from service responses and run events. This lint-style check keeps value
 * computation (dynamic code execution, completion calls outside the API
 * client) out of the UI source.
 */

import { readFileSync, readdirSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, test } from "vitest";

const SRC = join(__dirname, "..", "src");

const BANNED = [
  /\beval\s*\(/,
  /new\s+Function\s*\(/,
  /\bcomplete\s*\(/, // completions belong to the backend, behind the service
];

describe("no local evaluation of chain semantics", () => {
  test("banned constructs are absent from the UI source", () => {
    for (const file of readdirSync(SRC)) {
      const text = readFileSync(join(SRC, file), "utf-8");
      for (const pattern of BANNED) {
        expect(pattern.test(text), `${file} matches ${pattern}`).toBe(false);
      }
    }
  });

  test("only the API client talks to the network", () => {
    for (const file of readdirSync(SRC)) {
      if (file === "api.ts" || file === "events.ts") {
        continue;
      }
      const text = readFileSync(join(SRC, file), "utf-8");
      expect(/\bfetch\s*\(/.test(text), `${file} calls fetch directly`).toBe(false);
    }
  });
});
