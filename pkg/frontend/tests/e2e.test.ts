// @vitest-environment happy-dom
// @vitest-environment-options { "url": "http://127.0.0.1:8791" }
//
// End-to-end: the UI against a live service holding the micro-qald
// fixture. Requires python with the soda package installed (the repo's
// own environment provides both). The document origin is pinned to the
// service address because happy-dom enforces the same-origin policy.
import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { App } from "../src/app.js";
import type { AskResponse } from "../src/types.js";

const REPO = resolve(dirname(fileURLToPath(import.meta.url)), "..", "..");
const PYTHON = process.env.SODA_PYTHON ?? "python3";
const PORT = 8791;
const BASE = `http://127.0.0.1:${PORT}`;
const FIG3_QUESTION = "What are the drugs for diseases associated with the BRCA genes?";

let server: ChildProcess | null = null;
let workdir: string;

async function waitForHealth(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt += 1) {
    try {
      const response = await fetch(`${BASE}/api/health`);
      if (response.status === 200) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  throw new Error("service did not become healthy");
}

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "soda-ui-e2e-"));
  const artifacts = join(workdir, "artifacts");
  const indexed = spawnSync(
    PYTHON,
    ["-m", "soda.cli", "index", join(REPO, "fixtures", "micro-qald.nt"), "--out", artifacts],
    { cwd: REPO, encoding: "utf-8" },
  );
  if (indexed.status !== 0) {
    throw new Error(`indexing failed: ${indexed.stderr}`);
  }
  server = spawn(
    PYTHON,
    ["-m", "soda.cli", "serve", "--artifacts", artifacts, "--port", String(PORT)],
    { cwd: REPO, stdio: "ignore" },
  );
  await waitForHealth();
});

afterAll(() => {
  server?.kill();
  rmSync(workdir, { recursive: true, force: true });
});

describe("UI against the live service", () => {
  it("renders the ranked interpretations for the gene-drug question", async () => {
    const realFetch = globalThis.fetch;
    let fetches = 0;
    globalThis.fetch = ((...args: Parameters<typeof fetch>) => {
      fetches += 1;
      return realFetch(...args);
    }) as typeof fetch;
    try {
      const root = document.createElement("main");
      document.body.appendChild(root);
      const app = new App(root, { apiBase: BASE });
      await app.submitQuestion(FIG3_QUESTION);

      const cards = app.cards();
      expect(cards.length).toBeGreaterThanOrEqual(1);

      // the same request made directly must describe exactly what the UI
      // shows (responses are deterministic)
      const direct = await realFetch(`${BASE}/api/ask`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ question: FIG3_QUESTION }),
      });
      const payload = (await direct.json()) as AskResponse;
      expect(cards.length).toBe(payload.interpretations.length);
      payload.interpretations.forEach((interpretation, i) => {
        expect(cards[i].dataset.rank).toBe(String(interpretation.rank));
        expect(cards[i].dataset.sparql).toBe(interpretation.sparql);
        const pre = cards[i].querySelector("pre.sparql")!;
        expect(pre.textContent).toBe(interpretation.sparql);
      });
      expect(payload.interpretations[0].sparql).toContain('"brca"');

      // selecting rank 2 expands it with zero additional requests
      const before = fetches;
      const second = cards.find((c) => c.dataset.rank === "2");
      expect(second).toBeDefined();
      second!.querySelector<HTMLButtonElement>(".card-header")!.click();
      expect(app.selectedCard()!.dataset.rank).toBe("2");
      expect(fetches).toBe(before);
    } finally {
      globalThis.fetch = realFetch;
    }
  });

  it("surfaces 422 responses with the skipped words", async () => {
    const root = document.createElement("main");
    document.body.appendChild(root);
    const app = new App(root, { apiBase: BASE });
    await app.submitQuestion("florble wumpus zonk");
    expect(root.querySelector(".unmatched")!.textContent).toContain("florble");
  });
});
