/** End-to-end fidelity against the real backend.
 *
 * Spawns the Python service over a deterministic 120-document corpus,
 * drives the actual UI (jsdom), and checks the two release criteria:
 *   1. for five scripted queries, every number the UI renders equals the
 *      API's own six-decimal serialization, string-for-string;
 *   2. with the omega slider at 0 and at 1, the UI shows exactly the
 *      orderings that direct API calls return for those endpoints.
 */

import { execFileSync, spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { initSearchPage, SearchPage } from "../src/controller";

const REPO_ROOT = path.resolve(
  path.dirname(fileURLToPath(import.meta.url)),
  "../..",
);

const SCRIPTED_QUERIES = [
  "چرا واکسن درمان مهم است؟",
  "هوش مصنوعی چیست؟",
  "بازیکن فوتبال تیم",
  "اقتصاد تورم",
  "دانشگاه آموزش پژوهش",
];

const PORT = 18000 + (process.pid % 10000);
const BASE = `http://127.0.0.1:${PORT}`;

let workdir: string;
let server: ChildProcess;

function cli(args: string[], cwd: string): void {
  execFileSync("python3", ["-m", "coper.cli", ...args], {
    cwd,
    stdio: "pipe",
    env: { ...process.env, PYTHONHASHSEED: "0" },
  });
}

async function waitForHealthy(): Promise<void> {
  for (let attempt = 0; attempt < 120; attempt++) {
    try {
      const res = await fetch(`${BASE}/healthz`);
      if (res.ok && (await res.text()) === "ok") {
        return;
      }
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 500));
  }
  throw new Error(`service on ${BASE} never became healthy`);
}

beforeAll(async () => {
  workdir = mkdtempSync(path.join(tmpdir(), "coper-ui-e2e-"));
  execFileSync(
    "python3",
    [
      "-c",
      [
        "import sys",
        `sys.path.insert(0, ${JSON.stringify(path.join(REPO_ROOT, "tests"))})`,
        "import fixtures",
        "from pathlib import Path",
        "fixtures.write_corpus(Path('corpus.jsonl'))",
      ].join("\n"),
    ],
    { cwd: workdir, stdio: "pipe" },
  );
  cli(["--data-dir", "data", "ingest", "corpus.jsonl"], workdir);
  cli(["--data-dir", "data", "build"], workdir);
  server = spawn(
    "python3",
    [
      "-m",
      "coper.cli",
      "--data-dir",
      "data",
      "serve",
      "--port",
      String(PORT),
    ],
    { cwd: workdir, stdio: "ignore", env: { ...process.env } },
  );
  await waitForHealthy();
});

afterAll(() => {
  server?.kill("SIGTERM");
  if (workdir) {
    rmSync(workdir, { recursive: true, force: true });
  }
});

function mountPage(): SearchPage {
  document.body.innerHTML = "<div id='app'></div>";
  return initSearchPage(document.getElementById("app")!, { base: BASE });
}

function renderedNumbers(): string[] {
  return [...document.querySelectorAll(".score-value")].map(
    (node) => node.textContent ?? "",
  );
}

function renderedIds(): (string | undefined)[] {
  return [...document.querySelectorAll<HTMLElement>("li.result")].map(
    (row) => row.dataset.docId,
  );
}

async function directSearch(body: Record<string, unknown>): Promise<{
  raw: string;
  parsed: {
    omega: number;
    results: { doc_id: string; rank: number }[];
  };
}> {
  const res = await fetch(`${BASE}/api/search`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  expect(res.ok).toBe(true);
  const raw = await res.text();
  return { raw, parsed: JSON.parse(raw) };
}

describe("rendered numbers equal the API's six-decimal serialization", () => {
  for (const query of SCRIPTED_QUERIES) {
    it(`query: ${query}`, async () => {
      const page = mountPage();
      page.elements.query.value = query;
      page.elements.query.dispatchEvent(new Event("input"));
      page.elements.k.value = "10";
      await page.submit();

      const { raw, parsed } = await directSearch({ query, k: 10 });

      // every six-decimal lexeme in the raw JSON, in document order:
      // omega first, then jss/bm25/tfidf_sim/sem_sim per result
      const lexemes = raw.match(/-?\d+\.\d{6}/g) ?? [];
      expect(lexemes.length).toBe(1 + parsed.results.length * 4);
      expect(renderedNumbers()).toEqual(lexemes);

      // rows match the server's ids and ranks, in order
      expect(renderedIds()).toEqual(parsed.results.map((r) => r.doc_id));
      const ranks = [...document.querySelectorAll(".rank")].map(
        (n) => n.textContent,
      );
      expect(ranks).toEqual(parsed.results.map((r) => String(r.rank)));
    });
  }
});

describe("omega slider endpoints reproduce the API orderings", () => {
  for (const omega of [0, 1]) {
    it(`omega = ${omega}`, async () => {
      const query = "واکسن قلب سلامت";
      const page = mountPage();
      page.elements.query.value = query;
      page.elements.query.dispatchEvent(new Event("input"));
      page.elements.k.value = "10";
      page.elements.omegaAuto.checked = false;
      page.elements.omegaSlider.value = String(omega);
      await page.submit();

      const { raw, parsed } = await directSearch({ query, k: 10, omega });
      expect(parsed.results.length).toBeGreaterThan(1);
      expect(renderedIds()).toEqual(parsed.results.map((r) => r.doc_id));
      expect(renderedNumbers()).toEqual(raw.match(/-?\d+\.\d{6}/g) ?? []);
      expect(page.elements.omegaValue.textContent).toBe(
        omega === 0 ? "0.000000" : "1.000000",
      );
      expect(page.elements.omegaMode.textContent).toBe("override");
    });
  }

  it("the two endpoint orderings differ (the blend is live)", async () => {
    const query = "واکسن قلب سلامت";
    const lexical = await directSearch({ query, k: 10, omega: 1 });
    const semantic = await directSearch({ query, k: 10, omega: 0 });
    expect(lexical.parsed.results.map((r) => r.doc_id)).not.toEqual(
      semantic.parsed.results.map((r) => r.doc_id),
    );
  });
});
