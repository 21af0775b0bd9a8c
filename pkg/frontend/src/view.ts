/** DOM rendering. Every number shown to the user is the server's value
 * formatted to the server's own six-decimal convention; this module
 * computes nothing about ranking — rows render in the order given. */

import { ApiError, DocDetail, SearchResponse, SearchResult } from "./api";
import { fmt6 } from "./format";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function rtl<T extends HTMLElement>(node: T): T {
  node.dir = "rtl";
  return node;
}

export function renderOmega(
  valueEl: HTMLElement,
  modeEl: HTMLElement,
  omega: number,
  overridden: boolean,
): void {
  valueEl.textContent = fmt6(omega);
  modeEl.textContent = overridden ? "override" : "server";
}

const SCORE_FIELDS = [
  ["jss", "jss"],
  ["bm25", "bm25"],
  ["tfidf_sim", "tf-idf cos"],
  ["sem_sim", "semantic cos"],
] as const;

function scoreList(result: SearchResult): HTMLElement {
  const list = el("dl", "scores");
  list.dir = "ltr";
  for (const [field, label] of SCORE_FIELDS) {
    list.appendChild(el("dt", "score-label", label));
    const value = el("dd", "score-value", fmt6(result[field]));
    value.dataset.field = field;
    list.appendChild(value);
  }
  return list;
}

function share(contribution: number, scale: number): number {
  if (scale <= 0) {
    return 0;
  }
  return Math.min(Math.max(contribution / scale, 0), 1);
}

/** Stacked bar: the lexical segment is omega*tfidf_sim, the semantic
 * segment (1-omega)*sem_sim — the two contributions that sum to jss —
 * scaled against the best jss in the result set. */
function stackedBar(
  result: SearchResult,
  omega: number,
  maxJss: number,
): HTMLElement {
  const bar = el("div", "bar");
  bar.setAttribute("aria-hidden", "true");
  const lex = el("span", "bar-lex");
  lex.style.width = `${(share(omega * result.tfidf_sim, maxJss) * 100).toFixed(2)}%`;
  lex.title = "ω · tfidf_sim";
  const sem = el("span", "bar-sem");
  sem.style.width = `${(share((1 - omega) * result.sem_sim, maxJss) * 100).toFixed(2)}%`;
  sem.title = "(1−ω) · sem_sim";
  bar.appendChild(lex);
  bar.appendChild(sem);
  return bar;
}

function resultRow(
  result: SearchResult,
  omega: number,
  maxJss: number,
): HTMLLIElement {
  const row = el("li", "result");
  row.dataset.docId = result.doc_id;

  const head = el("div", "result-head");
  head.appendChild(el("span", "rank", String(result.rank)));
  head.appendChild(rtl(el("h3", "title", result.title)));
  const inspect = el("button", "inspect", result.doc_id);
  inspect.type = "button";
  inspect.dataset.docId = result.doc_id;
  head.appendChild(inspect);
  row.appendChild(head);

  row.appendChild(stackedBar(result, omega, maxJss));
  row.appendChild(scoreList(result));
  row.appendChild(rtl(el("p", "snippet", result.snippet)));
  return row;
}

/** Rows appear exactly in the order the server returned them. */
export function renderResults(
  list: HTMLElement,
  response: SearchResponse,
): void {
  list.textContent = "";
  if (response.results.length === 0) {
    list.appendChild(el("li", "empty", "no results"));
    return;
  }
  const maxJss = Math.max(...response.results.map((r) => r.jss));
  for (const result of response.results) {
    list.appendChild(resultRow(result, response.omega, maxJss));
  }
}

export function renderError(banner: HTMLElement, error: unknown): void {
  banner.hidden = false;
  if (error instanceof ApiError && error.status === 503) {
    banner.textContent = "engine loading — try again shortly";
    return;
  }
  if (error instanceof ApiError) {
    banner.textContent = `search failed: ${error.message} (HTTP ${error.status})`;
    return;
  }
  const message = error instanceof Error ? error.message : String(error);
  banner.textContent = `search failed: ${message}`;
}

export function clearError(banner: HTMLElement): void {
  banner.hidden = true;
  banner.textContent = "";
}

export function renderDoc(pane: HTMLElement, doc: DocDetail): void {
  pane.textContent = "";
  pane.hidden = false;
  pane.appendChild(rtl(el("h2", "doc-title", doc.title)));

  const meta = el("p", "doc-meta");
  meta.appendChild(el("span", "doc-id", doc.doc_id));
  if (doc.published_at !== null) {
    meta.appendChild(el("span", "doc-date", doc.published_at));
  }
  if (doc.url !== null) {
    const link = el("a", "doc-url", doc.url);
    link.href = doc.url;
    link.rel = "noopener";
    meta.appendChild(link);
  }
  pane.appendChild(meta);

  pane.appendChild(rtl(el("p", "doc-body", doc.body)));

  const phrases = rtl(el("ul", "phrases"));
  for (const phrase of doc.noun_phrases) {
    phrases.appendChild(el("li", "phrase", phrase));
  }
  pane.appendChild(phrases);
}

export function renderDocNotFound(pane: HTMLElement, docId: string): void {
  pane.textContent = "";
  pane.hidden = false;
  pane.appendChild(el("p", "doc-missing", `document not found: ${docId}`));
}
