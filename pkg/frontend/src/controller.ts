/** Page wiring: form state, request lifecycle, and rendering hand-off.
 *
 * Request discipline: at most one search request is in flight — starting
 * a new one aborts the old — and every response is checked against a
 * sequence number so a slow superseded response can never overwrite a
 * newer one.
 */

import {
  fetchDoc as apiFetchDoc,
  search as apiSearch,
  ApiError,
  SearchParams,
} from "./api";
import {
  clearError,
  renderDoc,
  renderDocNotFound,
  renderError,
  renderOmega,
  renderResults,
} from "./view";

export const PAGE_TEMPLATE = `
<header class="top">
  <h1>coper</h1>
  <form id="search-form">
    <input id="query" name="query" type="search" dir="rtl" autocomplete="off"
           placeholder="جستجو..." aria-label="query" />
    <label class="k-label">k
      <input id="k" name="k" type="number" min="1" max="100" value="10" />
    </label>
    <button id="submit" type="submit" disabled>search</button>
  </form>
  <div class="omega-controls">
    <label><input id="omega-auto" type="checkbox" checked />
      ω from query</label>
    <input id="omega-slider" type="range" min="0" max="1" step="0.01"
           value="0.5" disabled aria-label="omega override" />
    <span class="omega-readout">ω =
      <span id="omega-value" class="score-value" data-field="omega"></span>
      <span id="omega-mode"></span></span>
  </div>
  <div id="banner" class="banner" hidden></div>
</header>
<main class="layout">
  <ol id="results" class="results"></ol>
  <aside id="doc-pane" class="doc-pane" hidden></aside>
</main>
`;

export interface SearchPageDeps {
  searchFn?: typeof apiSearch;
  docFn?: typeof apiFetchDoc;
  base?: string;
}

export interface SearchPage {
  /** Issue the search for the current form state; resolves when the
   * response is rendered or discarded. */
  submit(): Promise<void>;
  inspect(docId: string): Promise<void>;
  elements: {
    form: HTMLFormElement;
    query: HTMLInputElement;
    k: HTMLInputElement;
    submitButton: HTMLButtonElement;
    omegaAuto: HTMLInputElement;
    omegaSlider: HTMLInputElement;
    omegaValue: HTMLElement;
    omegaMode: HTMLElement;
    banner: HTMLElement;
    results: HTMLElement;
    docPane: HTMLElement;
  };
}

function mustFind<T extends Element>(root: HTMLElement, selector: string): T {
  const node = root.querySelector<T>(selector);
  if (!node) {
    throw new Error(`page template is missing ${selector}`);
  }
  return node;
}

export function initSearchPage(
  root: HTMLElement,
  deps: SearchPageDeps = {},
): SearchPage {
  const searchFn = deps.searchFn ?? apiSearch;
  const docFn = deps.docFn ?? apiFetchDoc;
  const base = deps.base ?? "";

  root.innerHTML = PAGE_TEMPLATE;
  const elements = {
    form: mustFind<HTMLFormElement>(root, "#search-form"),
    query: mustFind<HTMLInputElement>(root, "#query"),
    k: mustFind<HTMLInputElement>(root, "#k"),
    submitButton: mustFind<HTMLButtonElement>(root, "#submit"),
    omegaAuto: mustFind<HTMLInputElement>(root, "#omega-auto"),
    omegaSlider: mustFind<HTMLInputElement>(root, "#omega-slider"),
    omegaValue: mustFind<HTMLElement>(root, "#omega-value"),
    omegaMode: mustFind<HTMLElement>(root, "#omega-mode"),
    banner: mustFind<HTMLElement>(root, "#banner"),
    results: mustFind<HTMLElement>(root, "#results"),
    docPane: mustFind<HTMLElement>(root, "#doc-pane"),
  };

  let sequence = 0;
  let inFlight: AbortController | null = null;

  function currentParams(): SearchParams | null {
    const query = elements.query.value.trim();
    if (query === "") {
      return null;
    }
    const params: SearchParams = { query };
    const k = Math.trunc(Number(elements.k.value));
    if (Number.isFinite(k) && k >= 1) {
      params.k = k;
    }
    if (!elements.omegaAuto.checked) {
      params.omega = Number(elements.omegaSlider.value);
    }
    return params;
  }

  async function submit(): Promise<void> {
    const params = currentParams();
    if (params === null) {
      return;
    }
    const mine = ++sequence;
    inFlight?.abort();
    const controller = new AbortController();
    inFlight = controller;
    try {
      const response = await searchFn(params, {
        base,
        signal: controller.signal,
      });
      if (mine !== sequence) {
        return; // superseded while awaiting; a newer response owns the page
      }
      clearError(elements.banner);
      renderOmega(
        elements.omegaValue,
        elements.omegaMode,
        response.omega,
        params.omega !== undefined,
      );
      renderResults(elements.results, response);
    } catch (error) {
      if (mine !== sequence) {
        return;
      }
      if (error instanceof DOMException && error.name === "AbortError") {
        return;
      }
      renderError(elements.banner, error);
    }
  }

  async function inspect(docId: string): Promise<void> {
    try {
      const doc = await docFn(docId, { base });
      renderDoc(elements.docPane, doc);
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) {
        renderDocNotFound(elements.docPane, docId);
        return;
      }
      renderError(elements.banner, error);
    }
  }

  function syncControls(): void {
    elements.submitButton.disabled = elements.query.value.trim() === "";
    elements.omegaSlider.disabled = elements.omegaAuto.checked;
  }

  elements.query.addEventListener("input", syncControls);
  elements.form.addEventListener("submit", (event) => {
    event.preventDefault();
    void submit();
  });
  // steering the blend re-queries; the server dictates the new order
  elements.omegaSlider.addEventListener("change", () => {
    void submit();
  });
  elements.omegaAuto.addEventListener("change", () => {
    syncControls();
    void submit();
  });
  elements.results.addEventListener("click", (event) => {
    const target = event.target;
    if (target instanceof HTMLElement && target.matches("button.inspect")) {
      const docId = target.dataset.docId;
      if (docId !== undefined) {
        void inspect(docId);
      }
    }
  });

  syncControls();
  return { submit, inspect, elements };
}
