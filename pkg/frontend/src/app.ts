// The dashboard controller: one ViewState, one URL, and for every user
// interaction exactly one state transition whose API traffic is derivable
// from the new URL. Panel payloads are cached per query text; filter, page
// and thread interactions therefore issue exactly one request each.

import { FetchJson, LatestWins, categoriesUrl, fetchJson, frequentUrl, searchUrl, threadUrl } from "./api.js";
import {
  EMPTY_STATE,
  ViewState,
  addFilter,
  removeFilter,
  stateFromParams,
  stateToParams,
  withPage,
  withQuery,
  withThread,
} from "./state.js";
import {
  renderCategoriesPanel,
  renderChips,
  renderErrorBanner,
  renderFindingsPanel,
  renderResults,
  renderThread,
} from "./render.js";
import {
  CategoriesPayload,
  FrequentPayload,
  QueryResultPayload,
  ThreadPayload,
  isErrorEnvelope,
} from "./types.js";

export interface AppOptions {
  baseUrl?: string;
  fetchJson?: FetchJson;
  pushUrl?: (params: URLSearchParams) => void;
  anchorField?: string;
  findingField?: string;
  findingK?: number;
}

export class DashboardApp {
  state: ViewState = EMPTY_STATE;

  private readonly baseUrl: string;
  private readonly fetch: FetchJson;
  private readonly pushUrl: (params: URLSearchParams) => void;
  private readonly anchorField: string;
  private readonly findingField: string;
  private readonly findingK: number;
  private readonly inflight = new LatestWins();
  private panelQuery: string | null = null;

  private readonly searchInput: HTMLInputElement;
  private readonly chipsEl: HTMLElement;
  private readonly findingsEl: HTMLElement;
  private readonly categoriesEl: HTMLElement;
  private readonly contentEl: HTMLElement;

  constructor(root: HTMLElement, options: AppOptions = {}) {
    this.baseUrl = options.baseUrl ?? "";
    this.fetch = options.fetchJson ?? fetchJson;
    this.pushUrl = options.pushUrl ?? (() => undefined);
    this.anchorField = options.anchorField ?? "chemo_drug";
    this.findingField = options.findingField ?? "side_effect";
    this.findingK = options.findingK ?? 10;

    root.replaceChildren();
    root.insertAdjacentHTML(
      "afterbegin",
      `<header class="top">
         <h1>experiences explorer</h1>
         <form class="search-form">
           <input class="search-input" type="search" placeholder="search experiences, e.g. tarceva" />
           <button class="search-go" type="submit">search</button>
         </form>
         <div class="chips"></div>
       </header>
       <div class="columns">
         <aside class="panels">
           <section class="panel categories"></section>
           <section class="panel findings"></section>
         </aside>
         <main class="content"></main>
       </div>`,
    );
    this.searchInput = root.querySelector(".search-input") as HTMLInputElement;
    this.chipsEl = root.querySelector(".chips") as HTMLElement;
    this.findingsEl = root.querySelector(".panel.findings") as HTMLElement;
    this.categoriesEl = root.querySelector(".panel.categories") as HTMLElement;
    this.contentEl = root.querySelector(".content") as HTMLElement;

    const form = root.querySelector(".search-form") as HTMLFormElement;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitQuery(this.searchInput.value.trim());
    });
  }

  /** Entry point: restore a ViewState from URL params (initial load and
   * back/forward navigation). */
  async restore(params: URLSearchParams): Promise<void> {
    await this.transition(stateFromParams(params), { push: false });
  }

  async submitQuery(query: string): Promise<void> {
    await this.transition(withQuery(this.state, query));
  }

  async addFilterChip(field: string, value: string): Promise<void> {
    await this.transition(addFilter(this.state, field, value));
  }

  async removeFilterChip(chip: string): Promise<void> {
    await this.transition(removeFilter(this.state, chip));
  }

  async goToPage(page: number): Promise<void> {
    await this.transition(withPage(this.state, page));
  }

  async openThread(threadId: string): Promise<void> {
    await this.transition(withThread(this.state, threadId));
  }

  async closeThread(): Promise<void> {
    await this.transition(withThread(this.state, null));
  }

  private async transition(next: ViewState, opts: { push?: boolean } = {}): Promise<void> {
    this.state = next;
    if (opts.push !== false) this.pushUrl(stateToParams(next));
    this.searchInput.value = next.query;
    renderChips(this.chipsEl, next.filters, (chip) => void this.removeFilterChip(chip));

    const token = this.inflight.next();
    if (next.threadId) {
      await this.showThread(next.threadId, token);
      return;
    }
    await this.showResults(next, token);
  }

  private async showThread(threadId: string, token: number): Promise<void> {
    let payload: unknown;
    try {
      payload = await this.fetch(threadUrl(this.baseUrl, threadId));
    } catch (error) {
      payload = { error: { code: "network", message: String(error) } };
    }
    if (!this.inflight.isCurrent(token)) return; // superseded by newer input
    if (isErrorEnvelope(payload)) {
      renderErrorBanner(this.contentEl, payload.error.message);
      return;
    }
    renderThread(this.contentEl, payload as ThreadPayload, () => void this.closeThread());
  }

  private async showResults(state: ViewState, token: number): Promise<void> {
    if (!state.query && state.filters.length === 0) {
      if (this.inflight.isCurrent(token)) {
        this.contentEl.replaceChildren();
        this.contentEl.insertAdjacentHTML(
          "afterbegin",
          '<p class="intro">Search the distilled experiences, then narrow in with the panels.</p>',
        );
        renderFindingsPanel(this.findingsEl, null, () => undefined);
        renderCategoriesPanel(this.categoriesEl, null, () => undefined);
        this.panelQuery = null;
      }
      return;
    }

    const refreshPanels = state.query !== this.panelQuery;
    const wanted: Promise<unknown>[] = [this.guarded(searchUrl(this.baseUrl, state))];
    if (refreshPanels) {
      wanted.push(
        state.query
          ? this.guarded(
              frequentUrl(
                this.baseUrl,
                `${this.anchorField}:${state.query.toLowerCase()}`,
                this.findingField,
                this.findingK,
              ),
            )
          : Promise.resolve(null),
        this.guarded(categoriesUrl(this.baseUrl, state)),
      );
    }
    const [searchPayload, frequentPayload, categoriesPayload] = await Promise.all(wanted);
    if (!this.inflight.isCurrent(token)) return; // superseded by newer input

    if (isErrorEnvelope(searchPayload)) {
      renderErrorBanner(this.contentEl, searchPayload.error.message);
    } else {
      renderResults(this.contentEl, searchPayload as QueryResultPayload, {
        onOpenThread: (threadId) => void this.openThread(threadId),
        onPageChange: (page) => void this.goToPage(page),
      });
    }

    if (refreshPanels) {
      this.panelQuery = state.query;
      renderFindingsPanel(
        this.findingsEl,
        isErrorEnvelope(frequentPayload) ? null : (frequentPayload as FrequentPayload | null),
        (field, value) => void this.addFilterChip(field, value),
      );
      renderCategoriesPanel(
        this.categoriesEl,
        isErrorEnvelope(categoriesPayload) ? null : (categoriesPayload as CategoriesPayload | null),
        (forum, category) =>
          void this.transition(
            addFilter(addFilter(this.state, "source_forum", forum), "top_level_category", category),
          ),
      );
    }
  }

  private async guarded(url: string): Promise<unknown> {
    try {
      return await this.fetch(url);
    } catch (error) {
      return { error: { code: "network", message: String(error) } };
    }
  }
}

/** Browser glue: history integration plus popstate handling. */
export function mount(root: HTMLElement, options: AppOptions = {}): DashboardApp {
  const app = new DashboardApp(root, {
    pushUrl: (params) => {
      const query = params.toString();
      history.pushState(null, "", query ? `?${query}` : location.pathname);
    },
    ...options,
  });
  window.addEventListener("popstate", () => {
    void app.restore(new URLSearchParams(location.search));
  });
  void app.restore(new URLSearchParams(location.search));
  return app;
}
