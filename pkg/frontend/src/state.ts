// ViewState and its URL encoding. The URL is the single source of truth:
// every interaction produces a new state, the state serializes to the query
// string, and parsing that query string reproduces the state exactly, so
// links are shareable and the back button works.

export interface ViewState {
  query: string;
  filters: string[]; // "field:value" chips, ordered, de-duplicated
  page: number;
  threadId: string | null;
}

export const EMPTY_STATE: ViewState = { query: "", filters: [], page: 0, threadId: null };

export function stateToParams(state: ViewState): URLSearchParams {
  const params = new URLSearchParams();
  if (state.query) params.set("q", state.query);
  for (const chip of state.filters) params.append("filter", chip);
  if (state.page > 0) params.set("page", String(state.page));
  if (state.threadId) params.set("thread", state.threadId);
  return params;
}

export function stateFromParams(params: URLSearchParams): ViewState {
  const page = Number.parseInt(params.get("page") ?? "0", 10);
  const filters: string[] = [];
  for (const chip of params.getAll("filter")) {
    if (chip.includes(":") && !filters.includes(chip)) filters.push(chip);
  }
  return {
    query: params.get("q") ?? "",
    filters,
    page: Number.isFinite(page) && page > 0 ? page : 0,
    threadId: params.get("thread"),
  };
}

export function withQuery(state: ViewState, query: string): ViewState {
  return { query, filters: state.filters, page: 0, threadId: null };
}

export function addFilter(state: ViewState, field: string, value: string): ViewState {
  const chip = `${field}:${value}`;
  if (state.filters.includes(chip)) return { ...state, threadId: null };
  return { ...state, filters: [...state.filters, chip], page: 0, threadId: null };
}

export function removeFilter(state: ViewState, chip: string): ViewState {
  return {
    ...state,
    filters: state.filters.filter((c) => c !== chip),
    page: 0,
    threadId: null,
  };
}

export function withPage(state: ViewState, page: number): ViewState {
  return { ...state, page: Math.max(0, page), threadId: null };
}

export function withThread(state: ViewState, threadId: string | null): ViewState {
  return { ...state, threadId };
}

export function pageCount(totalHits: number, pageSize: number): number {
  return Math.ceil(totalHits / pageSize);
}
