// URL builders for the documented API endpoints plus a latest-wins guard
// for in-flight requests. Building the request from ViewState keeps the
// "reconstructible from the URL" invariant: the same params that go into
// the address bar go onto the wire.

import type { ViewState } from "./state.js";

export function searchUrl(base: string, state: ViewState): string {
  const params = new URLSearchParams();
  if (state.query) params.set("q", state.query);
  for (const chip of state.filters) params.append("filter", chip);
  params.set("page", String(state.page));
  return `${base}/api/search?${params}`;
}

export function frequentUrl(base: string, anchor: string, field: string, k: number): string {
  const params = new URLSearchParams({ anchor, field, k: String(k) });
  return `${base}/api/analytics/frequent?${params}`;
}

export function categoriesUrl(base: string, state: ViewState): string {
  const params = new URLSearchParams();
  if (state.query) params.set("q", state.query);
  for (const chip of state.filters) params.append("filter", chip);
  return `${base}/api/analytics/categories?${params}`;
}

export function threadUrl(base: string, threadId: string): string {
  return `${base}/api/thread/${encodeURIComponent(threadId)}`;
}

export type FetchJson = (url: string) => Promise<unknown>;

export const fetchJson: FetchJson = async (url) => {
  const response = await fetch(url);
  // error envelopes parse like any payload; callers inspect them
  return response.json();
};

/** Monotone token source; a response is applied only if its token is still
 * the newest one handed out (stale responses are discarded). */
export class LatestWins {
  private counter = 0;

  next(): number {
    this.counter += 1;
    return this.counter;
  }

  isCurrent(token: number): boolean {
    return token === this.counter;
  }
}
