// DOM rendering. Panels print payload rows in delivered order; there is no
// sorting, counting or thresholding here, only markup.

import type {
  CategoriesPayload,
  FrequentPayload,
  QueryResultPayload,
  ThreadPayload,
} from "./types.js";
import { pageCount } from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderErrorBanner(container: HTMLElement, message: string): void {
  container.replaceChildren(
    el("div", "error-banner", `Something went wrong: ${message}`),
  );
}

export function renderChips(
  container: HTMLElement,
  filters: string[],
  onRemove: (chip: string) => void,
): void {
  container.replaceChildren();
  for (const chip of filters) {
    const button = el("button", "chip");
    button.type = "button";
    button.dataset.chip = chip;
    button.append(el("span", "chip-label", chip), el("span", "chip-x", "×"));
    button.addEventListener("click", () => onRemove(chip));
    container.append(button);
  }
}

export interface ResultHandlers {
  onOpenThread: (threadId: string) => void;
  onPageChange: (page: number) => void;
}

/** record ids are `<thread_id>:<position>`; the reading view needs the thread part */
export function threadIdOfRecord(recordId: string): string {
  return recordId.slice(0, recordId.lastIndexOf(":"));
}

export function renderResults(
  container: HTMLElement,
  payload: QueryResultPayload,
  handlers: ResultHandlers,
): void {
  container.replaceChildren();
  const total = el("p", "total-hits", `${payload.total_hits} experiences found`);
  container.append(total);

  if (payload.total_hits === 0) {
    container.append(el("p", "empty-state", "no experiences found"));
    return;
  }

  const list = el("ol", "result-list");
  list.start = payload.page * payload.page_size + 1;
  for (const hit of payload.hits) {
    const item = el("li", "result");
    const link = el("a", "result-title", hit.title || "(untitled thread)");
    link.href = "#";
    link.dataset.recordId = hit.record_id;
    link.addEventListener("click", (event) => {
      event.preventDefault();
      handlers.onOpenThread(threadIdOfRecord(hit.record_id));
    });
    item.append(link);
    item.append(el("p", "result-snippet", hit.snippet));
    item.append(el("p", "result-meta", `score ${hit.score.toFixed(3)} · ${hit.url}`));
    list.append(item);
  }
  container.append(list);

  const pages = pageCount(payload.total_hits, payload.page_size);
  const nav = el("div", "pager");
  const prev = el("button", "pager-prev", "← previous");
  prev.type = "button";
  prev.disabled = payload.page <= 0;
  prev.addEventListener("click", () => handlers.onPageChange(payload.page - 1));
  const label = el("span", "pager-label", `page ${payload.page + 1} of ${pages}`);
  const next = el("button", "pager-next", "next →");
  next.type = "button";
  next.disabled = payload.page >= pages - 1;
  next.addEventListener("click", () => handlers.onPageChange(payload.page + 1));
  nav.append(prev, label, next);
  container.append(nav);
}

function panelShell(container: HTMLElement, title: string): HTMLElement {
  container.replaceChildren();
  container.append(el("h2", "panel-title", title));
  return container;
}

export function renderFindingsPanel(
  container: HTMLElement,
  payload: FrequentPayload | null,
  onRowClick: (field: string, value: string) => void,
): void {
  panelShell(container, "Frequent Findings");
  if (!payload || payload.rows.length === 0) {
    container.classList.add("panel-empty");
    container.append(el("p", "panel-caption", "no co-mentioned findings for this search"));
    return;
  }
  container.classList.remove("panel-empty");
  container.append(
    el("p", "panel-caption", `${payload.field.replaceAll("_", " ")} co-mentioned with ${payload.anchor}`),
  );
  const max = Math.max(...payload.rows.map((r) => r.post_count), 1);
  const list = el("ul", "finding-rows");
  for (const row of payload.rows) {
    const item = el("li", "finding-row");
    const button = el("button", "finding-button");
    button.type = "button";
    button.dataset.value = row.value;
    const bar = el("span", "finding-bar");
    bar.style.width = `${Math.round((row.post_count / max) * 100)}%`;
    button.append(
      bar,
      el("span", "finding-value", row.value),
      el("span", "finding-count", `${row.post_count} posts / ${row.thread_count} threads`),
    );
    button.addEventListener("click", () => onRowClick(payload.field, row.value));
    item.append(button);
    list.append(item);
  }
  container.append(list);
}

export function renderCategoriesPanel(
  container: HTMLElement,
  payload: CategoriesPayload | null,
  onRowClick: (forum: string, category: string) => void,
): void {
  panelShell(container, "Broad Categorization");
  if (!payload || payload.rows.length === 0) {
    container.classList.add("panel-empty");
    container.append(el("p", "panel-caption", "no matching discussions to categorize"));
    return;
  }
  container.classList.remove("panel-empty");
  const max = Math.max(...payload.rows.map((r) => r.thread_count), 1);
  const list = el("ul", "category-rows");
  for (const row of payload.rows) {
    const item = el("li", "category-row");
    const button = el("button", "category-button");
    button.type = "button";
    button.dataset.forum = row.source_forum;
    button.dataset.category = row.top_level_category;
    const bar = el("span", "category-bar");
    bar.style.width = `${Math.round((row.thread_count / max) * 100)}%`;
    button.append(
      bar,
      el("span", "category-name", `${row.source_forum} / ${row.top_level_category}`),
      el("span", "category-count", `${row.thread_count} threads / ${row.post_count} posts`),
    );
    button.addEventListener("click", () => onRowClick(row.source_forum, row.top_level_category));
    item.append(button);
    list.append(item);
  }
  container.append(list);
}

export function renderThread(
  container: HTMLElement,
  payload: ThreadPayload,
  onBack: () => void,
): void {
  container.replaceChildren();
  const back = el("button", "back-button", "← back to results");
  back.type = "button";
  back.addEventListener("click", onBack);
  container.append(back);

  container.append(el("h2", "thread-title", payload.thread.title || "(untitled thread)"));
  container.append(
    el(
      "p",
      "thread-meta",
      `${payload.thread.source_forum} / ${payload.thread.top_level_category} · ` +
        `${payload.thread.num_posts} posts · last updated ${payload.thread.last_updated}`,
    ),
  );
  const list = el("ol", "thread-posts");
  for (const post of payload.posts) {
    const item = el("li", "thread-post");
    const author = post.expert_authored ? `${post.author} (expert)` : post.author;
    item.append(el("p", "post-author", author || "anonymous"));
    item.append(el("p", "post-body", post.body));
    list.append(item);
  }
  container.append(list);
}
