// Payload shapes of the meta-base API. The dashboard renders these verbatim;
// it never recomputes or re-sorts anything inside them.

export interface SearchHit {
  record_id: string;
  score: number;
  title: string;
  url: string;
  snippet: string;
}

export interface QueryResultPayload {
  total_hits: number;
  page: number;
  page_size: number;
  hits: SearchHit[];
  cache_hit: boolean;
}

export interface FindingRow {
  value: string;
  post_count: number;
  thread_count: number;
}

export interface FrequentPayload {
  anchor: string;
  field: string;
  rows: FindingRow[];
}

export interface CategoryRow {
  source_forum: string;
  top_level_category: string;
  thread_count: number;
  post_count: number;
}

export interface CategoriesPayload {
  query: string;
  filters: string[];
  rows: CategoryRow[];
}

export interface ThreadPostPayload {
  post_id: string;
  position: number;
  author: string;
  expert_authored: boolean;
  body: string;
}

export interface ThreadPayload {
  thread: {
    thread_id: string;
    source_forum: string;
    top_level_category: string;
    url: string;
    title: string;
    num_posts: number;
    last_updated: string;
    entities: Record<string, string[]>;
    expressions: Record<string, string>;
  };
  posts: ThreadPostPayload[];
}

export interface ErrorEnvelope {
  error: { code: string; message: string };
}

export function isErrorEnvelope(payload: unknown): payload is ErrorEnvelope {
  return (
    typeof payload === "object" &&
    payload !== null &&
    "error" in payload &&
    typeof (payload as ErrorEnvelope).error?.message === "string"
  );
}
