/** Typed client for the read-only model server.
 *
 * All endpoints are GET and JSON; the server never mutates. Node ids are
 * stable: leaves are 0..n_leaves-1, the k-th merge creates node n_leaves+k,
 * so the root is always 2*n_leaves-2.
 */

export interface Meta {
  n_leaves: number;
  vocab_size: number;
  doc_count: number;
}

export interface FlatTopic {
  id: number;
  f: number;
  h: number;
  size: number;
  words: string[];
}

export interface FlatResponse {
  n: number;
  topics: FlatTopic[];
}

export interface NodePayload {
  id: number;
  is_leaf: boolean;
  words: string[];
  size: number;
  f: number;
  h: number;
  delta_h: number | null;
  children: number[];
  parent: number | null;
}

export interface PathResponse {
  path: NodePayload[];
}

/** Error body from the server, carrying its HTTP status. */
export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (url: string) => Promise<Response>;

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(readonly baseUrl: string, fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? ((url) => fetch(url));
  }

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path);
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const message =
        typeof body === "object" && body !== null && "error" in body
          ? String((body as { error: unknown }).error)
          : `request failed with status ${response.status}`;
      throw new ApiError(response.status, message);
    }
    return body as T;
  }

  meta(): Promise<Meta> {
    return this.get<Meta>("/meta");
  }

  flat(n: number, top: number): Promise<FlatResponse> {
    return this.get<FlatResponse>(`/flat?n=${n}&top=${top}`);
  }

  node(id: number, top: number): Promise<NodePayload> {
    return this.get<NodePayload>(`/node/${id}?top=${top}`);
  }

  path(id: number, top: number): Promise<PathResponse> {
    return this.get<PathResponse>(`/path/${id}?top=${top}`);
  }
}

export function rootId(meta: Meta): number {
  return 2 * meta.n_leaves - 2;
}
