import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, rootId } from "../src/api.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function recordingClient(
  responder: (url: string) => Response,
): { client: ApiClient; urls: string[] } {
  const urls: string[] = [];
  const client = new ApiClient("http://example.test:9999/", (url) => {
    urls.push(url);
    return Promise.resolve(responder(url));
  });
  return { client, urls };
}

describe("ApiClient", () => {
  it("strips trailing slashes from the base url", async () => {
    const { client, urls } = recordingClient(() =>
      jsonResponse({ n_leaves: 4, vocab_size: 4, doc_count: 9 }),
    );
    await client.meta();
    expect(urls).toEqual(["http://example.test:9999/meta"]);
  });

  it("requests flat cuts with both query parameters", async () => {
    const { client, urls } = recordingClient(() =>
      jsonResponse({ n: 3, topics: [] }),
    );
    const flat = await client.flat(3, 10);
    expect(urls).toEqual(["http://example.test:9999/flat?n=3&top=10"]);
    expect(flat.n).toBe(3);
    expect(flat.topics).toEqual([]);
  });

  it("requests nodes and paths by id", async () => {
    const { client, urls } = recordingClient((url) =>
      url.includes("/path/")
        ? jsonResponse({ path: [] })
        : jsonResponse({
            id: 6,
            is_leaf: false,
            words: ["a"],
            size: 2,
            f: 10,
            h: -1.5,
            delta_h: -0.5,
            children: [0, 1],
            parent: null,
          }),
    );
    const node = await client.node(6, 5);
    await client.path(2, 5);
    expect(urls).toEqual([
      "http://example.test:9999/node/6?top=5",
      "http://example.test:9999/path/2?top=5",
    ]);
    expect(node.children).toEqual([0, 1]);
    expect(node.parent).toBeNull();
  });

  it("turns server error payloads into ApiError", async () => {
    const { client } = recordingClient(() =>
      jsonResponse({ error: "unknown node id 99" }, 404),
    );
    const failure = await client.node(99, 10).then(
      () => null,
      (error: unknown) => error,
    );
    expect(failure).toBeInstanceOf(ApiError);
    expect((failure as ApiError).status).toBe(404);
    expect((failure as ApiError).message).toBe("unknown node id 99");
  });

  it("falls back to a status message when the body is not json", async () => {
    const { client } = recordingClient(
      () => new Response("<html>boom</html>", { status: 500 }),
    );
    const failure = await client.meta().then(
      () => null,
      (error: unknown) => error,
    );
    expect(failure).toBeInstanceOf(ApiError);
    expect((failure as ApiError).message).toBe(
      "request failed with status 500",
    );
  });
});

describe("rootId", () => {
  it("is the final merge id for any leaf count", () => {
    expect(rootId({ n_leaves: 8, vocab_size: 8, doc_count: 90 })).toBe(14);
    expect(rootId({ n_leaves: 1, vocab_size: 1, doc_count: 3 })).toBe(0);
  });
});
