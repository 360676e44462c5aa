/** Tree browser: expandable dendrogram rooted at the final merge. */

import { ApiClient, NodePayload } from "./api.js";
import { ViewStore } from "./state.js";
import { LastWrite, frequencyTint } from "./util.js";

export class TreeBrowser {
  readonly element: HTMLElement;
  private readonly listHost: HTMLElement;
  private readonly cache = new Map<number, NodePayload>();
  private readonly pending = new Map<number, Promise<NodePayload>>();
  private readonly guard = new LastWrite();
  private rootF: number | null = null;

  constructor(
    container: HTMLElement,
    private readonly store: ViewStore,
    private readonly client: ApiClient,
    private readonly rootId: number,
  ) {
    const doc = container.ownerDocument;
    this.element = doc.createElement("div");
    this.element.className = "tree-browser";

    const toolbar = doc.createElement("div");
    toolbar.className = "tree-toolbar";
    const collapseAll = doc.createElement("button");
    collapseAll.type = "button";
    collapseAll.className = "collapse-all";
    collapseAll.textContent = "collapse all";
    collapseAll.addEventListener("click", () => {
      this.store.collapseAll();
    });
    toolbar.appendChild(collapseAll);
    this.element.appendChild(toolbar);

    this.listHost = doc.createElement("div");
    this.listHost.className = "tree-host";
    this.element.appendChild(this.listHost);
    container.appendChild(this.element);

    this.store.subscribe(() => {
      void this.render();
    });
  }

  /** Fetch a node at most once; concurrent callers share the request. */
  private ensure(id: number): Promise<NodePayload> {
    const hit = this.cache.get(id);
    if (hit !== undefined) {
      return Promise.resolve(hit);
    }
    const inFlight = this.pending.get(id);
    if (inFlight !== undefined) {
      return inFlight;
    }
    const request = this.client.node(id, this.store.current.topWords).then(
      (payload) => {
        this.cache.set(id, payload);
        this.pending.delete(id);
        return payload;
      },
      (error: unknown) => {
        this.pending.delete(id);
        throw error;
      },
    );
    this.pending.set(id, request);
    return request;
  }

  /** Rebuild the visible tree; stale rebuilds are dropped, not applied. */
  async render(): Promise<void> {
    const ticket = this.guard.take();
    const doc = this.element.ownerDocument;
    const list = doc.createElement("ul");
    list.className = "tree-root";
    try {
      const root = await this.ensure(this.rootId);
      this.rootF = root.f;
      list.appendChild(await this.buildItem(root));
    } catch (error) {
      list.appendChild(this.errorItem(this.rootId, error));
    }
    if (!this.guard.isCurrent(ticket)) {
      return;
    }
    this.listHost.replaceChildren(list);
  }

  private async buildItem(node: NodePayload): Promise<HTMLLIElement> {
    const doc = this.element.ownerDocument;
    const item = doc.createElement("li");
    item.setAttribute("data-node-id", String(node.id));

    const expanded = !node.is_leaf && this.store.isExpanded(node.id);
    if (node.is_leaf) {
      const bullet = doc.createElement("span");
      bullet.className = "bullet";
      bullet.textContent = "•";
      item.appendChild(bullet);
    } else {
      const twisty = doc.createElement("button");
      twisty.type = "button";
      twisty.className = "twisty";
      twisty.textContent = expanded ? "▾" : "▸";
      twisty.addEventListener("click", (event) => {
        event.stopPropagation();
        this.store.toggle(node.id);
      });
      item.appendChild(twisty);
    }

    const label = doc.createElement("span");
    label.className = "node-label";
    label.textContent = node.words.join(" ");
    label.title = `f=${node.f}`;
    const fMax = this.rootF ?? node.f;
    label.style.backgroundColor = frequencyTint(node.f, 1, fMax);
    if (this.store.current.selected === node.id) {
      label.classList.add("selected");
    }
    label.addEventListener("click", () => {
      this.store.select(node.id);
    });
    item.appendChild(label);

    if (expanded) {
      const children = doc.createElement("ul");
      const settled = await Promise.allSettled(
        node.children.map((childId) => this.ensure(childId)),
      );
      for (let i = 0; i < settled.length; i += 1) {
        const outcome = settled[i] as PromiseSettledResult<NodePayload>;
        if (outcome.status === "fulfilled") {
          children.appendChild(await this.buildItem(outcome.value));
        } else {
          children.appendChild(
            this.errorItem(node.children[i] as number, outcome.reason),
          );
        }
      }
      item.appendChild(children);
    }
    return item;
  }

  private errorItem(id: number, error: unknown): HTMLLIElement {
    const item = this.element.ownerDocument.createElement("li");
    item.className = "node-error";
    item.setAttribute("data-node-id", String(id));
    const message = error instanceof Error ? error.message : String(error);
    item.textContent = `failed to load node ${id}: ${message}`;
    return item;
  }

  /** Open every ancestor of a node so it becomes visible. */
  async reveal(id: number): Promise<void> {
    let ancestors = this.ancestorsFromCache(id);
    if (ancestors === null) {
      const result = await this.client.path(id, this.store.current.topWords);
      for (const payload of result.path) {
        if (!this.cache.has(payload.id)) {
          this.cache.set(payload.id, payload);
        }
      }
      ancestors = result.path
        .filter((payload) => payload.id !== id)
        .map((payload) => payload.id);
    }
    this.store.expandAll(ancestors);
  }

  /** Ancestor ids when the whole chain up to the root is already cached. */
  private ancestorsFromCache(id: number): number[] | null {
    const chain: number[] = [];
    let current = this.cache.get(id);
    if (current === undefined) {
      return null;
    }
    while (current.parent !== null) {
      const parent = this.cache.get(current.parent);
      if (parent === undefined) {
        return null;
      }
      chain.push(parent.id);
      current = parent;
    }
    return chain;
  }
}
