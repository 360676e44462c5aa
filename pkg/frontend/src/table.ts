/** Flat table: the n highest cuts of the dendrogram as one row per topic. */

import { ApiClient } from "./api.js";
import { ViewStore } from "./state.js";
import { LastWrite } from "./util.js";

export interface TableHooks {
  /** Called when a row is clicked, after the store selection updates. */
  reveal(id: number): void | Promise<void>;
  reportError(error: unknown): void;
  /** Called after a successful refresh so stale error banners can clear. */
  clearError?(): void;
}

export class FlatTable {
  readonly element: HTMLTableElement;
  private readonly tbody: HTMLTableSectionElement;
  private readonly guard = new LastWrite();
  private renderedN: number | null = null;

  constructor(
    container: HTMLElement,
    private readonly store: ViewStore,
    private readonly client: ApiClient,
    private readonly hooks: TableHooks,
  ) {
    const doc = container.ownerDocument;
    this.element = doc.createElement("table");
    this.element.className = "flat-table";

    const thead = doc.createElement("thead");
    const head = doc.createElement("tr");
    for (const title of ["#", "f", "top words"]) {
      const th = doc.createElement("th");
      th.textContent = title;
      head.appendChild(th);
    }
    thead.appendChild(head);
    this.element.appendChild(thead);

    this.tbody = doc.createElement("tbody");
    this.element.appendChild(this.tbody);
    container.appendChild(this.element);

    this.tbody.addEventListener("click", (event) => {
      const target = event.target as Element | null;
      const row = target?.closest("tr[data-topic-id]");
      if (!row) {
        return;
      }
      const id = Number(row.getAttribute("data-topic-id"));
      this.store.select(id);
      void this.hooks.reveal(id);
    });

    this.store.subscribe((state) => {
      if (state.n !== this.renderedN) {
        void this.refresh();
      } else {
        this.syncSelection();
      }
    });
  }

  /** Fetch the current cut and rebuild the rows in place. */
  async refresh(): Promise<void> {
    const { n, topWords } = this.store.current;
    const ticket = this.guard.take();
    try {
      const flat = await this.client.flat(n, topWords);
      if (!this.guard.isCurrent(ticket)) {
        return;
      }
      const doc = this.element.ownerDocument;
      this.tbody.replaceChildren();
      flat.topics.forEach((topic, rank) => {
        const row = doc.createElement("tr");
        row.setAttribute("data-topic-id", String(topic.id));

        const rankCell = doc.createElement("td");
        rankCell.textContent = String(rank + 1);
        const fCell = doc.createElement("td");
        fCell.textContent = String(topic.f);
        const wordsCell = doc.createElement("td");
        wordsCell.textContent = topic.words.join(" ");

        row.append(rankCell, fCell, wordsCell);
        this.tbody.appendChild(row);
      });
      this.renderedN = n;
      this.syncSelection();
      this.hooks.clearError?.();
    } catch (error) {
      if (!this.guard.isCurrent(ticket)) {
        return;
      }
      this.renderedN = null;
      this.showError(error);
      this.hooks.reportError(error);
    }
  }

  private showError(error: unknown): void {
    const doc = this.element.ownerDocument;
    this.tbody.replaceChildren();
    const row = doc.createElement("tr");
    row.className = "error";
    const cell = doc.createElement("td");
    cell.colSpan = 3;
    cell.textContent = `failed to load topics: ${messageOf(error)}`;
    row.appendChild(cell);
    this.tbody.appendChild(row);
  }

  private syncSelection(): void {
    const selected = this.store.current.selected;
    for (const row of Array.from(this.tbody.rows)) {
      const id = Number(row.getAttribute("data-topic-id"));
      row.classList.toggle("selected", selected !== null && id === selected);
    }
  }
}

function messageOf(error: unknown): string {
  return error instanceof Error ? error.message : String(error);
}
