/** Central view state shared by the flat table and the tree browser. */

export interface ViewState {
  /** Requested topic count for the flat view; always in [1, nLeaves]. */
  n: number;
  /** Highlighted node id, or null; always a valid id when set. */
  selected: number | null;
  /** Ids of merge nodes whose children are visible in the tree. */
  expanded: ReadonlySet<number>;
  /** Words shown per topic everywhere. */
  topWords: number;
}

export type Listener = (state: ViewState) => void;

export class ViewStore {
  private state: ViewState;
  private readonly listeners = new Set<Listener>();
  private readonly maxNodeId: number;

  constructor(readonly nLeaves: number) {
    if (!Number.isInteger(nLeaves) || nLeaves < 1) {
      throw new Error(`nLeaves must be a positive integer, got ${nLeaves}`);
    }
    this.maxNodeId = 2 * nLeaves - 2;
    this.state = {
      n: Math.min(10, nLeaves),
      selected: null,
      expanded: new Set<number>(),
      topWords: 10,
    };
  }

  get current(): ViewState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => {
      this.listeners.delete(listener);
    };
  }

  private commit(next: ViewState): void {
    this.state = next;
    for (const listener of this.listeners) {
      listener(next);
    }
  }

  /** Clamp into [1, nLeaves]; non-finite input falls back to the current n. */
  setN(n: number): void {
    if (!Number.isFinite(n)) {
      return;
    }
    const clamped = Math.min(this.nLeaves, Math.max(1, Math.round(n)));
    if (clamped === this.state.n) {
      return;
    }
    this.commit({ ...this.state, n: clamped });
  }

  select(id: number | null): void {
    if (id !== null && (!Number.isInteger(id) || id < 0 || id > this.maxNodeId)) {
      throw new Error(`node id ${id} is out of range [0, ${this.maxNodeId}]`);
    }
    if (id === this.state.selected) {
      return;
    }
    this.commit({ ...this.state, selected: id });
  }

  isExpanded(id: number): boolean {
    return this.state.expanded.has(id);
  }

  expand(id: number): void {
    if (this.state.expanded.has(id)) {
      return;
    }
    const expanded = new Set(this.state.expanded);
    expanded.add(id);
    this.commit({ ...this.state, expanded });
  }

  collapse(id: number): void {
    if (!this.state.expanded.has(id)) {
      return;
    }
    const expanded = new Set(this.state.expanded);
    expanded.delete(id);
    this.commit({ ...this.state, expanded });
  }

  toggle(id: number): void {
    if (this.state.expanded.has(id)) {
      this.collapse(id);
    } else {
      this.expand(id);
    }
  }

  /** Expand every id in the list that is not already open, in one commit. */
  expandAll(ids: Iterable<number>): void {
    const expanded = new Set(this.state.expanded);
    const before = expanded.size;
    for (const id of ids) {
      expanded.add(id);
    }
    if (expanded.size === before) {
      return;
    }
    this.commit({ ...this.state, expanded });
  }

  /** Collapse everything so only the root row remains visible. */
  collapseAll(): void {
    if (this.state.expanded.size === 0) {
      return;
    }
    this.commit({ ...this.state, expanded: new Set<number>() });
  }
}
