/** Application bootstrap: wires the store, controls, table and tree. */

import { ApiClient, rootId } from "./api.js";
import { ViewStore } from "./state.js";
import { FlatTable } from "./table.js";
import { TreeBrowser } from "./tree.js";
import { Debounced, debounce } from "./util.js";

export interface AppHandles {
  store: ViewStore;
  client: ApiClient;
  table: FlatTable;
  tree: TreeBrowser;
  slider: HTMLInputElement;
  numeric: HTMLInputElement;
  banner: HTMLElement;
  /** Debounced n setter behind both controls; flush() applies it now. */
  applyN: Debounced<[number]>;
}

export const CONTROL_DEBOUNCE_MS = 150;

type FetchLike = (url: string) => Promise<Response>;

/** Mount the explorer under `root` against a model server at `baseUrl`.
 *
 * Shows an unreachable banner and rethrows if the server does not answer
 * the initial metadata request.
 */
export async function boot(
  root: HTMLElement,
  baseUrl: string,
  fetchFn?: FetchLike,
): Promise<AppHandles> {
  const doc = root.ownerDocument;
  const client = new ApiClient(baseUrl, fetchFn);

  const banner = doc.createElement("div");
  banner.className = "banner hidden";
  root.appendChild(banner);

  const showBanner = (error: unknown): void => {
    const message = error instanceof Error ? error.message : String(error);
    banner.textContent = `server unreachable: ${message}`;
    banner.classList.remove("hidden");
  };
  const hideBanner = (): void => {
    banner.textContent = "";
    banner.classList.add("hidden");
  };

  let meta;
  try {
    meta = await client.meta();
  } catch (error) {
    showBanner(error);
    throw error;
  }

  const store = new ViewStore(meta.n_leaves);

  const controls = doc.createElement("div");
  controls.className = "controls";
  const label = doc.createElement("label");
  label.textContent = "topics";
  const slider = doc.createElement("input");
  slider.type = "range";
  slider.min = "1";
  slider.max = String(meta.n_leaves);
  slider.value = String(store.current.n);
  const numeric = doc.createElement("input");
  numeric.type = "number";
  numeric.min = "1";
  numeric.max = String(meta.n_leaves);
  numeric.value = String(store.current.n);
  const metaLine = doc.createElement("span");
  metaLine.className = "meta-line";
  metaLine.textContent =
    `${meta.n_leaves} leaves, ${meta.vocab_size} words, ${meta.doc_count} docs`;
  controls.append(label, slider, numeric, metaLine);
  root.appendChild(controls);

  const layout = doc.createElement("div");
  layout.className = "layout";
  const tablePane = doc.createElement("div");
  tablePane.className = "pane table-pane";
  const treePane = doc.createElement("div");
  treePane.className = "pane tree-pane";
  layout.append(tablePane, treePane);
  root.appendChild(layout);

  const tree = new TreeBrowser(treePane, store, client, rootId(meta));
  const table = new FlatTable(tablePane, store, client, {
    reveal: (id) => tree.reveal(id),
    reportError: showBanner,
    clearError: hideBanner,
  });

  const applyN = debounce((n: number) => {
    store.setN(n);
  }, CONTROL_DEBOUNCE_MS);
  slider.addEventListener("input", () => {
    applyN(Number(slider.value));
  });
  numeric.addEventListener("input", () => {
    applyN(Number(numeric.value));
  });
  store.subscribe((state) => {
    slider.value = String(state.n);
    numeric.value = String(state.n);
  });

  await Promise.all([table.refresh(), tree.render()]);
  return { store, client, table, tree, slider, numeric, banner, applyN };
}
