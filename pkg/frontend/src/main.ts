/**
 * Application shell: gallery sidebar, chain canvas, node panel, debug bar,
 * and the rejection toast that surfaces server diagnostics when an
 * optimistic edit is rolled back.
 */

import { ApiClient } from "./api";
import { ChainView } from "./chainView";
import { DebugControls } from "./debugControls";
import { NodeView } from "./nodeView";
import { EditorStore } from "./state";

export interface App {
  store: EditorStore;
  chainView: ChainView;
  nodeView: NodeView;
  debugControls: DebugControls;
  refresh: () => void;
}

export function mountApp(root: HTMLElement, baseUrl = ""): App {
  root.innerHTML = `
    <div class="layout">
      <aside class="sidebar">
        <h1>chainweaver</h1>
        <h2>Gallery</h2>
        <ul class="gallery-list"></ul>
        <h2>Chains</h2>
        <ul class="chain-list"></ul>
      </aside>
      <main class="workspace">
        <div class="debug-slot"></div>
        <div class="canvas-slot"></div>
      </main>
      <aside class="panel-slot"></aside>
      <div class="toast-area"></div>
    </div>
  `;

  const api = new ApiClient(baseUrl);
  const store = new EditorStore(api);
  const chainView = new ChainView(root.querySelector<HTMLElement>(".canvas-slot")!, store);
  const nodeView = new NodeView(root.querySelector<HTMLElement>(".panel-slot")!, store);
  const debugControls = new DebugControls(root.querySelector<HTMLElement>(".debug-slot")!, store);
  const toastArea = root.querySelector<HTMLElement>(".toast-area")!;

  const refresh = () => {
    chainView.render();
    nodeView.render();
    debugControls.render();
    renderToast();
  };

  const renderToast = () => {
    toastArea.textContent = "";
    const rejection = store.lastRejection;
    if (rejection === null) {
      return;
    }
    const toast = document.createElement("div");
    toast.className = "toast toast-error";
    const lines = [
      rejection.message,
      ...rejection.diagnostics.map((d) => `[${d.code}] ${d.message}`),
    ];
    toast.textContent = lines.join("\n");
    toastArea.append(toast);
  };

  store.subscribe(refresh);

  void populateSidebar(root, store);
  refresh();
  return { store, chainView, nodeView, debugControls, refresh };
}

async function populateSidebar(root: HTMLElement, store: EditorStore): Promise<void> {
  const galleryList = root.querySelector<HTMLElement>(".gallery-list")!;
  const chainList = root.querySelector<HTMLElement>(".chain-list")!;
  const [gallery, chains] = await Promise.all([store.api.listGallery(), store.api.listChains()]);
  for (const entry of gallery) {
    const item = document.createElement("li");
    const button = document.createElement("button");
    button.className = "gallery-item";
    button.dataset.entryId = entry.id;
    button.textContent = entry.title;
    button.title = entry.description;
    button.addEventListener("click", () => void store.loadChain(entry.id));
    item.append(button);
    galleryList.append(item);
  }
  for (const chain of chains) {
    const item = document.createElement("li");
    const button = document.createElement("button");
    button.className = "chain-item";
    button.dataset.chainId = chain.id;
    button.textContent = chain.name;
    button.addEventListener("click", () => void store.loadChain(chain.id));
    item.append(button);
    chainList.append(item);
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mountApp(document.getElementById("app")!);
}
