// Page wiring: upload view first, then the editor (canvas + sidebar).

import { Api } from "./api.js";
import { TopologyCanvas } from "./canvas.js";
import { Controller } from "./controller.js";
import { mountAttackForm } from "./forms.js";
import { mountPanel } from "./panel.js";
import { Store } from "./state.js";

const DEFAULT_BASE = "http://127.0.0.1:8000";

function el<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

const store = new Store();
const api = new Api(new URLSearchParams(location.search).get("api") ?? DEFAULT_BASE);
const controller = new Controller(api, store);

const uploadView = el<HTMLElement>("upload-view");
const editorView = el<HTMLElement>("editor-view");
const uploadError = el<HTMLElement>("upload-error");
const statusBar = el<HTMLElement>("status-bar");

// --- upload view ---

el<HTMLInputElement>("inp-file").addEventListener("change", async (event) => {
  const file = (event.target as HTMLInputElement).files?.[0];
  if (file) {
    el<HTMLTextAreaElement>("inp-text").value = await file.text();
    el<HTMLInputElement>("session-name").value = file.name;
  }
});

el<HTMLButtonElement>("open-session").addEventListener("click", async () => {
  const inp = el<HTMLTextAreaElement>("inp-text").value;
  const name = el<HTMLInputElement>("session-name").value || "upload.inp";
  uploadError.classList.add("hidden");
  try {
    await controller.open(inp, name);
    uploadView.classList.add("hidden");
    editorView.classList.remove("hidden");
  } catch (error) {
    uploadError.classList.remove("hidden");
    uploadError.textContent = String((error as Error).message ?? error);
  }
});

// --- editor view ---

const canvas = new TopologyCanvas(
  el<HTMLCanvasElement>("topology-canvas"),
  store,
  controller,
  (message) => setStatus(message, true),
);

function setStatus(message: string, isError = false) {
  statusBar.textContent = message;
  statusBar.classList.toggle("error", isError);
}

el<HTMLButtonElement>("mode-select").addEventListener("click", () => {
  canvas.setMode("select");
  setStatus("select: click to inspect, drag to arrange");
});

el<HTMLButtonElement>("mode-link").addEventListener("click", () => {
  canvas.setMode("link");
  setStatus("link: click a source node, then a destination");
});

el<HTMLButtonElement>("add-node").addEventListener("click", async () => {
  const id = prompt("New node id (e.g. SCADA):")?.trim();
  if (!id) {
    return;
  }
  try {
    await controller.addNode(id);
    setStatus(`added ${id.toUpperCase()}`);
  } catch (error) {
    setStatus(String((error as Error).message ?? error), true);
  }
});

el<HTMLButtonElement>("remove-selected").addEventListener("click", async () => {
  const selection = store.get().selection;
  if (!selection) {
    setStatus("nothing selected", true);
    return;
  }
  try {
    if (selection.kind === "node") {
      await controller.removeNode(selection.id);
    } else {
      await controller.removeLink(selection.source, selection.destination);
    }
    store.setSelection(null);
    setStatus("removed");
  } catch (error) {
    setStatus(String((error as Error).message ?? error), true);
  }
});

el<HTMLButtonElement>("export-cpa").addEventListener("click", async () => {
  const text = await controller.exportText();
  const name = (store.get().session?.name ?? "scenario").replace(/\.inp$/i, "") + ".cpa";
  const blob = new Blob([text], { type: "text/plain" });
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = name;
  link.click();
  URL.revokeObjectURL(link.href);
});

mountPanel(el("resilience-panel"), store, controller);
mountAttackForm(el("attack-panel"), store, controller);

store.subscribe(() => {
  const { session, pending } = store.get();
  if (!session) {
    return;
  }
  el<HTMLElement>("session-title").textContent =
    `${session.name || session.model.title} — revision ${session.revision}`;
  el<HTMLElement>("diagnostics").innerHTML = session.diagnostics
    .map((d) => `<li class="${d.severity}">${d.severity}[${d.subject}]: ${d.message}</li>`)
    .join("");
  document.body.classList.toggle("pending", pending);
});
