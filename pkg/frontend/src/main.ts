// Browser entry point: wires the controller to the page regions.

import { ApiClient, EngineUnreachableError } from "./api.js";
import { WorkbenchController } from "./controller.js";
import {
  renderAttributePanel,
  renderConnectionBanner,
  renderDecisions,
  renderDiff,
  renderDocumentText,
  renderLayerToggles,
  renderRuleGrid,
  renderStaleBanner,
} from "./render.js";
import { TABLE_KINDS } from "./types.js";

const ENGINE_URL = (window as { ENGINE_URL?: string }).ENGINE_URL ?? "http://127.0.0.1:8711";

function region(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (el === null) {
    throw new Error(`missing page region #${id}`);
  }
  return el;
}

function paint(controller: WorkbenchController): void {
  const s = controller.state;
  region("banner").innerHTML =
    renderConnectionBanner(s.connection, s.connectionDetail) +
    renderStaleBanner(controller.stale);
  region("toggles").innerHTML = renderLayerToggles(s.layers, s.visibleLayers);
  region("document").innerHTML = renderDocumentText(controller.segments());
  region("attributes").innerHTML = renderAttributePanel(s.selected);
  region("decisions").innerHTML = renderDecisions(s.decisions);
  region("diff").innerHTML = renderDiff(s.diff);
  if (s.grid !== null) {
    region("rules").innerHTML = renderRuleGrid(s.grid, s.compileError);
  }
}

async function swallowUnreachable(work: Promise<unknown>): Promise<void> {
  try {
    await work;
  } catch (err) {
    if (!(err instanceof EngineUnreachableError)) {
      throw err;
    }
    // the connection banner already reports it
  }
}

function paintPatients(controller: WorkbenchController): void {
  const items = controller.state.patients
    .map((p) => {
      const docs = p.doc_ids
        .map((d) => `<li><a href="#" data-doc="${d}">${d}</a></li>`)
        .join("");
      return `<li>${p.patient_id} (${p.reference_date ?? "no date"})<ul>${docs}</ul></li>`;
    })
    .join("");
  region("patients").innerHTML = `<ul class="patient-list">${items}</ul>`;
}

function paintTablePicker(controller: WorkbenchController): void {
  const buttons = TABLE_KINDS.filter((k) => k in controller.state.tables)
    .map((k) => `<button data-table="${k}">${k}</button>`)
    .join("");
  region("rules").innerHTML =
    `<div class="table-picker">${buttons}</div>` +
    `<div id="grid"></div><button id="save-table" hidden>save table</button>`;
}

async function boot(): Promise<void> {
  const controller = new WorkbenchController(new ApiClient(ENGINE_URL));

  document.body.addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    const doc = target.dataset.doc;
    if (doc !== undefined) {
      ev.preventDefault();
      void swallowUnreachable(controller.openDocument(doc)).then(() => paint(controller));
      return;
    }
    const table = target.dataset.table;
    if (table !== undefined) {
      controller.openTable(table);
      paint(controller);
      return;
    }
    const del = target.dataset.delete;
    if (del !== undefined && controller.state.grid !== null) {
      controller.state.grid.deleteLine(Number(del));
      paint(controller);
      return;
    }
    if (target.id === "save-table") {
      void swallowUnreachable(controller.saveActiveTable()).then(() => paint(controller));
      return;
    }
    const span = target.closest<HTMLElement>(".annotated");
    if (span !== null && span.dataset.layer !== undefined) {
      controller.selectAnnotation(span.dataset.layer, Number(span.dataset.index));
      paint(controller);
    }
  });

  document.body.addEventListener("change", (ev) => {
    const target = ev.target as HTMLInputElement;
    if (target.dataset.layer !== undefined && target.type === "checkbox") {
      controller.toggleLayer(target.dataset.layer);
      paint(controller);
      return;
    }
    if (target.dataset.line !== undefined && controller.state.grid !== null) {
      controller.state.grid.setCell(
        Number(target.dataset.line),
        Number(target.dataset.col),
        target.value,
      );
    }
  });

  await swallowUnreachable(controller.loadPatients());
  await swallowUnreachable(controller.loadRules());
  paintPatients(controller);
  paintTablePicker(controller);
  paint(controller);
}

void boot();
