// Pure HTML-string renderers; no DOM dependency so they are testable
// headless. Highlighting uses layer-colored underlines stacked by layer
// depth (border images, not background fills) so overlaps stay legible.

import type { AnnotationDetails, LayerView, TextSegment } from "./layers.js";
import { LAYER_ORDER } from "./layers.js";
import type { DiffEntry } from "./diff.js";
import type { RuleGrid, CompileErrorAnchor } from "./rules.js";
import type { DecisionSnapshot } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderConnectionBanner(connection: "ok" | "unreachable", detail: string): string {
  if (connection === "ok") {
    return "";
  }
  return (
    `<div class="banner banner-error" role="alert">` +
    `Engine unreachable. ${escapeHtml(detail)}</div>`
  );
}

export function renderStaleBanner(stale: boolean): string {
  if (!stale) {
    return "";
  }
  return (
    `<div class="banner banner-warn" role="alert">` +
    `Ruleset changed since this view was rendered; re-run to refresh.</div>`
  );
}

export function renderLayerToggles(layers: LayerView[], visible: ReadonlySet<string>): string {
  const boxes = layers.map((l) => {
    const checked = visible.has(l.component) ? " checked" : "";
    return (
      `<label class="layer-toggle" style="color:${l.color}">` +
      `<input type="checkbox" data-layer="${l.component}"${checked}>` +
      `${l.component}</label>`
    );
  });
  return `<div class="layer-toggles">${boxes.join("")}</div>`;
}

/**
 * Each segment becomes a span; covering marks stack underlines at
 * 2px-per-depth offsets via box-shadow lines, colored by layer.
 */
export function renderDocumentText(segments: TextSegment[]): string {
  const parts = segments.map((seg) => {
    if (seg.marks.length === 0) {
      return escapeHtml(seg.text);
    }
    const shadows = seg.marks
      .map((m, i) => `0 ${2 * (i + 1)}px 0 0 var(--layer-${m.layer}, currentColor)`)
      .join(", ");
    const top = seg.marks[seg.marks.length - 1];
    const title = seg.marks.map((m) => `${m.layer}: ${m.label}`).join("\n");
    return (
      `<span class="annotated" style="box-shadow: ${shadows}"` +
      ` data-layer="${top.layer}" data-index="${top.annotationIndex}"` +
      ` title="${escapeHtml(title)}">${escapeHtml(seg.text)}</span>`
    );
  });
  return `<pre class="doc-text">${parts.join("")}</pre>`;
}

export function renderAttributePanel(details: AnnotationDetails | null): string {
  if (details === null) {
    return `<div class="attr-panel attr-panel-empty">Click an annotation.</div>`;
  }
  const rows = Object.entries(details.attributes)
    .sort(([a], [b]) => a.localeCompare(b))
    .map(
      ([key, value]) =>
        `<tr><th>${escapeHtml(key)}</th><td>${escapeHtml(value)}</td></tr>`,
    );
  const span = details.span === null ? "" : ` ${details.span.begin}..${details.span.end}`;
  const event =
    details.event === null
      ? ""
      : `<p class="attr-event">event ${escapeHtml(details.event.earliest)} .. ` +
        `${escapeHtml(details.event.latest)}</p>`;
  const ruleRows =
    details.ruleRows.length === 0
      ? ""
      : `<p class="attr-rules">rule rows: ${details.ruleRows.join(", ")}</p>`;
  return (
    `<div class="attr-panel">` +
    `<h3>${escapeHtml(details.label)} <small>${details.layer}${span}</small></h3>` +
    `<table class="attr-table">${rows.join("")}</table>` +
    event +
    ruleRows +
    `</div>`
  );
}

export function renderDecisions(decisions: DecisionSnapshot[]): string {
  const rows = decisions.map(
    (d) =>
      `<tr class="verdict-${d.decision}"><td>${escapeHtml(d.criterion)}</td>` +
      `<td>${escapeHtml(d.decision)}</td></tr>`,
  );
  return `<table class="decisions">${rows.join("")}</table>`;
}

export function renderDiff(diff: DiffEntry[] | null): string {
  if (diff === null) {
    return "";
  }
  if (diff.length === 0) {
    return `<div class="diff diff-empty">No decision changes.</div>`;
  }
  const rows = diff.map(
    (e) =>
      `<tr><td>${escapeHtml(e.criterion)}</td>` +
      `<td>${escapeHtml(e.before ?? "-")}</td>` +
      `<td>${escapeHtml(e.after ?? "-")}</td></tr>`,
  );
  return (
    `<table class="diff"><tr><th>criterion</th><th>before</th><th>after</th></tr>` +
    rows.join("") +
    `</table>`
  );
}

export function renderRuleGrid(grid: RuleGrid, error: CompileErrorAnchor | null): string {
  const rows = grid.ruleLines().map((line) => {
    const flagged = error !== null && error.lineNumber === line.lineNumber;
    const cells = line.cells
      .map(
        (cell, col) =>
          `<td><input data-line="${line.lineNumber}" data-col="${col}"` +
          ` value="${escapeHtml(cell)}"></td>`,
      )
      .join("");
    const errorRow = flagged
      ? `<tr class="grid-error-row"><td colspan="${line.cells.length + 1}">` +
        `${escapeHtml(error.message)}</td></tr>`
      : "";
    return (
      `<tr${flagged ? ' class="grid-row-flagged"' : ""}>` +
      `${cells}<td><button data-delete="${line.lineNumber}">delete</button></td></tr>` +
      errorRow
    );
  });
  return `<table class="rule-grid">${rows.join("")}</table>`;
}

/** Smoke-level page skeleton; main.ts fills the regions. */
export function pageRegions(): string[] {
  return ["banner", "patients", "toggles", "document", "attributes", "decisions", "rules", "diff"];
}

export { LAYER_ORDER };
