// Workbench state machine. All engine interaction goes through the
// ApiClient; the controller owns the view state the renderers consume.

import { ApiClient, ApiError, EngineUnreachableError } from "./api.js";
import {
  AnnotationDetails,
  LAYER_ORDER,
  LayerView,
  annotationDetails,
  buildLayerViews,
  buildSegments,
  TextSegment,
} from "./layers.js";
import { CompileErrorAnchor, RuleGrid, parseCompileError } from "./rules.js";
import { DiffEntry, decisionDiff } from "./diff.js";
import type {
  DecisionSnapshot,
  DocumentPayload,
  PatientSummary,
} from "./types.js";

const RUN_RETRY_LIMIT = 5;

export type SleepFn = (seconds: number) => Promise<void>;

const realSleep: SleepFn = (seconds) =>
  new Promise((resolve) => setTimeout(resolve, seconds * 1000));

export interface WorkbenchState {
  connection: "ok" | "unreachable";
  connectionDetail: string;
  patients: PatientSummary[];
  document: DocumentPayload | null;
  layers: LayerView[];
  visibleLayers: Set<string>;
  decisions: DecisionSnapshot[];
  selected: AnnotationDetails | null;
  tables: Record<string, string>;
  activeTableKind: string | null;
  grid: RuleGrid | null;
  compileError: CompileErrorAnchor | null;
  diff: DiffEntry[] | null; // null: no save happened yet
  viewFingerprint: string | null;
}

export class WorkbenchController {
  readonly api: ApiClient;
  readonly state: WorkbenchState;
  private readonly sleep: SleepFn;

  constructor(api: ApiClient, sleep: SleepFn = realSleep) {
    this.api = api;
    this.sleep = sleep;
    this.state = {
      connection: "ok",
      connectionDetail: "",
      patients: [],
      document: null,
      layers: [],
      visibleLayers: new Set(LAYER_ORDER),
      decisions: [],
      selected: null,
      tables: {},
      activeTableKind: null,
      grid: null,
      compileError: null,
      diff: null,
      viewFingerprint: null,
    };
  }

  get stale(): boolean {
    return this.api.isStale(this.state.viewFingerprint);
  }

  private async guarded<T>(action: () => Promise<T>): Promise<T> {
    try {
      const result = await action();
      this.state.connection = "ok";
      this.state.connectionDetail = "";
      return result;
    } catch (err) {
      if (err instanceof EngineUnreachableError) {
        this.state.connection = "unreachable";
        this.state.connectionDetail = err.message;
      }
      throw err;
    }
  }

  async loadPatients(): Promise<void> {
    const payload = await this.guarded(() => this.api.listPatients());
    this.state.patients = payload.patients;
  }

  /** Run the engine on one document, waiting out an in-flight recompile. */
  private async runWithRetry(docId: string) {
    for (let attempt = 0; ; attempt++) {
      try {
        return await this.guarded(() => this.api.runDocument(docId));
      } catch (err) {
        const busy = err instanceof ApiError && err.status === 503;
        if (!busy || attempt + 1 >= RUN_RETRY_LIMIT) {
          throw err;
        }
        await this.sleep((err as ApiError).retryAfterSeconds ?? 1);
      }
    }
  }

  async openDocument(docId: string): Promise<void> {
    const doc = await this.guarded(() => this.api.getDocument(docId));
    const run = await this.runWithRetry(docId);
    this.state.document = doc;
    this.state.layers = buildLayerViews(run.trace, doc.text);
    this.state.decisions = run.decisions;
    this.state.selected = null;
    this.state.diff = null;
    this.state.viewFingerprint = run.fingerprint;
  }

  toggleLayer(name: string): void {
    if (this.state.visibleLayers.has(name)) {
      this.state.visibleLayers.delete(name);
    } else {
      this.state.visibleLayers.add(name);
    }
  }

  setAllLayers(on: boolean): void {
    this.state.visibleLayers = new Set(on ? LAYER_ORDER : []);
  }

  segments(): TextSegment[] {
    if (this.state.document === null) {
      return [];
    }
    return buildSegments(this.state.document.text, this.state.layers, this.state.visibleLayers);
  }

  selectAnnotation(layerName: string, index: number): AnnotationDetails {
    const layer = this.state.layers.find((l) => l.component === layerName);
    if (layer === undefined) {
      throw new Error(`no such layer: ${layerName}`);
    }
    const details = annotationDetails(layer, index);
    this.state.selected = details;
    return details;
  }

  async loadRules(): Promise<void> {
    const payload = await this.guarded(() => this.api.getRules());
    this.state.tables = payload.tables;
  }

  openTable(kind: string): RuleGrid {
    const text = this.state.tables[kind];
    if (text === undefined) {
      throw new Error(`no such rule table: ${kind}`);
    }
    this.state.activeTableKind = kind;
    this.state.grid = RuleGrid.parse(kind, text);
    this.state.compileError = null;
    return this.state.grid;
  }

  /**
   * Whole-table save: write the table, recompile, re-run the open
   * document, and diff the criterion verdicts before and after. On a
   * compile error the previous ruleset stays active engine-side; the
   * error is anchored to its source row and nothing is re-run.
   */
  async saveActiveTable(): Promise<DiffEntry[] | null> {
    const { grid, activeTableKind, document } = this.state;
    if (grid === null || activeTableKind === null) {
      throw new Error("no rule table is open");
    }
    const content = grid.serialize();
    const before = this.state.decisions;
    await this.guarded(() => this.api.putRuleTable(activeTableKind, content));
    try {
      await this.guarded(() => this.api.recompile());
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        this.state.compileError = parseCompileError(err.detail);
        return null;
      }
      throw err;
    }
    this.state.compileError = null;
    this.state.tables[activeTableKind] = content;
    if (document === null) {
      this.state.diff = [];
      return this.state.diff;
    }
    const run = await this.runWithRetry(document.doc_id);
    this.state.layers = buildLayerViews(run.trace, document.text);
    this.state.decisions = run.decisions;
    this.state.diff = decisionDiff(before, run.decisions);
    this.state.viewFingerprint = run.fingerprint;
    return this.state.diff;
  }
}
