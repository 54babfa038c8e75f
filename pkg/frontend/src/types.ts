// Payload shapes of the engine HTTP API. Every payload carries the
// ruleset fingerprint so a stale view is detectable client-side.

export type Verdict = "met" | "not_met";

export interface PatientSummary {
  patient_id: string;
  reference_date: string | null;
  doc_ids: string[];
}

export interface PatientsPayload {
  patients: PatientSummary[];
  fingerprint: string;
}

export interface DocumentPayload {
  doc_id: string;
  patient_id: string;
  seq: number;
  text: string;
  record_date: string | null;
  fingerprint: string;
}

export interface EventInterval {
  earliest: string;
  latest: string;
  basis?: string;
}

// ner / context / temporal / feature layers share the mention shape
export interface MentionAnnotation {
  concept: string;
  begin: number;
  end: number;
  sentence_index: number;
  source: string;
  attributes: Record<string, string>;
  rule_rows: number[];
  event?: EventInterval;
}

export interface SectionAnnotation {
  type: string;
  begin: number;
  end: number;
  header_begin: number;
  header_end: number;
}

export interface SentenceAnnotation {
  type: "Sentence";
  begin: number;
  end: number;
  index: number;
}

export interface ConclusionAnnotation {
  doc_id: string;
  group: string;
  type: string;
  priority: number;
  evidence: MentionAnnotation[];
  event: EventInterval | null;
}

export type Annotation =
  | MentionAnnotation
  | SectionAnnotation
  | SentenceAnnotation
  | ConclusionAnnotation;

export interface TraceLayerPayload {
  component: string;
  annotations: Annotation[];
}

export interface TracePayload {
  doc_id: string;
  fingerprint: string;
  layers: TraceLayerPayload[];
}

export interface DecisionSnapshot {
  patient_id: string;
  criterion: string;
  decision: Verdict;
  evidence: [string, string, string][];
}

export interface RunPayload {
  trace: TracePayload;
  decisions: DecisionSnapshot[];
  fingerprint: string;
}

export interface RulesPayload {
  tables: Record<string, string>;
  fingerprint: string;
}

export interface RecompilePayload {
  fingerprint: string;
}

export interface MetricRow {
  [field: string]: number;
}

export interface EvalPayload {
  report: {
    per_criterion: Record<string, MetricRow>;
    micro: MetricRow;
    macro: MetricRow;
  };
  fingerprint: string;
}

export const TABLE_KINDS = [
  "section",
  "sentence",
  "ner_include",
  "ner_exclude",
  "context",
  "temporal",
  "feature",
  "document",
  "patient",
] as const;

export type TableKind = (typeof TABLE_KINDS)[number];
