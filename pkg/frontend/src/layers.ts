// Trace layers turned into a render model: one LayerView per pipeline
// component, plus text segments carrying the stacked underline marks.
// Underlines (not background fills) keep overlapping spans legible;
// depth follows the fixed layer order so later stages stack below.

import type {
  Annotation,
  ConclusionAnnotation,
  MentionAnnotation,
  SectionAnnotation,
  SentenceAnnotation,
  TracePayload,
} from "./types.js";

export const LAYER_ORDER = [
  "sectioner",
  "segmenter",
  "ner",
  "context",
  "temporal",
  "feature",
  "document",
] as const;

export type LayerName = (typeof LAYER_ORDER)[number];

export const LAYER_COLORS: Record<LayerName, string> = {
  sectioner: "#8a6d3b",
  segmenter: "#9e9e9e",
  ner: "#1f77b4",
  context: "#d62728",
  temporal: "#2ca02c",
  feature: "#9467bd",
  document: "#e377c2",
};

export interface SpanMark {
  begin: number;
  end: number;
  layer: LayerName;
  depth: number; // z-order: index of the layer in LAYER_ORDER
  annotationIndex: number; // index into the layer's annotation list
  label: string;
}

export interface LayerView {
  component: LayerName;
  color: string;
  annotations: Annotation[];
  marks: SpanMark[];
}

export class TraceShapeError extends Error {}

function isMention(a: Annotation): a is MentionAnnotation {
  return "concept" in a;
}

function isConclusion(a: Annotation): a is ConclusionAnnotation {
  return "group" in a && "evidence" in a;
}

function marksFor(component: LayerName, index: number, a: Annotation): SpanMark[] {
  const depth = LAYER_ORDER.indexOf(component);
  if (isConclusion(a)) {
    // document conclusions carry no span of their own; mark the evidence
    return a.evidence.map((m) => ({
      begin: m.begin,
      end: m.end,
      layer: component,
      depth,
      annotationIndex: index,
      label: a.type,
    }));
  }
  const span = a as SectionAnnotation | SentenceAnnotation | MentionAnnotation;
  const label = isMention(a) ? a.concept : (a as { type: string }).type;
  return [
    {
      begin: span.begin,
      end: span.end,
      layer: component,
      depth,
      annotationIndex: index,
      label,
    },
  ];
}

/** Build one view per trace layer, verifying spans stay inside the text. */
export function buildLayerViews(trace: TracePayload, text: string): LayerView[] {
  const byName = new Map(trace.layers.map((l) => [l.component, l]));
  const missing = LAYER_ORDER.filter((name) => !byName.has(name));
  if (missing.length > 0) {
    throw new TraceShapeError(`trace is missing layers: ${missing.join(", ")}`);
  }
  return LAYER_ORDER.map((name) => {
    const payload = byName.get(name)!;
    const marks: SpanMark[] = [];
    payload.annotations.forEach((a, i) => {
      for (const mark of marksFor(name, i, a)) {
        if (mark.begin < 0 || mark.end > text.length || mark.begin > mark.end) {
          throw new TraceShapeError(
            `${name} annotation ${i} span ${mark.begin}..${mark.end} ` +
              `outside text of length ${text.length}`,
          );
        }
        marks.push(mark);
      }
    });
    return { component: name, color: LAYER_COLORS[name], annotations: payload.annotations, marks };
  });
}

export interface TextSegment {
  begin: number;
  end: number;
  text: string;
  marks: SpanMark[]; // sorted by depth, empty for undecorated text
}

/**
 * Cut the document into contiguous segments, each annotated with the
 * marks of the visible layers covering it. With every layer toggled
 * off this degenerates to a single plain-text segment.
 */
export function buildSegments(
  text: string,
  layers: LayerView[],
  visible: ReadonlySet<string>,
): TextSegment[] {
  const active = layers
    .filter((l) => visible.has(l.component))
    .flatMap((l) => l.marks)
    .filter((m) => m.begin < m.end);
  const cuts = new Set<number>([0, text.length]);
  for (const m of active) {
    cuts.add(m.begin);
    cuts.add(m.end);
  }
  const points = [...cuts].sort((a, b) => a - b);
  const segments: TextSegment[] = [];
  for (let i = 0; i + 1 < points.length; i++) {
    const begin = points[i];
    const end = points[i + 1];
    const covering = active
      .filter((m) => m.begin <= begin && end <= m.end)
      .sort((a, b) => a.depth - b.depth || a.begin - b.begin);
    segments.push({ begin, end, text: text.slice(begin, end), marks: covering });
  }
  return segments;
}

export interface AnnotationDetails {
  layer: LayerName;
  label: string;
  span: { begin: number; end: number } | null;
  attributes: Record<string, string>;
  ruleRows: number[];
  event: { earliest: string; latest: string; basis?: string } | null;
}

/** What the attribute panel shows when an annotation is clicked. */
export function annotationDetails(layer: LayerView, index: number): AnnotationDetails {
  const a = layer.annotations[index];
  if (a === undefined) {
    throw new TraceShapeError(`no annotation ${index} in layer ${layer.component}`);
  }
  if (isMention(a)) {
    return {
      layer: layer.component,
      label: a.concept,
      span: { begin: a.begin, end: a.end },
      attributes: { ...a.attributes },
      ruleRows: [...a.rule_rows],
      event: a.event ?? null,
    };
  }
  if (isConclusion(a)) {
    const rows = new Set<number>();
    const attributes: Record<string, string> = {};
    for (const m of a.evidence) {
      for (const r of m.rule_rows) rows.add(r);
      Object.assign(attributes, m.attributes);
    }
    return {
      layer: layer.component,
      label: a.type,
      span: null,
      attributes,
      ruleRows: [...rows].sort((x, y) => x - y),
      event: a.event,
    };
  }
  const span = a as SectionAnnotation | SentenceAnnotation;
  return {
    layer: layer.component,
    label: span.type,
    span: { begin: span.begin, end: span.end },
    attributes: {},
    ruleRows: [],
    event: null,
  };
}
