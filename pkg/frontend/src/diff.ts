// Decision diff between two runs of the same patient: which criterion
// verdicts changed. A re-run after a no-op edit must yield [].

import type { DecisionSnapshot, Verdict } from "./types.js";

export interface DiffEntry {
  criterion: string;
  before: Verdict | null; // null: criterion absent on that side
  after: Verdict | null;
}

export function decisionDiff(
  before: DecisionSnapshot[],
  after: DecisionSnapshot[],
): DiffEntry[] {
  const b = new Map(before.map((d) => [d.criterion, d.decision]));
  const a = new Map(after.map((d) => [d.criterion, d.decision]));
  const criteria = [...new Set([...b.keys(), ...a.keys()])].sort();
  const entries: DiffEntry[] = [];
  for (const criterion of criteria) {
    const beforeVerdict = b.get(criterion) ?? null;
    const afterVerdict = a.get(criterion) ?? null;
    if (beforeVerdict !== afterVerdict) {
      entries.push({ criterion, before: beforeVerdict, after: afterVerdict });
    }
  }
  return entries;
}
