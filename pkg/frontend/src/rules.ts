// Grid model for one rule table. Editing is whole-table: the grid is
// parsed from the table text, edited cell-wise, and serialized back in
// full on save. Untouched lines keep their exact original bytes so a
// no-op save writes the identical file.

export type LineKind = "rule" | "comment" | "blank";

export interface GridLine {
  lineNumber: number; // 1-based line in the table source
  kind: LineKind;
  cells: string[]; // empty for comment/blank lines
  raw: string;
  dirty: boolean;
}

export class GridEditError extends Error {}

export class RuleGrid {
  readonly kind: string;
  readonly delimiter: string;
  readonly lines: GridLine[];
  private readonly trailingNewline: boolean;

  private constructor(kind: string, delimiter: string, lines: GridLine[], trailingNewline: boolean) {
    this.kind = kind;
    this.delimiter = delimiter;
    this.lines = lines;
    this.trailingNewline = trailingNewline;
  }

  static parse(kind: string, text: string): RuleGrid {
    const delimiter = text.includes("\t") ? "\t" : ",";
    const trailingNewline = text.endsWith("\n");
    const body = trailingNewline ? text.slice(0, -1) : text;
    const lines = (body === "" ? [] : body.split("\n")).map((raw, i): GridLine => {
      const stripped = raw.trim();
      const kind_: LineKind =
        stripped === "" ? "blank" : stripped.startsWith("#") ? "comment" : "rule";
      return {
        lineNumber: i + 1,
        kind: kind_,
        cells: kind_ === "rule" ? raw.split(delimiter) : [],
        raw,
        dirty: false,
      };
    });
    return new RuleGrid(kind, delimiter, lines, trailingNewline);
  }

  /** Rule lines only, in source order (what the grid editor displays). */
  ruleLines(): GridLine[] {
    return this.lines.filter((l) => l.kind === "rule");
  }

  private lineAt(lineNumber: number): GridLine {
    const line = this.lines.find((l) => l.lineNumber === lineNumber);
    if (line === undefined) {
      throw new GridEditError(`no line ${lineNumber} in ${this.kind} table`);
    }
    return line;
  }

  setCell(lineNumber: number, column: number, value: string): void {
    const line = this.lineAt(lineNumber);
    if (line.kind !== "rule") {
      throw new GridEditError(`line ${lineNumber} is a ${line.kind} line, not a rule`);
    }
    if (column < 0 || column >= line.cells.length) {
      throw new GridEditError(
        `line ${lineNumber} has ${line.cells.length} cells, no column ${column}`,
      );
    }
    line.cells[column] = value;
    line.dirty = true;
  }

  deleteLine(lineNumber: number): void {
    const index = this.lines.findIndex((l) => l.lineNumber === lineNumber);
    if (index < 0) {
      throw new GridEditError(`no line ${lineNumber} in ${this.kind} table`);
    }
    this.lines.splice(index, 1);
  }

  /** Delete the first rule line whose cells satisfy the predicate. */
  deleteMatchingRule(predicate: (cells: string[]) => boolean): boolean {
    const line = this.ruleLines().find((l) => predicate(l.cells));
    if (line === undefined) {
      return false;
    }
    this.deleteLine(line.lineNumber);
    return true;
  }

  appendRule(cells: string[]): void {
    const last = this.lines[this.lines.length - 1];
    this.lines.push({
      lineNumber: (last?.lineNumber ?? 0) + 1,
      kind: "rule",
      cells: [...cells],
      raw: cells.join(this.delimiter),
      dirty: true,
    });
  }

  serialize(): string {
    const parts = this.lines.map((l) =>
      l.kind === "rule" && l.dirty ? l.cells.join(this.delimiter) : l.raw,
    );
    return parts.join("\n") + (this.trailingNewline ? "\n" : "");
  }
}

export interface CompileErrorAnchor {
  file: string | null; // basename of the offending table file
  lineNumber: number | null; // 1-based source line within that file
  message: string;
}

/**
 * Engine compile errors read "<path>:<row>: message"; pull out the
 * anchor so the grid can flag the offending row inline.
 */
export function parseCompileError(detail: string): CompileErrorAnchor {
  const match = /^(.*?):(\d+):\s*(.*)$/s.exec(detail);
  if (match === null) {
    return { file: null, lineNumber: null, message: detail };
  }
  const path = match[1];
  const base = path.split("/").pop() ?? path;
  return { file: base, lineNumber: Number(match[2]), message: match[3] };
}
