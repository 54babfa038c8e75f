import { describe, expect, it } from "vitest";

import { GridEditError, RuleGrid, parseCompileError } from "../src/rules.js";

import recompileError from "./fixtures/recompile_error.json";
import rulesFixture from "./fixtures/rules.json";

const tables = rulesFixture.tables as Record<string, string>;

describe("RuleGrid", () => {
  it("round-trips every demo table byte for byte", () => {
    for (const [kind, text] of Object.entries(tables)) {
      expect(RuleGrid.parse(kind, text).serialize()).toBe(text);
    }
  });

  it("classifies comment, blank and rule lines", () => {
    const grid = RuleGrid.parse("feature", "# header\n\na\tb\tc\n");
    expect(grid.lines.map((l) => l.kind)).toEqual(["comment", "blank", "rule"]);
    expect(grid.ruleLines()).toHaveLength(1);
    expect(grid.ruleLines()[0].cells).toEqual(["a", "b", "c"]);
  });

  it("sniffs comma-delimited tables", () => {
    const grid = RuleGrid.parse("feature", "a,b,c\n");
    expect(grid.delimiter).toBe(",");
    expect(grid.ruleLines()[0].cells).toEqual(["a", "b", "c"]);
  });

  it("edits a cell and only that line changes on save", () => {
    const original = tables["feature"];
    const grid = RuleGrid.parse("feature", original);
    const target = grid.ruleLines()[0];
    grid.setCell(target.lineNumber, 4, "Impression");
    const saved = grid.serialize().split("\n");
    const before = original.split("\n");
    expect(saved.length).toBe(before.length);
    for (let i = 0; i < before.length; i++) {
      if (i === target.lineNumber - 1) {
        expect(saved[i]).not.toBe(before[i]);
        expect(saved[i].endsWith("Impression")).toBe(true);
      } else {
        expect(saved[i]).toBe(before[i]);
      }
    }
  });

  it("deletes the Findings MI rule by predicate", () => {
    const grid = RuleGrid.parse("feature", tables["feature"]);
    const removed = grid.deleteMatchingRule(
      (cells) => cells[0] === "MI" && cells[4] === "Findings",
    );
    expect(removed).toBe(true);
    const saved = grid.serialize();
    expect(saved).not.toContain("MI\tCOPYALL\tMI_Candidate\taffirm,certain,patient,cardiac\tFindings");
    expect(saved).toContain("MI\tCOPYALL\tMI_Candidate\taffirm,certain,patient,cardiac\tImpression");
    expect(grid.deleteMatchingRule((cells) => cells[0] === "NoSuchConcept")).toBe(false);
  });

  it("appends a rule at the next line number", () => {
    const grid = RuleGrid.parse("feature", "a\tb\n");
    grid.appendRule(["x", "y"]);
    expect(grid.serialize()).toBe("a\tb\nx\ty\n");
    expect(grid.ruleLines()[1].lineNumber).toBe(2);
  });

  it("rejects edits to missing lines, columns and non-rule lines", () => {
    const grid = RuleGrid.parse("feature", "# comment\na\tb\n");
    expect(() => grid.setCell(99, 0, "x")).toThrow(GridEditError);
    expect(() => grid.setCell(2, 7, "x")).toThrow(GridEditError);
    expect(() => grid.setCell(1, 0, "x")).toThrow(GridEditError);
    expect(() => grid.deleteLine(99)).toThrow(GridEditError);
  });

  it("preserves the absence of a trailing newline", () => {
    const grid = RuleGrid.parse("feature", "a\tb");
    expect(grid.serialize()).toBe("a\tb");
  });
});

describe("parseCompileError", () => {
  it("extracts the row anchor from a real engine 422 detail", () => {
    const anchor = parseCompileError(recompileError.detail);
    expect(anchor.file).toBe("features.tsv");
    expect(anchor.lineNumber).toBe(21);
    expect(anchor.message).toMatch(/expected feature schema/);
    expect(anchor.message).toMatch(/got 2 cells/);
  });

  it("falls back to an unanchored message", () => {
    const anchor = parseCompileError("document rule row 3 references unknown evidence");
    expect(anchor.file).toBeNull();
    expect(anchor.lineNumber).toBeNull();
    expect(anchor.message).toContain("unknown evidence");
  });
});
