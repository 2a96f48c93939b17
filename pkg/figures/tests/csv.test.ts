import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { SchemaError, readCountsCsv, readEntropyCsv } from "../src/csv.js";

const FIXTURES = join(__dirname, "..", "fixtures");

function tempCsv(content: string): string {
  const dir = mkdtempSync(join(tmpdir(), "qsic-figures-"));
  const path = join(dir, "f.csv");
  writeFileSync(path, content, "utf-8");
  return path;
}

describe("readEntropyCsv", () => {
  it("reads the real yu-oh export", () => {
    const csv = readEntropyCsv(join(FIXTURES, "yu-oh_entropy.csv"));
    expect(csv.setName).toBe("yu-oh");
    expect(csv.baselineText).toBe("1.58496");
    expect(csv.rows[0]).toMatchObject({ step: 0, reachableCount: 13 });
    expect(csv.rows.at(-1)?.entropyText).toBe("5.74053");
  });

  it("reads the real peres-mermin export", () => {
    const csv = readEntropyCsv(join(FIXTURES, "peres-mermin_entropy.csv"));
    expect(csv.baselineText).toBe("2.00000");
    expect(new Set(csv.rows.map((r) => r.entropyText))).toEqual(new Set(["4.58496"]));
  });

  it("names a missing column", () => {
    const path = tempCsv("step,reachable_count\n0,13\n");
    expect(() => readEntropyCsv(path)).toThrowError(SchemaError);
    expect(() => readEntropyCsv(path)).toThrowError(/entropy_bits/);
  });

  it("rejects an empty body", () => {
    const path = tempCsv("step,reachable_count,entropy_bits\n");
    expect(() => readEntropyCsv(path)).toThrowError(/no data rows/);
  });

  it("rejects garbage values", () => {
    const path = tempCsv("step,reachable_count,entropy_bits\n0,13,banana\n");
    expect(() => readEntropyCsv(path)).toThrowError(SchemaError);
  });

  it("rejects a wrong schema tag", () => {
    const path = tempCsv(
      "# schema: qsicsim.counts.v1\nstep,reachable_count,entropy_bits\n0,13,3.7\n",
    );
    expect(() => readEntropyCsv(path)).toThrowError(/schema/);
  });

  it("rejects a missing file", () => {
    expect(() => readEntropyCsv("/nonexistent/nope.csv")).toThrowError(SchemaError);
  });
});

describe("readCountsCsv", () => {
  it("reads the real yu-oh counts", () => {
    const csv = readCountsCsv(join(FIXTURES, "yu-oh_counts.csv"));
    const byStep = new Map(csv.rows.map((r) => [r.step, r.countText]));
    expect(byStep.get(1)).toBe("25");
    expect(byStep.get(3)).toBe("265");
    expect(byStep.get(5)).toBe("3649");
    expect(byStep.get(7)).toBe("50293");
  });

  it("names a missing column", () => {
    const path = tempCsv("step,count\n0,13\n");
    expect(() => readCountsCsv(path)).toThrowError(/reachable_count/);
  });

  it("rejects an empty body", () => {
    const path = tempCsv("# schema: qsicsim.counts.v1\nstep,reachable_count\n");
    expect(() => readCountsCsv(path)).toThrowError(/no data rows/);
  });

  it("rejects non-integer counts", () => {
    const path = tempCsv("step,reachable_count\n0,many\n");
    expect(() => readCountsCsv(path)).toThrowError(SchemaError);
  });
});
