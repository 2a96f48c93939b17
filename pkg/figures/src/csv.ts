/**
 * Readers for the versioned qsicsim CSV schemas.
 *
 * These are strictly read-only consumers: every number plotted or annotated
 * downstream is taken from the file, never recomputed.
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export interface EntropyRow {
  step: number;
  reachableCount: number;
  /** Verbatim entropy string from the file, for annotations. */
  entropyText: string;
  entropyBits: number;
}

export interface EntropyCsv {
  setName: string;
  baselineText: string | null;
  baselineBits: number | null;
  rows: EntropyRow[];
}

export interface CountsRow {
  step: number;
  reachableCount: number;
  /** Verbatim count string from the file. */
  countText: string;
}

export interface CountsCsv {
  setName: string;
  rows: CountsRow[];
}

interface RawCsv {
  meta: Map<string, string>;
  header: string[];
  records: string[][];
}

function parseRaw(path: string): RawCsv {
  let content: string;
  try {
    content = readFileSync(path, "utf-8");
  } catch (err) {
    throw new SchemaError(`cannot read ${path}: ${(err as Error).message}`);
  }
  const meta = new Map<string, string>();
  const dataLines: string[] = [];
  for (const line of content.split(/\r?\n/)) {
    if (line.startsWith("#")) {
      const idx = line.indexOf(":");
      if (idx > 0) {
        meta.set(line.slice(1, idx).trim(), line.slice(idx + 1).trim());
      }
      continue;
    }
    if (line.trim() !== "") {
      dataLines.push(line);
    }
  }
  const parsed = Papa.parse<string[]>(dataLines.join("\n"), {
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new SchemaError(`${path}: malformed CSV (${first.message})`);
  }
  const records = parsed.data;
  if (records.length === 0) {
    throw new SchemaError(`${path}: no header row`);
  }
  return { meta, header: records[0], records: records.slice(1) };
}

function columnIndex(raw: RawCsv, path: string, name: string): number {
  const idx = raw.header.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`${path}: missing column '${name}'`);
  }
  return idx;
}

function requireInt(path: string, value: string, column: string): number {
  if (!/^\d+$/.test(value)) {
    throw new SchemaError(`${path}: column '${column}' has non-integer value '${value}'`);
  }
  return Number(value);
}

function requireFloat(path: string, value: string, column: string): number {
  const parsed = Number(value);
  if (value.trim() === "" || Number.isNaN(parsed)) {
    throw new SchemaError(`${path}: column '${column}' has non-numeric value '${value}'`);
  }
  return parsed;
}

export function readEntropyCsv(path: string): EntropyCsv {
  const raw = parseRaw(path);
  const schema = raw.meta.get("schema");
  if (schema !== undefined && schema !== "qsicsim.entropy.v1") {
    throw new SchemaError(`${path}: expected schema qsicsim.entropy.v1, got ${schema}`);
  }
  const stepIdx = columnIndex(raw, path, "step");
  const countIdx = columnIndex(raw, path, "reachable_count");
  const bitsIdx = columnIndex(raw, path, "entropy_bits");
  if (raw.records.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  const rows = raw.records.map((record) => ({
    step: requireInt(path, record[stepIdx] ?? "", "step"),
    reachableCount: requireInt(path, record[countIdx] ?? "", "reachable_count"),
    entropyText: record[bitsIdx] ?? "",
    entropyBits: requireFloat(path, record[bitsIdx] ?? "", "entropy_bits"),
  }));
  const baselineText = raw.meta.get("noncontextual_baseline_bits") ?? null;
  return {
    setName: raw.meta.get("set") ?? "",
    baselineText,
    baselineBits: baselineText === null ? null : Number(baselineText),
    rows,
  };
}

export function readCountsCsv(path: string): CountsCsv {
  const raw = parseRaw(path);
  const schema = raw.meta.get("schema");
  if (schema !== undefined && schema !== "qsicsim.counts.v1") {
    throw new SchemaError(`${path}: expected schema qsicsim.counts.v1, got ${schema}`);
  }
  const stepIdx = columnIndex(raw, path, "step");
  const countIdx = columnIndex(raw, path, "reachable_count");
  if (raw.records.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  const rows = raw.records.map((record) => ({
    step: requireInt(path, record[stepIdx] ?? "", "step"),
    reachableCount: requireInt(path, record[countIdx] ?? "", "reachable_count"),
    countText: record[countIdx] ?? "",
  }));
  return { setName: raw.meta.get("set") ?? "", rows };
}
