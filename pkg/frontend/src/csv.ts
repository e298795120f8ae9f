/**
 * Schema-validated readers for the simulation lab's CSV artifacts.
 *
 * Every reader pins the exact header its producer writes; any deviation
 * raises a SchemaError naming the offending column, so a figure can never
 * silently render from the wrong table.  Numeric cells are parsed
 * strictly ("nan"/"inf" allowed where the producer can emit them, empty
 * cells never), and the raw cell strings are kept alongside the parsed
 * values so annotations can quote the producer verbatim.
 */

import { readFileSync } from "fs";
import Papa from "papaparse";

export class SchemaError extends Error {
  readonly column: string;

  constructor(message: string, column: string) {
    super(message);
    this.name = "SchemaError";
    this.column = column;
  }
}

export type CellKind = "number" | "int" | "string" | "bool";

export interface ColumnSpec {
  name: string;
  kind: CellKind;
}

export interface Table {
  path: string;
  columns: string[];
  /** parsed cells, one record per data row */
  rows: Record<string, number | string | boolean>[];
  /** untouched cell text, same shape as rows */
  raw: Record<string, string>[];
}

function parseNumber(cell: string, column: string, line: number): number {
  const text = cell.trim();
  if (text === "nan") return NaN;
  if (text === "inf") return Infinity;
  if (text === "-inf") return -Infinity;
  const value = Number(text);
  if (text === "" || Number.isNaN(value)) {
    throw new SchemaError(
      `line ${line}: column "${column}" is not numeric: "${cell}"`, column);
  }
  return value;
}

function parseCell(cell: string, spec: ColumnSpec, line: number):
    number | string | boolean {
  switch (spec.kind) {
    case "string":
      return cell;
    case "bool":
      if (cell === "true") return true;
      if (cell === "false") return false;
      throw new SchemaError(
        `line ${line}: column "${spec.name}" is not a boolean: "${cell}"`,
        spec.name);
    case "int": {
      const value = parseNumber(cell, spec.name, line);
      if (!Number.isInteger(value)) {
        throw new SchemaError(
          `line ${line}: column "${spec.name}" is not an integer: "${cell}"`,
          spec.name);
      }
      return value;
    }
    case "number":
      return parseNumber(cell, spec.name, line);
  }
}

export function readTable(path: string, spec: ColumnSpec[]): Table {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<string[]>(text.trimEnd(), {
    delimiter: ",",
    skipEmptyLines: false,
  });
  if (parsed.errors.length > 0) {
    const err = parsed.errors[0];
    throw new SchemaError(`${path}: unparseable CSV: ${err.message}`, "");
  }
  const grid = parsed.data;
  if (grid.length === 0) {
    throw new SchemaError(`${path}: empty file, expected header "${
      spec.map(c => c.name).join(",")}"`, spec[0].name);
  }

  const header = grid[0];
  for (let i = 0; i < Math.max(header.length, spec.length); i++) {
    const want = spec[i]?.name;
    const got = header[i];
    if (want === undefined) {
      throw new SchemaError(
        `${path}: unexpected extra column "${got}"`, got);
    }
    if (got === undefined) {
      throw new SchemaError(
        `${path}: missing column "${want}"`, want);
    }
    if (got !== want) {
      throw new SchemaError(
        `${path}: column ${i + 1} is "${got}", expected "${want}"`, got);
    }
  }

  const rows: Record<string, number | string | boolean>[] = [];
  const raw: Record<string, string>[] = [];
  for (let r = 1; r < grid.length; r++) {
    const cells = grid[r];
    if (cells.length !== spec.length) {
      throw new SchemaError(
        `${path}: line ${r + 1} has ${cells.length} cells, expected ${
          spec.length}`, spec[Math.min(cells.length, spec.length - 1)].name);
    }
    const record: Record<string, number | string | boolean> = {};
    const rawRecord: Record<string, string> = {};
    for (let c = 0; c < spec.length; c++) {
      try {
        record[spec[c].name] = parseCell(cells[c], spec[c], r + 1);
      } catch (err) {
        if (err instanceof SchemaError) {
          throw new SchemaError(`${path}: ${err.message}`, err.column);
        }
        throw err;
      }
      rawRecord[spec[c].name] = cells[c];
    }
    rows.push(record);
    raw.push(rawRecord);
  }
  if (rows.length === 0) {
    throw new SchemaError(
      `${path}: no data rows under "${spec.map(c => c.name).join(",")}"`,
      spec[0].name);
  }
  return { path, columns: spec.map(c => c.name), rows, raw };
}

// -- the concrete artifact schemas -----------------------------------

export interface RateRow {
  L: number;
  eps: number;
  err_h1: number;
}

export function readRate(path: string): RateRow[] {
  const table = readTable(path, [
    { name: "L", kind: "number" },
    { name: "eps", kind: "number" },
    { name: "err_h1", kind: "number" },
  ]);
  return table.rows as unknown as RateRow[];
}

export interface ScanRow {
  L: number;
  seed: number;
  stat: number;
}

export function readScan(path: string): ScanRow[] {
  const table = readTable(path, [
    { name: "L", kind: "number" },
    { name: "seed", kind: "int" },
    { name: "stat", kind: "number" },
  ]);
  return table.rows as unknown as ScanRow[];
}

/**
 * key,value summaries (rate_summary.csv, scan_summary.csv).  Values stay
 * raw strings: annotations must quote the producer, never reformat.
 */
export function readSummary(path: string): Map<string, string> {
  const table = readTable(path, [
    { name: "key", kind: "string" },
    { name: "value", kind: "string" },
  ]);
  const out = new Map<string, string>();
  for (const row of table.raw) {
    out.set(row.key, row.value);
  }
  return out;
}

export function summaryValue(summary: Map<string, string>, key: string,
                             path: string): string {
  const value = summary.get(key);
  if (value === undefined) {
    throw new SchemaError(`${path}: summary is missing the "${key}" row`,
                          "key");
  }
  return value;
}

export interface EquilibriumRow {
  support: string;
  n0: number;
  n2: number;
  norm_sq: number;
  stable: boolean;
  hyperbolic: boolean;
}

export function readEquilibria(path: string): EquilibriumRow[] {
  const table = readTable(path, [
    { name: "support", kind: "string" },
    { name: "n0", kind: "int" },
    { name: "n2", kind: "int" },
    { name: "norm_sq", kind: "number" },
    { name: "stable", kind: "bool" },
    { name: "hyperbolic", kind: "bool" },
  ]);
  return table.rows as unknown as EquilibriumRow[];
}

export interface WaveRow {
  eps: number;
  c: number;
  residual: number;
}

export function readWave(path: string): WaveRow[] {
  const table = readTable(path, [
    { name: "eps", kind: "number" },
    { name: "c", kind: "number" },
    { name: "residual", kind: "number" },
  ]);
  return table.rows as unknown as WaveRow[];
}

export interface ModeRow {
  n: number;
  re: number;
  im: number;
}

export function readModes(path: string): ModeRow[] {
  const table = readTable(path, [
    { name: "n", kind: "int" },
    { name: "re", kind: "number" },
    { name: "im", kind: "number" },
  ]);
  return table.rows as unknown as ModeRow[];
}

export interface Ode3Row {
  beta: number;
  gamma: number;
  omega: number;
  lambda1: number;
}

export function readOde3(path: string): Ode3Row[] {
  const table = readTable(path, [
    { name: "beta", kind: "number" },
    { name: "gamma", kind: "number" },
    { name: "omega", kind: "number" },
    { name: "lambda1", kind: "number" },
  ]);
  return table.rows as unknown as Ode3Row[];
}
