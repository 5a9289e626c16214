/** Results-table loading: the engine's CSV schema with strict validation. */

import Papa from "papaparse";

export type ResultsRow = Record<string, string>;

export class MissingColumnsError extends Error {
  constructor(public readonly columns: string[]) {
    super(`missing required column(s): ${columns.join(", ")}`);
    this.name = "MissingColumnsError";
  }
}

export class TableError extends Error {}

export function parseResults(text: string): ResultsRow[] {
  const parsed = Papa.parse<ResultsRow>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  const hard = parsed.errors.filter((e) => e.code !== "TooFewFields" && e.code !== "TooManyFields");
  if (hard.length > 0) {
    throw new TableError(`cannot parse results CSV: ${hard[0].message}`);
  }
  return parsed.data;
}

export function checkColumns(rows: ResultsRow[], required: string[]): void {
  const present = new Set(rows.length > 0 ? Object.keys(rows[0]) : []);
  const missing = required.filter((c) => !present.has(c));
  if (missing.length > 0) {
    throw new MissingColumnsError(missing);
  }
}

export function numeric(row: ResultsRow, column: string): number {
  const value = Number(row[column]);
  if (!Number.isFinite(value)) {
    throw new TableError(`column ${column} holds a non-finite value: ${JSON.stringify(row[column])}`);
  }
  return value;
}

export interface SeriesPoint {
  x: number;
  y: number;
  err: number;
}

export interface Series {
  scheme: string;
  points: SeriesPoint[];
}

/** Preferred legend order; anything else follows alphabetically. */
const SCHEME_ORDER = ["Proposed", "Baseline2", "Baseline1"];

export function extractSeries(rows: ResultsRow[], xColumn: string, yColumn: string,
                              errorColumn?: string): Series[] {
  if (rows.length === 0) {
    throw new TableError("no result rows matched the figure selection");
  }
  // appended re-runs may repeat a (scheme, x) point; the latest row wins
  const bySchemeX = new Map<string, Map<number, SeriesPoint>>();
  for (const row of rows) {
    const scheme = row.scheme ?? "";
    const x = numeric(row, xColumn);
    const point: SeriesPoint = {
      x,
      y: numeric(row, yColumn),
      err: errorColumn ? numeric(row, errorColumn) : 0,
    };
    if (!bySchemeX.has(scheme)) bySchemeX.set(scheme, new Map());
    bySchemeX.get(scheme)!.set(x, point);
  }
  const schemes = [...bySchemeX.keys()].sort((a, b) => {
    const ia = SCHEME_ORDER.indexOf(a);
    const ib = SCHEME_ORDER.indexOf(b);
    if (ia !== -1 || ib !== -1) return (ia === -1 ? 99 : ia) - (ib === -1 ? 99 : ib);
    return a.localeCompare(b);
  });
  return schemes.map((scheme) => ({
    scheme,
    points: [...bySchemeX.get(scheme)!.values()].sort((a, b) => a.x - b.x),
  }));
}
