import { readFileSync } from "node:fs";

export class MissingColumn extends Error {}
export class EmptyInput extends Error {}

export interface Table {
  header: string[];
  rows: Record<string, string>[];
}

/** Parse a simple comma-separated file (no quoting; the solver never quotes). */
export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) throw new EmptyInput("file has no header");
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line) => {
    const cells = line.split(",");
    const row: Record<string, string> = {};
    header.forEach((name, i) => (row[name] = cells[i] ?? ""));
    return row;
  });
  return { header, rows };
}

export function readCsv(path: string): Table {
  return parseCsv(readFileSync(path, "utf8"));
}

/** Require columns and at least one data row; return numeric columns. */
export function numericColumns(
  table: Table,
  columns: string[],
  source = "input",
): Record<string, number[]> {
  for (const name of columns) {
    if (!table.header.includes(name)) {
      throw new MissingColumn(`${source} lacks required column '${name}'`);
    }
  }
  if (table.rows.length === 0) throw new EmptyInput(`${source} has no data rows`);
  const out: Record<string, number[]> = {};
  for (const name of columns) {
    out[name] = table.rows.map((row) => Number(row[name]));
  }
  return out;
}
