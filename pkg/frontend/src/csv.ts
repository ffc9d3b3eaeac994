/** CSV reading for the harness file contract (header row, LF, no quoting). */

export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((ln) => ln.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty CSV: no header row");
  }
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((ln, i) => {
    const cells = ln.split(",");
    if (cells.length !== columns.length) {
      throw new SchemaError(
        `row ${i + 1} has ${cells.length} cells, header has ${columns.length}`,
      );
    }
    const rec: Record<string, string> = {};
    columns.forEach((c, j) => (rec[c] = cells[j]));
    return rec;
  });
  return { columns, rows };
}

/** Assert the columns a figure needs, naming the first one missing. */
export function requireColumns(table: Table, needed: string[], context: string): void {
  for (const col of needed) {
    if (!table.columns.includes(col)) {
      throw new SchemaError(`${context}: missing column '${col}' (have: ${table.columns.join(", ")})`);
    }
  }
}

export function numericColumn(table: Table, col: string): number[] {
  return table.rows.map((r, i) => {
    const v = Number(r[col]);
    if (!Number.isFinite(v)) {
      throw new SchemaError(`column '${col}' row ${i + 1}: not a finite number (${r[col]})`);
    }
    return v;
  });
}

/** Distinct values of a column in first-appearance order. */
export function distinct(table: Table, col: string): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  for (const r of table.rows) {
    const v = r[col];
    if (!seen.has(v)) {
      seen.add(v);
      out.push(v);
    }
  }
  return out;
}
