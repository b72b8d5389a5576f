/**
 * Reader for the sweep CSVs.
 *
 * Files start with a `# schema=1` comment, then a header row, then data
 * rows. Values never contain commas or quoting, so splitting is enough.
 */

export const SCHEMA_LINE = "# schema=1";

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export class CsvFormatError extends Error {}

export function parseSchemaCsv(text: string, label: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0 || lines[0] !== SCHEMA_LINE) {
    const got = lines.length === 0 ? "<empty file>" : lines[0];
    throw new CsvFormatError(
      `${label}: expected first line "${SCHEMA_LINE}", got "${got}"`,
    );
  }
  if (lines.length < 2) {
    throw new CsvFormatError(`${label}: missing header row`);
  }
  const columns = lines[1].split(",");
  const rows: Record<string, string>[] = [];
  for (const line of lines.slice(2)) {
    const parts = line.split(",");
    if (parts.length !== columns.length) {
      throw new CsvFormatError(
        `${label}: row has ${parts.length} fields, header has ${columns.length}: "${line}"`,
      );
    }
    const row: Record<string, string> = {};
    columns.forEach((name, i) => (row[name] = parts[i]));
    rows.push(row);
  }
  if (rows.length === 0) {
    throw new CsvFormatError(`${label}: no data rows`);
  }
  return { columns, rows };
}

export function requireColumns(table: Table, needed: string[], label: string): void {
  for (const name of needed) {
    if (!table.columns.includes(name)) {
      throw new CsvFormatError(
        `${label}: missing column "${name}" in header "${table.columns.join(",")}"`,
      );
    }
  }
}

export function num(row: Record<string, string>, column: string): number {
  return Number(row[column]);
}
