/** CSV loading with header validation against the harness schemas. */

export class SchemaMismatch extends Error {}
export class EmptyInput extends Error {}

export type Row = Record<string, string>;

export function parseCsv(text: string, expectedHeader: string[]): Row[] {
  const lines = text.split(/\r?\n/).filter((l) => l.trim() !== '');
  if (lines.length === 0) {
    throw new EmptyInput('input file has no content');
  }
  const header = lines[0].split(',');
  if (header.length !== expectedHeader.length ||
      !expectedHeader.every((name, i) => header[i] === name)) {
    throw new SchemaMismatch(
      `expected header ${expectedHeader.join(',')} but found ${lines[0]}`,
    );
  }
  const rows: Row[] = [];
  for (const line of lines.slice(1)) {
    const fields = line.split(',');
    if (fields.length !== header.length) {
      throw new SchemaMismatch(`row has ${fields.length} fields, expected ${header.length}: ${line}`);
    }
    const row: Row = {};
    header.forEach((name, i) => (row[name] = fields[i]));
    rows.push(row);
  }
  if (rows.length === 0) {
    throw new EmptyInput('input file has a header but no data rows');
  }
  return rows;
}

export function num(row: Row, field: string): number {
  const raw = row[field];
  if (raw === 'inf') return Infinity;
  const value = Number(raw);
  if (!Number.isFinite(value) && raw !== 'inf') {
    throw new SchemaMismatch(`field ${field} is not numeric: ${raw}`);
  }
  return value;
}

export const SWEEP_HEADER = ['threshold', 'planning_us', 'execution_us', 'reopt_rounds'];
export const LADDER_HEADER = ['n', 'planning_us', 'execution_us'];
export const BENCH_HEADER = [
  'query_id', 'config', 'planning_us', 'execution_us', 'reopt_rounds', 'output_rows', 'error',
];
export const IMPROVEMENT_HEADER = ['query_id', 'iteration', 'execution_us', 'perfect_us'];
