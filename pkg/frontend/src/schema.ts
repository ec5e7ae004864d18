/**
 * Summary-CSV schema: parsing and validation.
 *
 * The Monte Carlo harness writes one CSV per sweep:
 *
 *   # key=value                      file-level metadata (before the header)
 *   mode,n,m,k,N,B_sum,Var_sum,MSE_sum
 *   # lambda_u=2.50...e-01           starts a labelled row group
 *   fixed_m,360,30,12,200,...        data rows (floats printed as %.16e)
 *
 * Comments after the header delimit labelled row groups (one group per
 * tail-dependence level when several sweeps are stacked into one file);
 * ungrouped rows form a single group with empty metadata.  Any deviation
 * from the column contract is a hard SchemaError naming the columns that
 * are missing or unexpected.
 */

export const SUMMARY_COLUMNS = [
  "mode",
  "n",
  "m",
  "k",
  "N",
  "B_sum",
  "Var_sum",
  "MSE_sum",
] as const;

export interface SummaryRow {
  mode: string;
  n: number;
  m: number;
  k: number;
  N: number;
  B_sum: number;
  Var_sum: number;
  MSE_sum: number;
}

/** Consecutive data rows sharing the comment block that introduced them. */
export interface RowGroup {
  meta: Record<string, string>;
  rows: SummaryRow[];
}

export interface SummaryFile {
  /** Display name for error messages and legend fallbacks (usually the path). */
  name: string;
  /** Metadata comments seen before the header. */
  meta: Record<string, string>;
  groups: RowGroup[];
}

/** Input that does not follow the summary-CSV contract. */
export class SchemaError extends Error {
  override name = "SchemaError";
}

const INT_COLUMNS = ["n", "m", "k", "N"] as const;
const FLOAT_COLUMNS = ["B_sum", "Var_sum", "MSE_sum"] as const;

function parseComment(line: string): [string, string] {
  const body = line.slice(1).trim();
  const eq = body.indexOf("=");
  if (eq < 0) return [body, ""];
  return [body.slice(0, eq).trim(), body.slice(eq + 1).trim()];
}

/** Compare a found header against the contract and spell out the difference. */
function headerDiagnostics(name: string, found: string[]): string {
  const expected: readonly string[] = SUMMARY_COLUMNS;
  const missing = expected.filter((c) => !found.includes(c));
  const unexpected = found.filter((c) => !expected.includes(c));
  const parts = [`summary CSV schema mismatch in ${name}`];
  if (missing.length > 0) parts.push(`  missing columns: ${missing.join(", ")}`);
  if (unexpected.length > 0) parts.push(`  unexpected columns: ${unexpected.join(", ")}`);
  if (missing.length === 0 && unexpected.length === 0) {
    parts.push("  columns are out of order");
  }
  parts.push(`  expected header: ${expected.join(",")}`);
  parts.push(`  found header:    ${found.join(",")}`);
  return parts.join("\n");
}

function parseRow(name: string, lineNo: number, line: string): SummaryRow {
  const fields = line.split(",");
  if (fields.length !== SUMMARY_COLUMNS.length) {
    throw new SchemaError(
      `malformed summary row in ${name} (line ${lineNo}): ` +
        `expected ${SUMMARY_COLUMNS.length} fields, found ${fields.length}: ${line}`,
    );
  }
  const record: Record<string, string> = {};
  SUMMARY_COLUMNS.forEach((column, i) => {
    record[column] = fields[i] as string;
  });
  const row: Partial<SummaryRow> = { mode: record["mode"] };
  for (const column of INT_COLUMNS) {
    const value = Number(record[column]);
    if (!Number.isInteger(value)) {
      throw new SchemaError(
        `bad value in ${name} (line ${lineNo}): column ${column} ` +
          `must be an integer, found ${record[column]!}`,
      );
    }
    row[column] = value;
  }
  for (const column of FLOAT_COLUMNS) {
    const text = record[column]!;
    const value = Number(text);
    if (text.trim() === "" || !Number.isFinite(value)) {
      throw new SchemaError(
        `bad value in ${name} (line ${lineNo}): column ${column} ` +
          `must be a finite number, found ${text}`,
      );
    }
    row[column] = value;
  }
  return row as SummaryRow;
}

/**
 * Parse summary-CSV text into file metadata and labelled row groups.
 *
 * @param name  label used in error messages (typically the file path)
 * @param text  the raw CSV bytes, decoded as UTF-8
 */
export function parseSummaryCsv(name: string, text: string): SummaryFile {
  const meta: Record<string, string> = {};
  const groups: RowGroup[] = [];
  let headerSeen = false;
  let pendingMeta: Record<string, string> = {};

  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = (lines[i] as string).replace(/\r$/, "");
    if (line.trim() === "") continue;
    if (line.startsWith("#")) {
      const [key, value] = parseComment(line);
      if (headerSeen) {
        pendingMeta[key] = value;
      } else {
        meta[key] = value;
      }
      continue;
    }
    if (!headerSeen) {
      const found = line.split(",").map((c) => c.trim());
      if (
        found.length !== SUMMARY_COLUMNS.length ||
        found.some((c, j) => c !== SUMMARY_COLUMNS[j])
      ) {
        throw new SchemaError(headerDiagnostics(name, found));
      }
      headerSeen = true;
      continue;
    }
    if (Object.keys(pendingMeta).length > 0 || groups.length === 0) {
      groups.push({ meta: pendingMeta, rows: [] });
      pendingMeta = {};
    }
    (groups[groups.length - 1] as RowGroup).rows.push(parseRow(name, i + 1, line));
  }
  if (!headerSeen) {
    throw new SchemaError(
      `no header found in ${name}; expected ${SUMMARY_COLUMNS.join(",")}`,
    );
  }
  return { name, meta, groups };
}

/** Total data rows across all groups. */
export function rowCount(file: SummaryFile): number {
  return file.groups.reduce((total, group) => total + group.rows.length, 0);
}
