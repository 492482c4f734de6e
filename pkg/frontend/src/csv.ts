import { readFileSync } from "fs";

/** One curve from a trajectory table: the <label>_abs column, plus the label. */
export interface CurveSeries {
  label: string;
  abs: number[];
}

/** Parsed trajectory CSV: shared time axis plus one magnitude series per curve. */
export interface TrajectoryTable {
  file: string;
  t: number[];
  curves: CurveSeries[];
}

/** Raised for anything wrong with a CSV; the message always names the file. */
export class CsvError extends Error {
  constructor(file: string, why: string) {
    super(`${file}: ${why}`);
    this.name = "CsvError";
  }
}

function splitLines(text: string): string[] {
  const lines = text.split("\n").map((l) => (l.endsWith("\r") ? l.slice(0, -1) : l));
  // a trailing newline is not an empty data row
  if (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  return lines;
}

/**
 * Parse a trajectory CSV of the form `t,<label>_re,<label>_im,<label>_abs,...`.
 *
 * Every field must be numeric and every row as wide as the header. Only the
 * time column and the `_abs` columns are kept; a header-only file (or one
 * with no `_abs` columns at all) parses to zero curves so the caller can
 * draw empty axes instead of failing.
 */
export function parseTrajectoryCsv(file: string, text: string): TrajectoryTable {
  const lines = splitLines(text);
  if (lines.length === 0) throw new CsvError(file, "empty file, expected a header row");

  const header = lines[0].split(",");
  if (header[0] !== "t") {
    throw new CsvError(file, `first column must be "t", got "${header[0]}"`);
  }

  const absColumns: Array<{ label: string; index: number }> = [];
  for (let j = 1; j < header.length; j++) {
    const name = header[j];
    if (name === "") throw new CsvError(file, `empty column name at position ${j + 1}`);
    if (name.endsWith("_abs")) absColumns.push({ label: name.slice(0, -4), index: j });
  }

  const t: number[] = [];
  const curves: CurveSeries[] = absColumns.map(({ label }) => ({ label, abs: [] }));

  for (let i = 1; i < lines.length; i++) {
    const fields = lines[i].split(",");
    if (fields.length !== header.length) {
      throw new CsvError(
        file,
        `row ${i + 1} has ${fields.length} fields, header has ${header.length}`,
      );
    }
    for (let j = 0; j < fields.length; j++) {
      const v = Number(fields[j]);
      if (fields[j] === "" || !Number.isFinite(v)) {
        throw new CsvError(file, `row ${i + 1}, column "${header[j]}": not a number: "${fields[j]}"`);
      }
    }
    t.push(Number(fields[0]));
    for (let k = 0; k < absColumns.length; k++) {
      curves[k].abs.push(Number(fields[absColumns[k].index]));
    }
  }

  return { file, t, curves };
}

/** Read and parse one trajectory CSV; a missing or unreadable file names itself. */
export function readTrajectoryCsv(path: string): TrajectoryTable {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new CsvError(path, `cannot read: ${(err as NodeJS.ErrnoException).code ?? err}`);
  }
  return parseTrajectoryCsv(path, text);
}
