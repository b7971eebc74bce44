/**
 * Parser for spreadcert sweep CSVs.
 *
 * The producer pins the schema in a leading comment line; anything else is
 * treated as drift and rejected so figures can never silently render stale
 * or foreign data.
 */

export const CSV_SCHEMA = "spreadcert-sweep-v1";

export const CSV_COLUMNS = [
  "mu",
  "rho",
  "xi_measured",
  "bound",
  "floor",
  "lambda_star",
  "laplacian_energy",
  "iterations",
  "stability_margin",
] as const;

export interface SweepRecord {
  mu: number;
  rho: number;
  xi_measured: number;
  bound: number;
  floor: number;
  lambda_star: number;
  laplacian_energy: number;
  iterations: number;
  stability_margin: number;
}

export class CsvSchemaError extends Error {}

export function parseSweepCsv(text: string): SweepRecord[] {
  const lines = text.split(/\r?\n/);
  if (lines.length < 2 || lines[0].trim() !== `# schema: ${CSV_SCHEMA}`) {
    throw new CsvSchemaError(
      `expected schema line '# schema: ${CSV_SCHEMA}', got '${lines[0] ?? ""}'`,
    );
  }
  if (lines[1].trim() !== CSV_COLUMNS.join(",")) {
    throw new CsvSchemaError(`unexpected header '${lines[1]}'`);
  }
  const records: SweepRecord[] = [];
  for (let i = 2; i < lines.length; i++) {
    const raw = lines[i].trim();
    if (raw === "") continue;
    const parts = raw.split(",");
    if (parts.length !== CSV_COLUMNS.length) {
      throw new CsvSchemaError(`row ${i + 1} has ${parts.length} fields, expected ${CSV_COLUMNS.length}`);
    }
    const values = parts.map((p) => Number(p));
    if (values.some((v) => Number.isNaN(v))) {
      throw new CsvSchemaError(`row ${i + 1} contains a non-numeric field: '${raw}'`);
    }
    records.push({
      mu: values[0],
      rho: values[1],
      xi_measured: values[2],
      bound: values[3],
      floor: values[4],
      lambda_star: values[5],
      laplacian_energy: values[6],
      iterations: values[7],
      stability_margin: values[8],
    });
  }
  return records;
}
