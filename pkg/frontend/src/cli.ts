/**
 * plot --kind mu|rho --in <sweep.csv> --out <figure.svg>
 *
 * Exit codes: 0 success, 1 usage problem, 2 parse or plot-data error.
 */

import { readFileSync, writeFileSync } from "fs";
import { CsvSchemaError, parseSweepCsv } from "./csv.js";
import { PlotDataError, renderMuSweepPlot, renderRhoSweepPlot } from "./plots.js";

interface Args {
  kind: "mu" | "rho";
  input: string;
  output: string;
}

function usage(): string {
  return "usage: spreadcert-plot --kind mu|rho --in <sweep.csv> --out <figure.svg>";
}

function parseArgs(argv: string[]): Args {
  let kind: string | undefined;
  let input: string | undefined;
  let output: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (flag === "--kind") {
      kind = value;
      i++;
    } else if (flag === "--in") {
      input = value;
      i++;
    } else if (flag === "--out") {
      output = value;
      i++;
    } else {
      throw new Error(`unknown argument '${flag}'\n${usage()}`);
    }
  }
  if (kind !== "mu" && kind !== "rho") {
    throw new Error(`--kind must be 'mu' or 'rho'\n${usage()}`);
  }
  if (!input || !output) {
    throw new Error(`--in and --out are required\n${usage()}`);
  }
  if (!output.endsWith(".svg")) {
    throw new Error("only SVG output is supported; --out must end in .svg");
  }
  return { kind, input, output };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 1;
  }
  try {
    const records = parseSweepCsv(readFileSync(args.input, "utf-8"));
    const svg = args.kind === "mu" ? renderMuSweepPlot(records) : renderRhoSweepPlot(records);
    writeFileSync(args.output, svg);
    console.log(`wrote ${args.output} (${records.length} records)`);
    return 0;
  } catch (err) {
    if (err instanceof CsvSchemaError || err instanceof PlotDataError) {
      console.error(`plot failed: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
