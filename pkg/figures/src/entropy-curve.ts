/**
 * CLI: render the entropy-vs-steps chart.
 *
 *   node dist/entropy-curve.js --pm pm_entropy.csv --yo yo_entropy.csv --out fig.svg
 *
 * Either series may be omitted (at least one is required); extra series can
 * be passed with repeated --csv flags.
 */

import { writeFileSync } from "node:fs";
import process from "node:process";
import { EntropyCsv, SchemaError, readEntropyCsv } from "./csv.js";
import { renderEntropyCurve } from "./entropy-chart.js";

function parseArgs(argv: string[]): { csvs: string[]; out: string } {
  const csvs: string[] = [];
  let out = "";
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) {
      throw new Error(`missing value for ${flag}`);
    }
    switch (flag) {
      case "--pm":
      case "--yo":
      case "--csv":
        csvs.push(value);
        break;
      case "--out":
        out = value;
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  if (csvs.length === 0 || out === "") {
    throw new Error(
      "usage: entropy-curve [--pm FILE] [--yo FILE] [--csv FILE]... --out FILE.svg",
    );
  }
  return { csvs, out };
}

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs(argv);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
  try {
    const series: EntropyCsv[] = parsed.csvs.map(readEntropyCsv);
    writeFileSync(parsed.out, renderEntropyCurve(series), "utf-8");
    console.log(`wrote ${parsed.out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
