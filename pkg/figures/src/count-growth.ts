/**
 * CLI: render the reachable-count growth chart.
 *
 *   node dist/count-growth.js --counts yo_counts.csv --out fig.svg
 */

import { writeFileSync } from "node:fs";
import process from "node:process";
import { SchemaError, readCountsCsv } from "./csv.js";
import { renderCountGrowth } from "./count-chart.js";

function parseArgs(argv: string[]): { counts: string; out: string } {
  let counts = "";
  let out = "";
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) {
      throw new Error(`missing value for ${flag}`);
    }
    switch (flag) {
      case "--counts":
        counts = value;
        break;
      case "--out":
        out = value;
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  if (counts === "" || out === "") {
    throw new Error("usage: count-growth --counts FILE.csv --out FILE.svg");
  }
  return { counts, out };
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
    writeFileSync(parsed.out, renderCountGrowth(readCountsCsv(parsed.counts)), "utf-8");
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
