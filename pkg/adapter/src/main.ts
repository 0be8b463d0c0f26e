#!/usr/bin/env node
/** Entry point: `train` and `serve` subcommands. */

import { ConfigError, DataError } from "./errors";
import { parseServeArgs, runServe } from "./serve";
import { parseTrainArgs, runTrain } from "./train";

const USAGE = `usage:
  main.js train --train <gold.tsv> --out <model dir>
      [--epochs 10] [--warmup-steps 1000] [--batch-size 8]
      [--learning-rate 2e-5] [--max-sequence-length 64]
      [--adam-epsilon 1e-8] [--seed 0] [--name <model name>]
  main.js serve --model <model dir> [--name <reported name>]
`;

async function main(): Promise<number> {
  const [command, ...rest] = process.argv.slice(2);
  try {
    if (command === "train") {
      runTrain(parseTrainArgs(rest));
      return 0;
    }
    if (command === "serve") {
      const args = parseServeArgs(rest);
      await runServe(args.modelDir, args.name);
      return 0;
    }
    process.stderr.write(USAGE);
    return command === undefined || command === "--help" ? 0 : 1;
  } catch (err) {
    if (err instanceof ConfigError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 1;
    }
    if (err instanceof DataError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 2;
    }
    throw err;
  }
}

main().then((code) => {
  process.exitCode = code;
});
