/**
 * `train` subcommand: fine-tune the classifier on a gold-format TSV
 * (header id\ttext\tlabel, label OFF or NOT) and save a model directory.
 */

import * as fs from "node:fs";

import { ConfigError, DataError } from "./errors";
import { DEFAULT_CONFIG, Example, Model, TrainingConfig, train } from "./model";
import { DEFAULT_NAME, TrainLog, saveModel } from "./store";
import { Tokenizer, maskHandles } from "./tokenizer";

export function loadGoldTsv(file: string): Example[] {
  let raw: string;
  try {
    raw = fs.readFileSync(file, "utf8");
  } catch (err) {
    throw new DataError(`cannot read training file: ${err}`);
  }
  const lines = raw.split("\n");
  if (lines[0] !== "id\ttext\tlabel") {
    throw new DataError(`${file}:1: missing or wrong header (expected id\\ttext\\tlabel)`);
  }
  const examples: Example[] = [];
  for (let i = 1; i < lines.length; i++) {
    if (lines[i] === "" && i === lines.length - 1) continue; // trailing newline
    const fields = lines[i].split("\t");
    if (fields.length !== 3) {
      throw new DataError(`${file}:${i + 1}: expected 3 tab-separated fields, got ${fields.length}`);
    }
    const [, text, label] = fields;
    if (label !== "OFF" && label !== "NOT") {
      throw new DataError(`${file}:${i + 1}: unknown label ${JSON.stringify(label)}`);
    }
    examples.push({ text, label });
  }
  return examples;
}

export interface TrainArgs {
  trainFile: string;
  outDir: string;
  name: string;
  maskHandles: boolean;
  config: TrainingConfig;
}

export function validateConfig(config: TrainingConfig): void {
  if (config.epochs < 1) throw new ConfigError("epochs must be at least 1");
  if (config.batch_size < 1) throw new ConfigError("batch_size must be at least 1");
  if (config.warmup_steps < 0) throw new ConfigError("warmup_steps must be non-negative");
  if (config.learning_rate <= 0) throw new ConfigError("learning_rate must be positive");
  if (config.max_sequence_length < 2) {
    throw new ConfigError("max_sequence_length must leave room for [CLS] plus a token");
  }
  if (config.adam_epsilon <= 0) throw new ConfigError("adam_epsilon must be positive");
}

export function runTrain(args: TrainArgs): void {
  validateConfig(args.config);
  let examples = loadGoldTsv(args.trainFile);
  if (examples.length === 0) throw new DataError("training set is empty");
  const labels = new Set(examples.map((ex) => ex.label));
  if (labels.size < 2) {
    throw new DataError("training set must contain both classes");
  }
  if (args.maskHandles) {
    examples = examples.map((ex) => ({ ...ex, text: maskHandles(ex.text) }));
  }

  const tokenizer = Tokenizer.fromCorpus(examples.map((ex) => ex.text));
  const model = Model.fresh(tokenizer, args.config.max_sequence_length);
  const steps = train(model, examples, args.config);

  const log: TrainLog = {
    config: args.config,
    preprocessing: { mask_handles: args.maskHandles },
    examples: examples.length,
    vocab_size: tokenizer.vocab.length,
    steps,
    final_loss: steps[steps.length - 1].loss,
  };
  saveModel(args.outDir, model, args.config, args.name, args.maskHandles, log);
  process.stderr.write(
    `trained on ${examples.length} examples, ${steps.length} steps, ` +
      `final loss ${log.final_loss.toFixed(4)} -> ${args.outDir}\n`,
  );
}

export function parseTrainArgs(argv: string[]): TrainArgs {
  const config: TrainingConfig = { ...DEFAULT_CONFIG };
  let trainFile: string | undefined;
  let outDir: string | undefined;
  let name = DEFAULT_NAME;
  let mask = false;

  const numeric = (flag: string, value: string | undefined): number => {
    const parsed = Number(value);
    if (value === undefined || Number.isNaN(parsed)) {
      throw new ConfigError(`${flag} needs a numeric value`);
    }
    return parsed;
  };

  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    if (flag === "--mask-handles") {
      mask = true;
      i -= 1; // boolean flag consumes one token
      continue;
    }
    const value = argv[i + 1];
    switch (flag) {
      case "--train": trainFile = value; break;
      case "--out": outDir = value; break;
      case "--name": name = value ?? name; break;
      case "--epochs": config.epochs = numeric(flag, value); break;
      case "--warmup-steps": config.warmup_steps = numeric(flag, value); break;
      case "--batch-size": config.batch_size = numeric(flag, value); break;
      case "--learning-rate": config.learning_rate = numeric(flag, value); break;
      case "--max-sequence-length": config.max_sequence_length = numeric(flag, value); break;
      case "--adam-epsilon": config.adam_epsilon = numeric(flag, value); break;
      case "--seed": config.seed = numeric(flag, value); break;
      default: throw new ConfigError(`unknown train option ${flag}`);
    }
  }
  if (!trainFile) throw new ConfigError("missing required option --train");
  if (!outDir) throw new ConfigError("missing required option --out");
  return { trainFile, outDir, name, maskHandles: mask, config };
}
