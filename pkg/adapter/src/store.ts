/**
 * Model directory layout:
 *
 *   config.json     training config echo + architecture dims + model name
 *   vocab.json      token array (index = id)
 *   weights.json    flat parameter arrays
 *   train_log.json  config echo, corpus stats, per-step losses
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { FF_DIM, MODEL_DIM, Model, TrainStep, TrainingConfig, Weights } from "./model";
import { Tokenizer } from "./tokenizer";

export const DEFAULT_NAME = "compact-uncased-transformer";

interface StoredConfig {
  name: string;
  model_dim: number;
  ff_dim: number;
  mask_handles: boolean;
  training: TrainingConfig;
}

export interface TrainLog {
  config: TrainingConfig;
  preprocessing: { mask_handles: boolean };
  examples: number;
  vocab_size: number;
  steps: TrainStep[];
  final_loss: number;
}

export function saveModel(
  dir: string,
  model: Model,
  config: TrainingConfig,
  name: string,
  maskHandles: boolean,
  log: TrainLog,
): void {
  fs.mkdirSync(dir, { recursive: true });
  const stored: StoredConfig = {
    name,
    model_dim: MODEL_DIM,
    ff_dim: FF_DIM,
    mask_handles: maskHandles,
    training: config,
  };
  fs.writeFileSync(path.join(dir, "config.json"), JSON.stringify(stored, null, 2) + "\n");
  fs.writeFileSync(path.join(dir, "vocab.json"), JSON.stringify(model.tokenizer.vocab) + "\n");
  const flat: Record<string, number[]> = {};
  for (const [key, value] of Object.entries(model.weights)) {
    flat[key] = Array.from(value as Float64Array);
  }
  fs.writeFileSync(path.join(dir, "weights.json"), JSON.stringify(flat) + "\n");
  fs.writeFileSync(path.join(dir, "train_log.json"), JSON.stringify(log, null, 2) + "\n");
}

export function loadModel(dir: string): { model: Model; name: string; maskHandles: boolean } {
  const configPath = path.join(dir, "config.json");
  if (!fs.existsSync(configPath)) {
    throw new Error(`not a model directory (missing config.json): ${dir}`);
  }
  const stored: StoredConfig = JSON.parse(fs.readFileSync(configPath, "utf8"));
  const vocab: string[] = JSON.parse(fs.readFileSync(path.join(dir, "vocab.json"), "utf8"));
  const flat: Record<string, number[]> = JSON.parse(
    fs.readFileSync(path.join(dir, "weights.json"), "utf8"),
  );
  const weights = Object.fromEntries(
    Object.entries(flat).map(([key, value]) => [key, Float64Array.from(value)]),
  ) as unknown as Weights;
  const model = new Model(new Tokenizer(vocab), weights, stored.training.max_sequence_length);
  return { model, name: stored.name, maskHandles: stored.mask_handles ?? false };
}
