/**
 * `serve` subcommand: speak the line-delimited JSON wire protocol over
 * stdin/stdout.
 *
 *   host ->  {"proto":1}
 *   serve -> {"proto":1,"name":"<model name>"}
 *   host ->  {"id":"...","text":"..."}    one per line
 *   host ->  {"end":true}                 end of batch
 *   serve -> {"id":"...","label":"OFF"|"NOT","score":<p(OFF)>}
 *
 * Responses are emitted immediately in request order, so every pending
 * response is flushed before the end marker is passed. A malformed
 * request line yields {"id":null,"error":"malformed request line"} and
 * the loop continues. Scores are rounded to 1e-6 so the emitted JSON is
 * canonical (shortest round-trip) across serializers.
 */

import * as readline from "node:readline";

import { Model } from "./model";
import { loadModel } from "./store";
import { maskHandles } from "./tokenizer";
import { ConfigError } from "./errors";

const PROTO = 1;

function emit(payload: unknown): void {
  process.stdout.write(JSON.stringify(payload) + "\n");
}

export function scoreToWire(probability: number): number {
  const rounded = Math.round(probability * 1e6) / 1e6;
  return Math.min(1, Math.max(0, rounded));
}

export function respond(model: Model, id: string, text: string, mask: boolean): void {
  const score = scoreToWire(model.scoreOff(mask ? maskHandles(text) : text));
  emit({ id, label: score >= 0.5 ? "OFF" : "NOT", score });
}

export function runServe(modelDir: string, nameOverride?: string): Promise<void> {
  // preprocessing must match training, so the mask flag rides in the model dir
  const { model, name, maskHandles: mask } = loadModel(modelDir);
  const reportedName = nameOverride ?? name;

  return new Promise((resolve) => {
    const lines = readline.createInterface({ input: process.stdin, terminal: false });
    let handshaken = false;
    lines.on("line", (line) => {
      if (!handshaken) {
        let proto: unknown;
        try {
          const hello = JSON.parse(line);
          proto = hello && typeof hello === "object" ? (hello as any).proto : undefined;
        } catch {
          proto = undefined;
        }
        if (proto !== PROTO) {
          emit({ id: null, error: "unsupported protocol" });
          lines.close();
          return;
        }
        handshaken = true;
        emit({ proto: PROTO, name: reportedName });
        return;
      }
      if (line.trim() === "") return;
      let request: any;
      try {
        request = JSON.parse(line);
      } catch {
        emit({ id: null, error: "malformed request line" });
        return;
      }
      if (request && typeof request === "object" && request.end === true) {
        return; // responses are written eagerly; nothing left to flush
      }
      if (
        !request ||
        typeof request !== "object" ||
        typeof request.id !== "string" ||
        typeof request.text !== "string"
      ) {
        emit({ id: null, error: "malformed request line" });
        return;
      }
      respond(model, request.id, request.text, mask);
    });
    lines.on("close", resolve);
  });
}

export interface ServeArgs {
  modelDir: string;
  name?: string;
}

export function parseServeArgs(argv: string[]): ServeArgs {
  let modelDir: string | undefined;
  let name: string | undefined;
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    switch (flag) {
      case "--model": modelDir = value; break;
      case "--name": name = value; break;
      default: throw new ConfigError(`unknown serve option ${flag}`);
    }
  }
  if (!modelDir) throw new ConfigError("missing required option --model");
  return { modelDir, name };
}
