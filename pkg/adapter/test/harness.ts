/** Shared test plumbing: fixtures, CLI runner, line-protocol client. */

import { spawn } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { Rng } from "../src/rng";

export const MAIN = path.join(__dirname, "..", "src", "main.js");
export const PROTOCOL_FIXTURES = path.join(
  __dirname, "..", "..", "..", "tests", "fixtures", "protocol",
);

const OFF_VOCAB = ["grobble", "snarkle", "vexing", "blargh", "craven", "fuming", "rancor", "spite"];
const NOT_VOCAB = ["meadow", "gentle", "sunny", "breeze", "garden", "smile", "cheery", "mellow"];

export function tmpDir(prefix: string): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), prefix));
}

function sentence(rng: Rng, vocab: string[]): string {
  const words: string[] = [];
  const count = 4 + Math.floor(rng.next() * 4);
  for (let i = 0; i < count; i++) {
    words.push(vocab[Math.floor(rng.next() * vocab.length)]);
  }
  return words.join(" ");
}

/** Linearly separable gold TSV: disjoint vocabularies per class. */
export function writeSeparableTsv(file: string, perClass: number, seed = 42): void {
  const rng = new Rng(seed);
  const lines = ["id\ttext\tlabel"];
  for (let i = 0; i < perClass; i++) {
    lines.push(`o${i}\t${sentence(rng, OFF_VOCAB)}\tOFF`);
    lines.push(`n${i}\t${sentence(rng, NOT_VOCAB)}\tNOT`);
  }
  fs.writeFileSync(file, lines.join("\n") + "\n");
}

export function offText(seed: number): string {
  return sentence(new Rng(seed), OFF_VOCAB);
}

export function notText(seed: number): string {
  return sentence(new Rng(seed), NOT_VOCAB);
}

export interface CliResult {
  code: number;
  stdout: string;
  stderr: string;
}

export function runCli(args: string[]): Promise<CliResult> {
  return new Promise((resolve, reject) => {
    const child = spawn(process.execPath, [MAIN, ...args], { stdio: ["ignore", "pipe", "pipe"] });
    let stdout = "";
    let stderr = "";
    child.stdout.on("data", (chunk) => (stdout += chunk));
    child.stderr.on("data", (chunk) => (stderr += chunk));
    child.on("error", reject);
    child.on("close", (code) => resolve({ code: code ?? -1, stdout, stderr }));
  });
}

/** Tiny trained model shared by the serve-side tests. */
export async function trainTinyModel(dir: string, extra: string[] = []): Promise<void> {
  const data = path.join(dir, "train.tsv");
  writeSeparableTsv(data, 32);
  const result = await runCli([
    "train", "--train", data, "--out", path.join(dir, "model"),
    "--epochs", "3", "--learning-rate", "0.01", "--warmup-steps", "0", "--seed", "1",
    ...extra,
  ]);
  if (result.code !== 0) {
    throw new Error(`training the fixture model failed: ${result.stderr}`);
  }
}

/** Line-oriented client around a spawned serve process. */
export class LineClient {
  private readonly child;
  private buffer = "";
  private lines: string[] = [];
  private waiters: { resolve: (line: string) => void; reject: (err: Error) => void }[] = [];
  private closed = false;

  constructor(args: string[]) {
    this.child = spawn(process.execPath, [MAIN, ...args], {
      stdio: ["pipe", "pipe", "inherit"],
    });
    this.child.stdout.setEncoding("utf8");
    this.child.stdout.on("data", (chunk: string) => {
      this.buffer += chunk;
      let index;
      while ((index = this.buffer.indexOf("\n")) >= 0) {
        const line = this.buffer.slice(0, index);
        this.buffer = this.buffer.slice(index + 1);
        const waiter = this.waiters.shift();
        if (waiter) waiter.resolve(line);
        else this.lines.push(line);
      }
    });
    this.child.stdout.on("close", () => {
      this.closed = true;
      for (const waiter of this.waiters.splice(0)) {
        waiter.reject(new Error("adapter closed its output"));
      }
    });
  }

  send(line: string): void {
    this.child.stdin.write(line + "\n");
  }

  nextLine(timeoutMs = 15000): Promise<string> {
    const queued = this.lines.shift();
    if (queued !== undefined) return Promise.resolve(queued);
    if (this.closed) return Promise.reject(new Error("adapter closed its output"));
    return new Promise((resolve, reject) => {
      const timer = setTimeout(
        () => reject(new Error(`no response within ${timeoutMs}ms`)),
        timeoutMs,
      );
      this.waiters.push({
        resolve: (line) => {
          clearTimeout(timer);
          resolve(line);
        },
        reject: (err) => {
          clearTimeout(timer);
          reject(err);
        },
      });
    });
  }

  pendingLineCount(): number {
    return this.lines.length;
  }

  /** Close stdin and wait for a clean exit; returns leftover output lines. */
  end(): Promise<{ code: number; leftover: string[] }> {
    return new Promise((resolve) => {
      this.child.stdin.end();
      this.child.on("close", (code) => {
        const leftover = [...this.lines];
        if (this.buffer !== "") leftover.push(this.buffer);
        resolve({ code: code ?? -1, leftover });
      });
    });
  }

  kill(): void {
    this.child.kill();
  }
}
