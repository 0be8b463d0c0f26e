/**
 * Wire-protocol conformance against the shared transcript fixtures
 * (the same files the pipeline's stub adapter is held to, byte-exact).
 */

import assert from "node:assert/strict";
import * as fs from "node:fs";
import * as path from "node:path";
import { after, before, test } from "node:test";

import { LineClient, PROTOCOL_FIXTURES, tmpDir, trainTinyModel } from "./harness";

let workDir: string;
let modelDir: string;

before(async () => {
  workDir = tmpDir("adapter-protocol-");
  await trainTinyModel(workDir);
  modelDir = path.join(workDir, "model");
});

after(() => {
  fs.rmSync(workDir, { recursive: true, force: true });
});

function canonical(value: unknown): string {
  return JSON.stringify(value);
}

function checkCanonicalResponse(line: string, expectedId: string): void {
  const payload = JSON.parse(line);
  assert.deepEqual(Object.keys(payload), ["id", "label", "score"], line);
  assert.equal(payload.id, expectedId, line);
  assert.ok(payload.label === "OFF" || payload.label === "NOT", line);
  assert.equal(typeof payload.score, "number", line);
  assert.ok(payload.score >= 0 && payload.score <= 1, line);
  // byte-exact canonical form: re-serializing reproduces the line
  assert.equal(canonical(payload), line);
}

async function runTranscript(transcript: string): Promise<void> {
  const client = new LineClient(["serve", "--model", modelDir, "--name", "fixture"]);
  try {
    for (const raw of fs.readFileSync(transcript, "utf8").split("\n")) {
      if (raw.trim() === "" || raw.startsWith("#")) continue;
      const directive = raw.slice(0, 1);
      const payload = raw.slice(2);
      if (directive === ">") {
        client.send(payload);
      } else if (directive === "<") {
        assert.equal(await client.nextLine(), payload);
      } else if (directive === "~") {
        checkCanonicalResponse(await client.nextLine(), payload);
      } else {
        assert.fail(`bad transcript line: ${raw}`);
      }
    }
    const { code, leftover } = await client.end();
    assert.equal(code, 0);
    assert.deepEqual(leftover, []);
  } finally {
    client.kill();
  }
}

for (const name of ["handshake", "malformed", "batch"]) {
  test(`transcript: ${name}`, async () => {
    const transcript = path.join(PROTOCOL_FIXTURES, `${name}.transcript`);
    assert.ok(fs.existsSync(transcript), `missing shared fixture ${transcript}`);
    await runTranscript(transcript);
  });
}

test("batch of 8 requests yields exactly 8 responses before close", async () => {
  const client = new LineClient(["serve", "--model", modelDir]);
  try {
    client.send(JSON.stringify({ proto: 1 }));
    const hello = JSON.parse(await client.nextLine());
    assert.equal(hello.proto, 1);
    assert.equal(typeof hello.name, "string");
    for (let i = 0; i < 8; i++) {
      client.send(JSON.stringify({ id: `b${i}`, text: `request number ${i}` }));
    }
    client.send(JSON.stringify({ end: true }));
    const seen: string[] = [];
    for (let i = 0; i < 8; i++) {
      seen.push(JSON.parse(await client.nextLine()).id);
    }
    assert.deepEqual(seen, ["b0", "b1", "b2", "b3", "b4", "b5", "b6", "b7"]);
    const { code, leftover } = await client.end();
    assert.equal(code, 0);
    assert.deepEqual(leftover, []);
  } finally {
    client.kill();
  }
});

test("unsupported protocol version is refused", async () => {
  const client = new LineClient(["serve", "--model", modelDir]);
  try {
    client.send(JSON.stringify({ proto: 99 }));
    const reply = JSON.parse(await client.nextLine());
    assert.equal(reply.id, null);
    assert.match(reply.error, /protocol/);
    const { code } = await client.end();
    assert.equal(code, 0);
  } finally {
    client.kill();
  }
});
