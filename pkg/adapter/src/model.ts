/**
 * Compact uncased transformer classifier with hand-derived backprop.
 *
 * Architecture: token embedding + fixed sinusoidal positions, one
 * single-head self-attention block and one ReLU feed-forward block
 * (both residual), classification head on the [CLS] position, softmax
 * cross-entropy loss. Optimized with Adam under linear learning-rate
 * warmup. Everything is deterministic given the seeds.
 *
 * Matrices are stored row-major in flat Float64Arrays.
 */

import { Rng } from "./rng";
import { Tokenizer } from "./tokenizer";

export const LABELS = ["NOT", "OFF"] as const;
export type Label = (typeof LABELS)[number];

export interface TrainingConfig {
  epochs: number;
  warmup_steps: number;
  batch_size: number;
  learning_rate: number;
  max_sequence_length: number;
  adam_epsilon: number;
  seed: number;
}

export const DEFAULT_CONFIG: TrainingConfig = {
  epochs: 10,
  warmup_steps: 1000,
  batch_size: 8,
  learning_rate: 2.0e-5,
  max_sequence_length: 64,
  adam_epsilon: 1.0e-8,
  seed: 0,
};

export const MODEL_DIM = 32;
export const FF_DIM = 64;
const BASE_INIT_SEED = 0x5eed_ba5e; // fixed: the "base model" state is not data-dependent

export interface Weights {
  embed: Float64Array; // vocab x d
  wq: Float64Array; // d x d
  wk: Float64Array;
  wv: Float64Array;
  wo: Float64Array;
  w1: Float64Array; // d x f
  b1: Float64Array; // f
  w2: Float64Array; // f x d
  b2: Float64Array; // d
  wc: Float64Array; // d x 2
  bc: Float64Array; // 2
}

const PARAM_NAMES: (keyof Weights)[] = [
  "embed", "wq", "wk", "wv", "wo", "w1", "b1", "w2", "b2", "wc", "bc",
];

function zerosLike(weights: Weights): Weights {
  const out = {} as Weights;
  for (const name of PARAM_NAMES) {
    out[name] = new Float64Array(weights[name].length);
  }
  return out;
}

export function initWeights(vocabSize: number, d = MODEL_DIM, f = FF_DIM): Weights {
  const rng = new Rng(BASE_INIT_SEED ^ vocabSize);
  const init = (n: number, scale: number) => {
    const array = new Float64Array(n);
    for (let i = 0; i < n; i++) array[i] = rng.uniform(-scale, scale);
    return array;
  };
  return {
    embed: init(vocabSize * d, 0.05),
    wq: init(d * d, 1 / Math.sqrt(d)),
    wk: init(d * d, 1 / Math.sqrt(d)),
    wv: init(d * d, 1 / Math.sqrt(d)),
    wo: init(d * d, 1 / Math.sqrt(d)),
    w1: init(d * f, 1 / Math.sqrt(d)),
    b1: new Float64Array(f),
    w2: init(f * d, 1 / Math.sqrt(f)),
    b2: new Float64Array(d),
    wc: init(d * 2, 1 / Math.sqrt(d)),
    bc: new Float64Array(2),
  };
}

export function sinusoidalPositions(seqLen: number, d = MODEL_DIM): Float64Array {
  const pos = new Float64Array(seqLen * d);
  for (let i = 0; i < seqLen; i++) {
    for (let j = 0; j < d; j += 2) {
      const angle = i / Math.pow(10000, j / d);
      pos[i * d + j] = Math.sin(angle);
      if (j + 1 < d) pos[i * d + j + 1] = Math.cos(angle);
    }
  }
  return pos;
}

interface ForwardState {
  n: number; // valid positions
  x0: Float64Array; // L x d inputs
  q: Float64Array;
  k: Float64Array;
  v: Float64Array;
  attnWeights: Float64Array; // L x L softmax rows
  attnContext: Float64Array; // L x d (A V)
  x1: Float64Array; // post-attention residual
  ffPre: Float64Array; // L x f pre-ReLU
  ffAct: Float64Array; // L x f post-ReLU
  cls: Float64Array; // d
  probs: [number, number];
}

export class Model {
  readonly d = MODEL_DIM;
  readonly f = FF_DIM;
  readonly seqLen: number;
  readonly pos: Float64Array;

  constructor(
    readonly tokenizer: Tokenizer,
    readonly weights: Weights,
    seqLen: number,
  ) {
    this.seqLen = seqLen;
    this.pos = sinusoidalPositions(seqLen);
  }

  static fresh(tokenizer: Tokenizer, seqLen: number): Model {
    return new Model(tokenizer, initWeights(tokenizer.vocab.length), seqLen);
  }

  forward(ids: Int32Array, n: number): ForwardState {
    const { d, f } = this;
    const w = this.weights;
    const L = n; // computation restricted to valid positions
    const x0 = new Float64Array(L * d);
    for (let i = 0; i < L; i++) {
      const base = ids[i] * d;
      for (let j = 0; j < d; j++) {
        x0[i * d + j] = w.embed[base + j] + this.pos[i * d + j];
      }
    }

    const q = matmul(x0, w.wq, L, d, d);
    const k = matmul(x0, w.wk, L, d, d);
    const v = matmul(x0, w.wv, L, d, d);

    const scale = 1 / Math.sqrt(d);
    const attnWeights = new Float64Array(L * L);
    for (let i = 0; i < L; i++) {
      let max = -Infinity;
      const scores = new Float64Array(L);
      for (let j = 0; j < L; j++) {
        let dot = 0;
        for (let m = 0; m < d; m++) dot += q[i * d + m] * k[j * d + m];
        scores[j] = dot * scale;
        if (scores[j] > max) max = scores[j];
      }
      let sum = 0;
      for (let j = 0; j < L; j++) {
        scores[j] = Math.exp(scores[j] - max);
        sum += scores[j];
      }
      for (let j = 0; j < L; j++) attnWeights[i * L + j] = scores[j] / sum;
    }

    const attnContext = matmul(attnWeights, v, L, L, d);
    const attnOut = matmul(attnContext, w.wo, L, d, d);
    const x1 = new Float64Array(L * d);
    for (let i = 0; i < L * d; i++) x1[i] = x0[i] + attnOut[i];

    const ffPre = new Float64Array(L * f);
    for (let i = 0; i < L; i++) {
      for (let j = 0; j < f; j++) {
        let acc = w.b1[j];
        for (let m = 0; m < d; m++) acc += x1[i * d + m] * w.w1[m * f + j];
        ffPre[i * f + j] = acc;
      }
    }
    const ffAct = new Float64Array(L * f);
    for (let i = 0; i < L * f; i++) ffAct[i] = ffPre[i] > 0 ? ffPre[i] : 0;

    const x2 = new Float64Array(L * d);
    for (let i = 0; i < L; i++) {
      for (let j = 0; j < d; j++) {
        let acc = w.b2[j];
        for (let m = 0; m < f; m++) acc += ffAct[i * f + m] * w.w2[m * d + j];
        x2[i * d + j] = x1[i * d + j] + acc;
      }
    }

    const cls = x2.slice(0, d);
    const logits = [w.bc[0], w.bc[1]];
    for (let m = 0; m < d; m++) {
      logits[0] += cls[m] * w.wc[m * 2];
      logits[1] += cls[m] * w.wc[m * 2 + 1];
    }
    const peak = Math.max(logits[0], logits[1]);
    const e0 = Math.exp(logits[0] - peak);
    const e1 = Math.exp(logits[1] - peak);
    const probs: [number, number] = [e0 / (e0 + e1), e1 / (e0 + e1)];

    return { n, x0, q, k, v, attnWeights, attnContext, x1, ffPre, ffAct, cls, probs };
  }

  /** Probability that the text is offensive. */
  scoreOff(text: string): number {
    const { ids, length } = this.tokenizer.encode(text, this.seqLen);
    return this.forward(ids, length).probs[1];
  }

  /**
   * Accumulate the cross-entropy gradient of one example into grads.
   * Returns the example loss.
   */
  backward(ids: Int32Array, state: ForwardState, target: 0 | 1, grads: Weights): number {
    const { d, f } = this;
    const w = this.weights;
    const L = state.n;
    const loss = -Math.log(Math.max(state.probs[target], 1e-12));

    const dlogits = [state.probs[0], state.probs[1]];
    dlogits[target] -= 1;

    const dcls = new Float64Array(d);
    for (let m = 0; m < d; m++) {
      grads.wc[m * 2] += state.cls[m] * dlogits[0];
      grads.wc[m * 2 + 1] += state.cls[m] * dlogits[1];
      dcls[m] = w.wc[m * 2] * dlogits[0] + w.wc[m * 2 + 1] * dlogits[1];
    }
    grads.bc[0] += dlogits[0];
    grads.bc[1] += dlogits[1];

    // x2 = x1 + ffAct w2 + b2; gradient flows only through the CLS row
    const dx2 = new Float64Array(L * d);
    dx2.set(dcls, 0);

    const dffAct = new Float64Array(L * f);
    for (let i = 0; i < L; i++) {
      for (let j = 0; j < d; j++) {
        const g = dx2[i * d + j];
        if (g === 0) continue;
        grads.b2[j] += g;
        for (let m = 0; m < f; m++) {
          grads.w2[m * d + j] += state.ffAct[i * f + m] * g;
          dffAct[i * f + m] += w.w2[m * d + j] * g;
        }
      }
    }

    const dx1 = new Float64Array(dx2); // residual branch
    for (let i = 0; i < L; i++) {
      for (let j = 0; j < f; j++) {
        const g = state.ffPre[i * f + j] > 0 ? dffAct[i * f + j] : 0;
        if (g === 0) continue;
        grads.b1[j] += g;
        for (let m = 0; m < d; m++) {
          grads.w1[m * f + j] += state.x1[i * d + m] * g;
          dx1[i * d + m] += w.w1[m * f + j] * g;
        }
      }
    }

    // x1 = x0 + (A v) wo
    const dx0 = new Float64Array(dx1); // residual branch
    const dctx = new Float64Array(L * d);
    for (let i = 0; i < L; i++) {
      for (let j = 0; j < d; j++) {
        const g = dx1[i * d + j];
        if (g === 0) continue;
        for (let m = 0; m < d; m++) {
          grads.wo[m * d + j] += state.attnContext[i * d + m] * g;
          dctx[i * d + m] += w.wo[m * d + j] * g;
        }
      }
    }

    // ctx = A v
    const dA = new Float64Array(L * L);
    const dv = new Float64Array(L * d);
    for (let i = 0; i < L; i++) {
      for (let m = 0; m < d; m++) {
        const g = dctx[i * d + m];
        if (g === 0) continue;
        for (let j = 0; j < L; j++) {
          dA[i * L + j] += state.v[j * d + m] * g;
          dv[j * d + m] += state.attnWeights[i * L + j] * g;
        }
      }
    }

    // softmax rows: dS = A o (dA - rowdot(dA, A))
    const scale = 1 / Math.sqrt(d);
    const dq = new Float64Array(L * d);
    const dk = new Float64Array(L * d);
    for (let i = 0; i < L; i++) {
      let rowDot = 0;
      for (let j = 0; j < L; j++) {
        rowDot += dA[i * L + j] * state.attnWeights[i * L + j];
      }
      for (let j = 0; j < L; j++) {
        const ds = state.attnWeights[i * L + j] * (dA[i * L + j] - rowDot) * scale;
        if (ds === 0) continue;
        for (let m = 0; m < d; m++) {
          dq[i * d + m] += ds * state.k[j * d + m];
          dk[j * d + m] += ds * state.q[i * d + m];
        }
      }
    }

    // q/k/v = x0 w[qkv]
    accumulateLinear(state.x0, dq, w.wq, grads.wq, dx0, L, d, d);
    accumulateLinear(state.x0, dk, w.wk, grads.wk, dx0, L, d, d);
    accumulateLinear(state.x0, dv, w.wv, grads.wv, dx0, L, d, d);

    for (let i = 0; i < L; i++) {
      const base = ids[i] * d;
      for (let m = 0; m < d; m++) grads.embed[base + m] += dx0[i * d + m];
    }
    return loss;
  }
}

/** out = a (rows x inner) * b (inner x cols), row-major. */
function matmul(
  a: Float64Array, b: Float64Array, rows: number, inner: number, cols: number,
): Float64Array {
  const out = new Float64Array(rows * cols);
  for (let i = 0; i < rows; i++) {
    for (let m = 0; m < inner; m++) {
      const av = a[i * inner + m];
      if (av === 0) continue;
      for (let j = 0; j < cols; j++) {
        out[i * cols + j] += av * b[m * cols + j];
      }
    }
  }
  return out;
}

/** For y = x W: add x^T dy into gradW and dy W^T into dx. */
function accumulateLinear(
  x: Float64Array, dy: Float64Array, w: Float64Array, gradW: Float64Array,
  dx: Float64Array, rows: number, inner: number, cols: number,
): void {
  for (let i = 0; i < rows; i++) {
    for (let j = 0; j < cols; j++) {
      const g = dy[i * cols + j];
      if (g === 0) continue;
      for (let m = 0; m < inner; m++) {
        gradW[m * cols + j] += x[i * inner + m] * g;
        dx[i * inner + m] += w[m * cols + j] * g;
      }
    }
  }
}

export interface TrainStep {
  step: number;
  loss: number;
}

export interface Example {
  text: string;
  label: Label;
}

/** Adam with linear learning-rate warmup; beta1/beta2 fixed at 0.9/0.999. */
class Adam {
  private readonly m: Weights;
  private readonly v: Weights;
  private t = 0;

  constructor(
    private readonly weights: Weights,
    private readonly lr: number,
    private readonly warmup: number,
    private readonly eps: number,
  ) {
    this.m = zerosLike(weights);
    this.v = zerosLike(weights);
  }

  step(grads: Weights): void {
    this.t += 1;
    const lrT = this.warmup > 0 ? this.lr * Math.min(1, this.t / this.warmup) : this.lr;
    const c1 = 1 - Math.pow(0.9, this.t);
    const c2 = 1 - Math.pow(0.999, this.t);
    for (const name of PARAM_NAMES) {
      const p = this.weights[name];
      const g = grads[name];
      const m = this.m[name];
      const v = this.v[name];
      for (let i = 0; i < p.length; i++) {
        m[i] = 0.9 * m[i] + 0.1 * g[i];
        v[i] = 0.999 * v[i] + 0.001 * g[i] * g[i];
        p[i] -= (lrT * (m[i] / c1)) / (Math.sqrt(v[i] / c2) + this.eps);
      }
    }
  }
}

/** Mini-batch training loop; returns the per-step mean losses. */
export function train(model: Model, examples: Example[], config: TrainingConfig): TrainStep[] {
  const encoded = examples.map((ex) => ({
    ...model.tokenizer.encode(ex.text, model.seqLen),
    target: (ex.label === "OFF" ? 1 : 0) as 0 | 1,
  }));
  const optimizer = new Adam(
    model.weights, config.learning_rate, config.warmup_steps, config.adam_epsilon,
  );
  const shuffleRng = new Rng(config.seed >>> 0 || 1);
  const order = encoded.map((_, i) => i);
  const steps: TrainStep[] = [];
  let step = 0;
  for (let epoch = 0; epoch < config.epochs; epoch++) {
    shuffleRng.shuffle(order);
    for (let start = 0; start < order.length; start += config.batch_size) {
      const batch = order.slice(start, start + config.batch_size);
      const grads = zerosLike(model.weights);
      let batchLoss = 0;
      for (const index of batch) {
        const { ids, length, target } = encoded[index];
        const state = model.forward(ids, length);
        batchLoss += model.backward(ids, state, target, grads);
      }
      for (const name of PARAM_NAMES) {
        const g = grads[name];
        for (let i = 0; i < g.length; i++) g[i] /= batch.length;
      }
      optimizer.step(grads);
      step += 1;
      steps.push({ step, loss: batchLoss / batch.length });
    }
  }
  return steps;
}
