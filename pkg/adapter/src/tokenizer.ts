/**
 * Uncased word-level tokenizer.
 *
 * Text is lowercased and split into word and punctuation tokens; the
 * vocabulary is built from the training corpus by frequency (capped),
 * with [PAD]/[UNK]/[CLS] reserved. Sequences are encoded as [CLS] +
 * token ids, truncated and padded to the configured length.
 */

export const PAD = 0;
export const UNK = 1;
export const CLS = 2;
export const RESERVED = ["[PAD]", "[UNK]", "[CLS]"];

const TOKEN_RE = /[a-z0-9']+|[^\sa-z0-9]/g;

export function tokenize(text: string): string[] {
  return text.toLowerCase().match(TOKEN_RE) ?? [];
}

/** Optional preprocessing: collapse @-mentions to a shared placeholder. */
export function maskHandles(text: string): string {
  return text.replace(/@\w+/g, "@user");
}

export interface Encoded {
  ids: Int32Array;
  length: number; // valid positions including [CLS]
}

export class Tokenizer {
  readonly vocab: string[];
  private readonly index: Map<string, number>;

  constructor(vocab: string[]) {
    this.vocab = vocab;
    this.index = new Map(vocab.map((token, i) => [token, i]));
  }

  static fromCorpus(texts: string[], maxVocab = 8000): Tokenizer {
    const freq = new Map<string, number>();
    for (const text of texts) {
      for (const token of tokenize(text)) {
        freq.set(token, (freq.get(token) ?? 0) + 1);
      }
    }
    const ranked = [...freq.entries()]
      .sort((x, y) => y[1] - x[1] || (x[0] < y[0] ? -1 : 1))
      .slice(0, maxVocab - RESERVED.length)
      .map(([token]) => token);
    return new Tokenizer([...RESERVED, ...ranked]);
  }

  encode(text: string, seqLen: number): Encoded {
    const ids = new Int32Array(seqLen).fill(PAD);
    ids[0] = CLS;
    let position = 1;
    for (const token of tokenize(text)) {
      if (position >= seqLen) break;
      ids[position] = this.index.get(token) ?? UNK;
      position += 1;
    }
    return { ids, length: position };
  }
}
