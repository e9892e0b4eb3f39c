/**
 * Multinomial logistic regression over n-gram count features — the same
 * model family as the primary package's built-in classifier, trained with
 * deterministic full-batch gradient descent. Swap this class out to host a
 * different model behind the same wire protocol.
 */

import { tokenize, type Language } from "./tokenize.js";

export interface Example {
  id: string;
  code: string;
  language: Language;
  label?: string;
}

export interface Hyperparams {
  learningRate: number;
  iterations: number;
  l2: number;
  ngramMax: number;
}

export const DEFAULTS: Hyperparams = {
  learningRate: 0.5,
  iterations: 500,
  l2: 1e-4,
  ngramMax: 2,
};

export class SoftmaxModel {
  readonly classes: string[];
  readonly hp: Hyperparams;
  private vocab = new Map<string, number>();
  private weights: number[][] = [];
  private bias: number[] = [];
  fitted = false;

  constructor(classes: string[], hp: Partial<Hyperparams> = {}) {
    this.classes = classes.slice();
    this.hp = { ...DEFAULTS, ...hp };
    this.weights = classes.map(() => []);
    this.bias = classes.map(() => 0);
  }

  private growVocab(tokenLists: string[][]): void {
    for (const toks of tokenLists) {
      for (const t of toks) {
        if (!this.vocab.has(t)) {
          this.vocab.set(t, this.vocab.size);
        }
      }
    }
    const v = this.vocab.size;
    for (const row of this.weights) {
      while (row.length < v) {
        row.push(0);
      }
    }
  }

  private featurize(tokenLists: string[][]): number[][] {
    const v = this.vocab.size;
    return tokenLists.map((toks) => {
      const x = new Array<number>(v).fill(0);
      for (const t of toks) {
        const j = this.vocab.get(t);
        if (j !== undefined) {
          x[j] += 1;
        }
      }
      const norm = Math.sqrt(x.reduce((acc, val) => acc + val * val, 0)) || 1;
      return x.map((val) => val / norm);
    });
  }

  private logitsOf(x: number[]): number[] {
    return this.weights.map((row, c) => {
      let z = this.bias[c];
      for (let j = 0; j < x.length; j++) {
        z += row[j] * x[j];
      }
      return z;
    });
  }

  private softmax(logits: number[]): number[] {
    const top = Math.max(...logits);
    const exp = logits.map((z) => Math.exp(z - top));
    const total = exp.reduce((a, b) => a + b, 0);
    return exp.map((e) => e / total);
  }

  fit(examples: Example[]): void {
    if (examples.length === 0) {
      throw new Error("cannot fit on an empty labeled set");
    }
    const y = examples.map((ex) => {
      const idx = this.classes.indexOf(ex.label ?? "");
      if (idx < 0) {
        throw new Error(`label ${ex.label} outside the class set`);
      }
      return idx;
    });
    const tokenLists = examples.map((ex) =>
      tokenize(ex.code, ex.language, this.hp.ngramMax),
    );
    this.growVocab(tokenLists);
    const xs = this.featurize(tokenLists);
    const n = xs.length;
    const v = this.vocab.size;
    const c = this.classes.length;

    for (let iter = 0; iter < this.hp.iterations; iter++) {
      const gradW = this.weights.map((row) =>
        row.map((w) => this.hp.l2 * w),
      );
      const gradB = new Array<number>(c).fill(0);
      for (let i = 0; i < n; i++) {
        const probs = this.softmax(this.logitsOf(xs[i]));
        for (let k = 0; k < c; k++) {
          const delta = (probs[k] - (k === y[i] ? 1 : 0)) / n;
          gradB[k] += delta;
          const row = gradW[k];
          const xi = xs[i];
          for (let j = 0; j < v; j++) {
            row[j] += delta * xi[j];
          }
        }
      }
      for (let k = 0; k < c; k++) {
        this.bias[k] -= this.hp.learningRate * gradB[k];
        const wRow = this.weights[k];
        const gRow = gradW[k];
        for (let j = 0; j < v; j++) {
          wRow[j] -= this.hp.learningRate * gRow[j];
        }
      }
    }
    this.fitted = true;
  }

  /** Uniform before any fit, per the adapter contract. */
  predict(example: Example): Record<string, number> {
    const probs: Record<string, number> = {};
    if (!this.fitted) {
      for (const name of this.classes) {
        probs[name] = 1 / this.classes.length;
      }
      return probs;
    }
    const toks = tokenize(example.code, example.language, this.hp.ngramMax);
    const [x] = this.featurize([toks]);
    const p = this.softmax(this.logitsOf(x));
    this.classes.forEach((name, i) => {
      probs[name] = p[i];
    });
    return probs;
  }
}
