/**
 * Request handling for the classifier wire protocol: one JSON object per
 * line on stdin, one JSON reply per request on stdout, in order.
 *
 *   {"op":"hello"}                          -> {"classes":[...]}
 *   {"op":"fit","examples":[...],"seed":N}  -> {"ok":true}
 *   {"op":"predict","examples":[...]}       -> {"predictions":[...]}
 *
 * Malformed requests get an {"error": ...} reply and the session stays
 * alive; EOF ends the process cleanly.
 */

import { SoftmaxModel, type Example } from "./model.js";

export const DEFAULT_CLASSES = [
  "constant",
  "logn",
  "linear",
  "nlogn",
  "quadratic",
  "cubic",
  "exponential",
];

export class AdapterSession {
  readonly model: SoftmaxModel;
  requestCount = 0;

  constructor(classes: string[] = DEFAULT_CLASSES) {
    this.model = new SoftmaxModel(classes);
  }

  handleLine(line: string): object | null {
    const trimmed = line.trim();
    if (trimmed === "") {
      return null;
    }
    this.requestCount += 1;
    let request: unknown;
    try {
      request = JSON.parse(trimmed);
    } catch {
      return { error: `invalid JSON: ${trimmed.slice(0, 80)}` };
    }
    try {
      return this.handleRequest(request as Record<string, unknown>);
    } catch (err) {
      return { error: err instanceof Error ? err.message : String(err) };
    }
  }

  handleRequest(request: Record<string, unknown>): object {
    switch (request.op) {
      case "hello":
        return { classes: this.model.classes };
      case "fit": {
        const examples = this.examplesOf(request, true);
        this.model.fit(examples);
        return { ok: true };
      }
      case "predict": {
        const examples = this.examplesOf(request, false);
        return {
          predictions: examples.map((ex) => ({
            id: ex.id,
            probs: this.model.predict(ex),
          })),
        };
      }
      default:
        return { error: `unknown op ${JSON.stringify(request.op)}` };
    }
  }

  private examplesOf(
    request: Record<string, unknown>,
    labeled: boolean,
  ): Example[] {
    const raw = request.examples;
    if (!Array.isArray(raw)) {
      throw new Error("request has no examples array");
    }
    return raw.map((e: Record<string, unknown>) => {
      if (
        typeof e.id !== "string" ||
        typeof e.code !== "string" ||
        (e.language !== "python" && e.language !== "java")
      ) {
        throw new Error(`malformed example: ${JSON.stringify(e).slice(0, 80)}`);
      }
      if (labeled && typeof e.label !== "string") {
        throw new Error(`example ${e.id} is missing a label`);
      }
      return e as unknown as Example;
    });
  }
}
