// Interest-configuration panel model. Holds the editable copy of the
// session's scoring config and validates edits before they are sent.

import type { DoIConfigDoc } from "./types.js";

export class DoiModel {
  private components: { function: string; weight: number; params: Record<string, number> }[];
  private threshold: number;
  private maxProxies: number;

  constructor(doc: DoIConfigDoc) {
    this.components = doc.components.map((c) => ({
      function: c.function,
      weight: c.weight,
      params: { ...c.params },
    }));
    this.threshold = doc.threshold;
    this.maxProxies = doc.maxProxies;
  }

  functions(): string[] {
    return this.components.map((c) => c.function);
  }

  weight(fn: string): number {
    const c = this.components.find((x) => x.function === fn);
    return c ? c.weight : 0;
  }

  setWeight(fn: string, w: number): void {
    const c = this.components.find((x) => x.function === fn);
    if (!c) throw new Error(`unknown scoring function ${fn}`);
    if (!Number.isFinite(w) || w < 0) throw new Error(`weight must be >= 0, got ${w}`);
    c.weight = w;
  }

  getThreshold(): number {
    return this.threshold;
  }

  setThreshold(v: number): void {
    if (!Number.isFinite(v) || v < 0 || v > 1) {
      throw new Error(`threshold must be in [0, 1], got ${v}`);
    }
    this.threshold = v;
  }

  getMaxProxies(): number {
    return this.maxProxies;
  }

  setMaxProxies(n: number): void {
    if (!Number.isInteger(n) || n < 1) {
      throw new Error(`maxProxies must be a positive integer, got ${n}`);
    }
    this.maxProxies = n;
  }

  totalWeight(): number {
    return this.components.reduce((s, c) => s + c.weight, 0);
  }

  /** Returns an error message, or null when the config can be submitted. */
  validate(): string | null {
    if (this.totalWeight() <= 0) {
      return "at least one scoring weight must be positive";
    }
    return null;
  }

  toDoc(): DoIConfigDoc {
    return {
      components: this.components.map((c) => ({
        function: c.function,
        weight: c.weight,
        params: { ...c.params },
      })),
      threshold: this.threshold,
      maxProxies: this.maxProxies,
    };
  }
}
