// Fixed-depth time-series buffer for the strip charts.

export interface Sample {
  t: number;
  value: number;
}

export class SeriesBuffer {
  private samples: Sample[] = [];

  constructor(readonly depth: number) {
    if (depth < 1) throw new Error("buffer depth must be >= 1");
  }

  push(t: number, value: number): void {
    const last = this.samples[this.samples.length - 1];
    if (last && t < last.t) {
      // Time went backwards: the session was reset; start over.
      this.samples = [];
    }
    this.samples.push({ t, value });
    if (this.samples.length > this.depth) {
      this.samples.splice(0, this.samples.length - this.depth);
    }
  }

  get length(): number {
    return this.samples.length;
  }

  latest(): Sample | undefined {
    return this.samples[this.samples.length - 1];
  }

  window(): { tMin: number; tMax: number } {
    if (!this.samples.length) return { tMin: 0, tMax: 1 };
    return { tMin: this.samples[0].t, tMax: this.samples[this.samples.length - 1].t };
  }

  forEach(fn: (s: Sample, i: number) => void): void {
    this.samples.forEach(fn);
  }

  values(): number[] {
    return this.samples.map((s) => s.value);
  }

  clear(): void {
    this.samples = [];
  }
}
