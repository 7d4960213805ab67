// Hand-rolled canvas strip charts; no rendering dependencies.

import { SeriesBuffer } from "./buffers.js";

export interface SeriesStyle {
  buffer: SeriesBuffer;
  color: string;
  label: string;
  dashed?: boolean;
}

export interface StripOptions {
  yMin?: number;
  yMax?: number;
  yLabel?: string;
  guideline?: { value: number; color: string; label: string };
  logFloor?: number; // plot max(value, floor) on a log scale when set
}

function yRange(series: SeriesStyle[], opts: StripOptions): [number, number] {
  if (opts.yMin !== undefined && opts.yMax !== undefined) {
    return [opts.yMin, opts.yMax];
  }
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (const v of s.buffer.values()) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (opts.guideline) {
    lo = Math.min(lo, opts.guideline.value);
    hi = Math.max(hi, opts.guideline.value);
  }
  if (!isFinite(lo) || !isFinite(hi)) return [0, 1];
  if (hi - lo < 1e-9) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = 0.08 * (hi - lo);
  return [opts.yMin ?? lo - pad, opts.yMax ?? hi + pad];
}

export function drawStrip(
  canvas: HTMLCanvasElement,
  series: SeriesStyle[],
  opts: StripOptions = {}
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#10151c";
  ctx.fillRect(0, 0, w, h);

  const windows = series
    .filter((s) => s.buffer.length > 1)
    .map((s) => s.buffer.window());
  if (!windows.length) {
    ctx.fillStyle = "#5c6773";
    ctx.font = "12px sans-serif";
    ctx.fillText("waiting for data", 10, h / 2);
    return;
  }
  const tMin = Math.min(...windows.map((v) => v.tMin));
  const tMax = Math.max(...windows.map((v) => v.tMax));
  const [yLo, yHi] = yRange(series, opts);
  const mapY = (v: number) => {
    let value = v;
    let lo = yLo;
    let hi = yHi;
    if (opts.logFloor !== undefined) {
      value = Math.log10(Math.max(v, opts.logFloor));
      lo = Math.log10(Math.max(yLo, opts.logFloor));
      hi = Math.log10(Math.max(yHi, opts.logFloor));
    }
    return h - ((value - lo) / (hi - lo || 1)) * (h - 14) - 7;
  };
  const mapX = (t: number) => ((t - tMin) / (tMax - tMin || 1)) * (w - 8) + 4;

  if (opts.guideline) {
    ctx.strokeStyle = opts.guideline.color;
    ctx.setLineDash([5, 4]);
    ctx.beginPath();
    const gy = mapY(opts.guideline.value);
    ctx.moveTo(0, gy);
    ctx.lineTo(w, gy);
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.fillStyle = opts.guideline.color;
    ctx.font = "10px sans-serif";
    ctx.fillText(opts.guideline.label, w - 70, gy - 3);
  }

  for (const s of series) {
    if (s.buffer.length < 2) continue;
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.4;
    if (s.dashed) ctx.setLineDash([6, 3]);
    ctx.beginPath();
    let first = true;
    s.buffer.forEach((sample) => {
      const x = mapX(sample.t);
      const y = mapY(sample.value);
      if (first) {
        ctx.moveTo(x, y);
        first = false;
      } else {
        ctx.lineTo(x, y);
      }
    });
    ctx.stroke();
    ctx.setLineDash([]);
  }

  ctx.fillStyle = "#8b98a8";
  ctx.font = "10px sans-serif";
  let lx = 8;
  for (const s of series) {
    ctx.fillStyle = s.color;
    ctx.fillText(s.label, lx, 12);
    lx += ctx.measureText(s.label).width + 14;
  }
  if (opts.yLabel) {
    ctx.fillStyle = "#5c6773";
    ctx.fillText(opts.yLabel, 8, h - 4);
  }
}
