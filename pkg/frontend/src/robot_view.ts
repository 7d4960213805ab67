// Side-elevation schematic (fixed-frame x to the right, z up): platform
// origin trace, platform bar with its orientation angles, and the central
// strut from the base.  Everything drawn comes from the latest frame.

import { TelemetryFrame } from "./protocol.js";

export interface RobotViewOptions {
  xSpan?: number; // metres of world x mapped across the canvas
  zMin?: number;
  zMax?: number;
}

export function drawRobotView(
  canvas: HTMLCanvasElement,
  frame: TelemetryFrame | null,
  avoidanceActive: boolean,
  breach: boolean,
  opts: RobotViewOptions = {}
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width: w, height: h } = canvas;
  const xSpan = opts.xSpan ?? 0.7;
  const zMin = opts.zMin ?? 0.0;
  const zMax = opts.zMax ?? 1.0;

  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#10151c";
  ctx.fillRect(0, 0, w, h);

  const mapX = (x: number) => w / 2 + (x / xSpan) * w;
  const mapZ = (z: number) => h - ((z - zMin) / (zMax - zMin)) * (h - 20) - 10;

  // Base line.
  ctx.strokeStyle = "#3b4754";
  ctx.lineWidth = 3;
  ctx.beginPath();
  ctx.moveTo(mapX(-0.32), mapZ(0));
  ctx.lineTo(mapX(0.32), mapZ(0));
  ctx.stroke();

  if (!frame) {
    ctx.fillStyle = "#5c6773";
    ctx.font = "12px sans-serif";
    ctx.fillText("no pose yet", 12, h / 2);
    return;
  }

  const [x, z, theta, psi] = frame.x_meas;

  // Central strut from the base origin to the platform origin.
  ctx.strokeStyle = "#55657a";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(mapX(0), mapZ(0));
  ctx.lineTo(mapX(x), mapZ(z));
  ctx.stroke();

  // Platform bar: the x_m axis of the mobile platform projected on the
  // elevation plane (rotation about y by theta).
  const half = 0.2;
  const dx = half * Math.cos(theta);
  const dz = half * Math.sin(-theta);
  ctx.strokeStyle = breach ? "#ff5566" : avoidanceActive ? "#ffb347" : "#69d2e7";
  ctx.lineWidth = 5;
  ctx.beginPath();
  ctx.moveTo(mapX(x - dx), mapZ(z - dz));
  ctx.lineTo(mapX(x + dx), mapZ(z + dz));
  ctx.stroke();

  // Platform origin.
  ctx.fillStyle = "#e8eef4";
  ctx.beginPath();
  ctx.arc(mapX(x), mapZ(z), 4, 0, 2 * Math.PI);
  ctx.fill();

  // Orientation dial for psi (rotation about the platform z axis).
  const cx = w - 46;
  const cy = 46;
  ctx.strokeStyle = "#3b4754";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.arc(cx, cy, 26, 0, 2 * Math.PI);
  ctx.stroke();
  ctx.strokeStyle = "#ffb347";
  ctx.beginPath();
  ctx.moveTo(cx, cy);
  ctx.lineTo(cx + 24 * Math.sin(psi), cy - 24 * Math.cos(psi));
  ctx.stroke();
  ctx.fillStyle = "#8b98a8";
  ctx.font = "10px sans-serif";
  ctx.fillText("psi", cx - 8, cy + 38);

  ctx.fillStyle = "#8b98a8";
  ctx.font = "11px sans-serif";
  ctx.fillText(
    `x=${x.toFixed(3)} m  z=${z.toFixed(3)} m  theta=${((theta * 180) / Math.PI).toFixed(1)}°  psi=${((psi * 180) / Math.PI).toFixed(1)}°`,
    10,
    h - 8
  );
}
