// Wire protocol shared with the simulator's WebSocket endpoint.
// One JSON object per message; schema-versioned.

export const SCHEMA_VERSION = 1;

export interface TelemetryFrame {
  type: "telemetry";
  schema: number;
  tick: number;
  t: number;
  x_meas: number[]; // (x, z, theta, psi) measured pose
  x_true: number[];
  x_a: number[]; // admittance-adapted reference
  q_ref: number[];
  q_cmd: number[];
  q_meas: number[];
  min_omega_ref: number;
  min_omega_meas: number;
  pair: string;
  delta_steps: number[];
  ext_pin: number;
  f_c: number[]; // (Fx, Fz, My, Mz)
  events: string[];
}

export interface HelloFrame {
  type: "hello";
  schema: number;
  role: "pilot" | "viewer";
  mode: string;
  control_period: number;
  decimation: number;
  omega_limit_deg: number;
}

export interface StatusFrame {
  type: "status";
  schema: number;
  state: "running" | "paused" | "finished";
  tick: number;
  mode: string;
}

export interface ErrorFrame {
  type: "error";
  message: string;
}

export type ServerMessage = TelemetryFrame | HelloFrame | StatusFrame | ErrorFrame;

export interface ForceCommand {
  type: "force";
  payload: [number, number, number, number];
  ts: number;
}

// Sensor measuring range per channel (Fx, Fz, My, Mz); the server clamps
// too, this keeps the UI honest about what it requests.
export const FORCE_RANGE: [number, number, number, number] = [330, 990, 30, 30];

export function clampForce(values: number[]): {
  payload: [number, number, number, number];
  clamped: boolean;
} {
  const payload: [number, number, number, number] = [0, 0, 0, 0];
  let clamped = false;
  for (let i = 0; i < 4; i++) {
    const v = Number.isFinite(values[i]) ? values[i] : 0;
    const limit = FORCE_RANGE[i];
    const c = Math.min(limit, Math.max(-limit, v));
    if (c !== v) clamped = true;
    payload[i] = c;
  }
  return { payload, clamped };
}

export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const message = data as Record<string, unknown>;
  switch (message.type) {
    case "telemetry": {
      if (
        typeof message.tick !== "number" ||
        typeof message.t !== "number" ||
        !Array.isArray(message.x_meas) ||
        !Array.isArray(message.f_c) ||
        !Array.isArray(message.delta_steps)
      ) {
        return null;
      }
      return message as unknown as TelemetryFrame;
    }
    case "hello":
      return message as unknown as HelloFrame;
    case "status":
      return message as unknown as StatusFrame;
    case "error":
      return typeof message.message === "string"
        ? (message as unknown as ErrorFrame)
        : null;
    default:
      return null;
  }
}

export function schemaCompatible(frame: { schema?: number }): boolean {
  return frame.schema === undefined || frame.schema === SCHEMA_VERSION;
}
