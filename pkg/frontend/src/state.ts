// Session state: everything the dashboard renders is derived from the
// frames received here; the client never simulates anything itself.

import { SeriesBuffer } from "./buffers.js";
import {
  HelloFrame,
  ServerMessage,
  TelemetryFrame,
  schemaCompatible,
} from "./protocol.js";

export type Connection = "connecting" | "live" | "stale" | "closed";

export class SessionView {
  connection: Connection = "connecting";
  hello: HelloFrame | null = null;
  latest: TelemetryFrame | null = null;
  schemaMismatch = false;
  breachAlarm = false; // persists once seen
  lastError: string | null = null;
  paused = false;

  readonly poseZ: SeriesBuffer;
  readonly minOmegaRef: SeriesBuffer;
  readonly minOmegaMeas: SeriesBuffer;
  readonly deltaSteps: SeriesBuffer[];
  readonly forces: SeriesBuffer[];

  constructor(depth = 600) {
    this.poseZ = new SeriesBuffer(depth);
    this.minOmegaRef = new SeriesBuffer(depth);
    this.minOmegaMeas = new SeriesBuffer(depth);
    this.deltaSteps = [0, 1, 2, 3].map(() => new SeriesBuffer(depth));
    this.forces = [0, 1, 2, 3].map(() => new SeriesBuffer(depth));
  }

  get avoidanceActive(): boolean {
    return this.latest !== null && this.latest.ext_pin === 0;
  }

  get omegaLimit(): number {
    return this.hello?.omega_limit_deg ?? 2.0;
  }

  apply(message: ServerMessage): void {
    switch (message.type) {
      case "hello":
        if (!schemaCompatible(message)) {
          this.schemaMismatch = true;
          break;
        }
        this.hello = message;
        this.connection = "live";
        break;
      case "telemetry":
        if (this.schemaMismatch) break; // banner up: stop rendering frames
        if (!schemaCompatible(message)) {
          this.schemaMismatch = true;
          break;
        }
        this.ingest(message);
        break;
      case "status":
        this.paused = message.state === "paused";
        break;
      case "error":
        this.lastError = message.message;
        break;
    }
  }

  private ingest(frame: TelemetryFrame): void {
    this.latest = frame;
    this.connection = "live";
    this.poseZ.push(frame.t, frame.x_meas[1]);
    this.minOmegaRef.push(frame.t, frame.min_omega_ref);
    this.minOmegaMeas.push(frame.t, frame.min_omega_meas);
    frame.delta_steps.forEach((v, i) => this.deltaSteps[i]?.push(frame.t, v));
    frame.f_c.forEach((v, i) => this.forces[i]?.push(frame.t, v));
    if (frame.events.includes("breach") || frame.events.includes("fault")) {
      this.breachAlarm = true;
    }
  }

  markStale(): void {
    if (this.connection === "live") this.connection = "stale";
  }

  markClosed(): void {
    this.connection = "closed";
  }

  resetBuffers(): void {
    this.poseZ.clear();
    this.minOmegaRef.clear();
    this.minOmegaMeas.clear();
    this.deltaSteps.forEach((b) => b.clear());
    this.forces.forEach((b) => b.clear());
    this.breachAlarm = false;
    this.latest = null;
  }
}
