// Outgoing command flow: slider values become clamped force commands, at
// most one per animation frame, with an optional release-to-zero latch.

import { ForceCommand, clampForce } from "./protocol.js";

export class ForceCommander {
  private pending: [number, number, number, number] | null = null;
  private lastSent: [number, number, number, number] = [0, 0, 0, 0];
  lastClamped = false;

  constructor(private readonly now: () => number = () => Date.now()) {}

  // Called on every slider input event (any rate).
  update(values: number[]): void {
    const { payload, clamped } = clampForce(values);
    this.lastClamped = clamped;
    this.pending = payload;
  }

  releaseToZero(): void {
    this.pending = [0, 0, 0, 0];
  }

  // Called once per animation frame; yields at most one command, and none
  // when the requested force has not changed.
  flush(): ForceCommand | null {
    if (this.pending === null) return null;
    const payload = this.pending;
    this.pending = null;
    if (payload.every((v, i) => v === this.lastSent[i])) return null;
    this.lastSent = payload;
    return {
      type: "force",
      payload: [...payload] as [number, number, number, number],
      ts: this.now(),
    };
  }
}
