import { describe, expect, it } from "vitest";

import {
  FORCE_RANGE,
  clampForce,
  parseServerMessage,
  schemaCompatible,
} from "../src/protocol.js";

const telemetry = {
  type: "telemetry",
  schema: 1,
  tick: 4,
  t: 0.04,
  x_meas: [0, 0.75, 0, 0.5],
  x_true: [0, 0.75, 0, 0.5],
  x_a: [0, 0.75, 0, 0.5],
  q_ref: [0.8, 0.8, 0.8, 0.75],
  q_cmd: [0.8, 0.8, 0.8, 0.75],
  q_meas: [0.8, 0.8, 0.8, 0.75],
  min_omega_ref: 21.9,
  min_omega_meas: 21.9,
  pair: "2-3",
  delta_steps: [0, 0, 0, 0],
  ext_pin: 1,
  f_c: [0, 0, 0, 0],
  events: [],
};

describe("parseServerMessage", () => {
  it("accepts a well-formed telemetry frame", () => {
    const parsed = parseServerMessage(JSON.stringify(telemetry));
    expect(parsed?.type).toBe("telemetry");
  });

  it("rejects junk and unknown types", () => {
    expect(parseServerMessage("not json")).toBeNull();
    expect(parseServerMessage('"scalar"')).toBeNull();
    expect(parseServerMessage(JSON.stringify({ type: "mystery" }))).toBeNull();
  });

  it("rejects telemetry with missing vectors", () => {
    const broken: Record<string, unknown> = { ...telemetry };
    delete broken.f_c;
    expect(parseServerMessage(JSON.stringify(broken))).toBeNull();
  });
});

describe("clampForce", () => {
  it("passes in-range values through", () => {
    const { payload, clamped } = clampForce([10, -20, 5, -5]);
    expect(payload).toEqual([10, -20, 5, -5]);
    expect(clamped).toBe(false);
  });

  it("clamps to the sensor measuring range and flags it", () => {
    const { payload, clamped } = clampForce([1000, -99999, 31, -31]);
    expect(payload).toEqual([FORCE_RANGE[0], -FORCE_RANGE[1], 30, -30]);
    expect(clamped).toBe(true);
  });

  it("zeros non-finite input", () => {
    const { payload } = clampForce([NaN, Infinity, 0, 0]);
    expect(payload[0]).toBe(0);
    expect(payload[1]).toBe(0);
  });
});

describe("schemaCompatible", () => {
  it("accepts the current schema and rejects others", () => {
    expect(schemaCompatible({ schema: 1 })).toBe(true);
    expect(schemaCompatible({ schema: 2 })).toBe(false);
    expect(schemaCompatible({})).toBe(true);
  });
});
