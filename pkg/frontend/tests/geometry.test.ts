import { describe, expect, it } from "vitest";

import {
  angularDistanceDeg,
  dirFromAngles,
  inViewport,
  normalizeYaw,
  steer,
  vectorToAngles,
} from "../src/geometry";

describe("direction math", () => {
  it("follows the axis convention", () => {
    expect(dirFromAngles(0, 0)).toEqual([1, 0, 0]);
    const east = dirFromAngles(90, 0);
    expect(east[1]).toBeCloseTo(1, 12);
    const up = dirFromAngles(0, 90);
    expect(up[2]).toBeCloseTo(1, 12);
  });

  it("normalizes yaw into [-180, 180)", () => {
    expect(normalizeYaw(270)).toBe(-90);
    expect(normalizeYaw(180)).toBe(-180);
    expect(normalizeYaw(-450)).toBe(-90);
  });

  it("round-trips angles", () => {
    for (const [yaw, pitch] of [[12, 34], [-120, -45], [179, 89], [-180, 0]] as const) {
      const { yawDeg, pitchDeg } = vectorToAngles(dirFromAngles(yaw, pitch));
      expect(yawDeg).toBeCloseTo(yaw, 9);
      expect(pitchDeg).toBeCloseTo(pitch, 9);
    }
  });

  it("measures angular distance", () => {
    expect(angularDistanceDeg(dirFromAngles(0, 0), dirFromAngles(90, 0))).toBeCloseTo(90, 9);
    expect(angularDistanceDeg(dirFromAngles(0, 0), dirFromAngles(-180, 0))).toBeCloseTo(180, 9);
  });
});

describe("viewport containment", () => {
  const center = dirFromAngles(0, 0);

  it("honors the 120x90 half-widths", () => {
    expect(inViewport(dirFromAngles(59, 0), center, 120, 90)).toBe(true);
    expect(inViewport(dirFromAngles(61, 0), center, 120, 90)).toBe(false);
    expect(inViewport(dirFromAngles(0, 44), center, 120, 90)).toBe(true);
    expect(inViewport(dirFromAngles(0, 46), center, 120, 90)).toBe(false);
  });

  it("accepts everything at full sphere", () => {
    for (const yaw of [-180, -90, 0, 90, 179]) {
      for (const pitch of [-89, 0, 89]) {
        expect(inViewport(dirFromAngles(yaw, pitch), dirFromAngles(30, -20), 360, 180)).toBe(true);
      }
    }
  });

  it("behaves near the pole", () => {
    const polar = dirFromAngles(0, 85);
    for (const yaw of [-180, -90, 0, 90]) {
      expect(inViewport(dirFromAngles(yaw, 80), polar, 120, 90)).toBe(true);
    }
  });

  it("steer clamps pitch", () => {
    const steered = steer(dirFromAngles(0, 80), 0, 30);
    expect(vectorToAngles(steered).pitchDeg).toBeCloseTo(90, 9);
  });
});
