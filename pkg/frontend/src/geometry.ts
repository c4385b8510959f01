/**
 * Spherical direction math matching the graph document convention:
 * z up, yaw counterclockwise about z with yaw 0 along +x, pitch toward +z.
 * Equirectangular frames map x to yaw and y to pitch.
 */

export type Vec3 = readonly [number, number, number];

const DEG = Math.PI / 180;

export function normalizeYaw(yawDeg: number): number {
  return ((((yawDeg + 180) % 360) + 360) % 360) - 180;
}

export function dirFromAngles(yawDeg: number, pitchDeg: number): Vec3 {
  const yaw = normalizeYaw(yawDeg) * DEG;
  const pitch = pitchDeg * DEG;
  return [
    Math.cos(pitch) * Math.cos(yaw),
    Math.cos(pitch) * Math.sin(yaw),
    Math.sin(pitch),
  ];
}

export function vectorToAngles(v: Vec3): { yawDeg: number; pitchDeg: number } {
  return {
    yawDeg: normalizeYaw(Math.atan2(v[1], v[0]) / DEG),
    pitchDeg: Math.asin(Math.min(1, Math.max(-1, v[2]))) / DEG,
  };
}

export function angularDistanceDeg(a: Vec3, b: Vec3): number {
  const dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  return Math.acos(Math.min(1, Math.max(-1, dot))) / DEG;
}

/**
 * Containment test in the viewport-local frame (undo center yaw about z,
 * then center pitch about y), correct near the poles.
 */
export function inViewport(
  d: Vec3,
  center: Vec3,
  hFovDeg: number,
  vFovDeg: number,
): boolean {
  const yaw = Math.atan2(center[1], center[0]);
  const pitch = Math.asin(Math.min(1, Math.max(-1, center[2])));
  // rotate d by Rz(-yaw)
  const cz = Math.cos(-yaw);
  const sz = Math.sin(-yaw);
  const x1 = cz * d[0] - sz * d[1];
  const y1 = sz * d[0] + cz * d[1];
  const z1 = d[2];
  // then by Ry(pitch)
  const cy = Math.cos(pitch);
  const sy = Math.sin(pitch);
  const x2 = cy * x1 + sy * z1;
  const z2 = -sy * x1 + cy * z1;
  const localYaw = Math.atan2(y1, x2) / DEG;
  const localPitch = Math.asin(Math.min(1, Math.max(-1, z2))) / DEG;
  return Math.abs(localYaw) <= hFovDeg / 2 && Math.abs(localPitch) <= vFovDeg / 2;
}

/** Slerp-free steering helper: rotate a look direction by yaw/pitch deltas. */
export function steer(d: Vec3, dYawDeg: number, dPitchDeg: number): Vec3 {
  const { yawDeg, pitchDeg } = vectorToAngles(d);
  const pitch = Math.min(90, Math.max(-90, pitchDeg + dPitchDeg));
  return dirFromAngles(yawDeg + dYawDeg, pitch);
}
