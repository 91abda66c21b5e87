/**
 * Plane-constrained dragging: a 2D mouse controls a 3D point by moving it in
 * the camera-facing plane through the grab point. Pure math here; the
 * pointer/raycaster wiring lives in scene.ts.
 */

import { Vec3 } from "./protocol";

export function dot(a: Vec3, b: Vec3): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

export function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

export function add(a: Vec3, b: Vec3): Vec3 {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}

export function scale(a: Vec3, s: number): Vec3 {
  return [a[0] * s, a[1] * s, a[2] * s];
}

/**
 * Intersect a pointer ray with the plane through `planePoint` whose normal
 * is `planeNormal` (the camera view direction). Returns null for rays
 * parallel to the plane or hits behind the ray origin.
 */
export function intersectDragPlane(
  rayOrigin: Vec3,
  rayDir: Vec3,
  planePoint: Vec3,
  planeNormal: Vec3,
): Vec3 | null {
  const denom = dot(rayDir, planeNormal);
  if (Math.abs(denom) < 1e-12) return null;
  const t = dot(sub(planePoint, rayOrigin), planeNormal) / denom;
  if (t < 0) return null;
  return add(rayOrigin, scale(rayDir, t));
}
