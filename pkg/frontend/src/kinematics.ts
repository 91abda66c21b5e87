/**
 * Minimal forward kinematics over the model document, for rendering only:
 * enough to place each link's capsules and keypoints at a configuration.
 */

import { ModelMessage, Vec3 } from "./protocol";

export interface Pose {
  r: number[]; // 3x3 rotation, row-major
  t: Vec3;
}

const I3 = [1, 0, 0, 0, 1, 0, 0, 0, 1];

export function matMul(a: number[], b: number[]): number[] {
  const out = new Array<number>(9);
  for (let i = 0; i < 3; i++) {
    for (let j = 0; j < 3; j++) {
      out[3 * i + j] =
        a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] + a[3 * i + 2] * b[6 + j];
    }
  }
  return out;
}

export function matVec(a: number[], v: Vec3): Vec3 {
  return [
    a[0] * v[0] + a[1] * v[1] + a[2] * v[2],
    a[3] * v[0] + a[4] * v[1] + a[5] * v[2],
    a[6] * v[0] + a[7] * v[1] + a[8] * v[2],
  ];
}

export function rpyMatrix(rpy: Vec3): number[] {
  const [r, p, y] = rpy;
  const cr = Math.cos(r), sr = Math.sin(r);
  const cp = Math.cos(p), sp = Math.sin(p);
  const cy = Math.cos(y), sy = Math.sin(y);
  const rx = [1, 0, 0, 0, cr, -sr, 0, sr, cr];
  const ry = [cp, 0, sp, 0, 1, 0, -sp, 0, cp];
  const rz = [cy, -sy, 0, sy, cy, 0, 0, 0, 1];
  return matMul(rz, matMul(ry, rx));
}

export function axisAngleMatrix(axis: Vec3, angle: number): number[] {
  const [x, y, z] = axis;
  const c = Math.cos(angle), s = Math.sin(angle), t = 1 - c;
  return [
    t * x * x + c, t * x * y - s * z, t * x * z + s * y,
    t * x * y + s * z, t * y * y + c, t * y * z - s * x,
    t * x * z - s * y, t * y * z + s * x, t * z * z + c,
  ];
}

export function baseLink(model: ModelMessage): string {
  const children = new Set(model.joints.map((j) => j.child));
  const roots = model.links.filter((l) => !children.has(l));
  if (roots.length !== 1) throw new Error(`expected one root link, got ${roots}`);
  return roots[0];
}

/** Link poses at configuration q (joint order = document order). */
export function forwardKinematics(
  model: ModelMessage,
  q: number[],
): Map<string, Pose> {
  const poses = new Map<string, Pose>();
  poses.set(baseLink(model), { r: [...I3], t: [0, 0, 0] });
  // document order may interleave branches; sweep until all links resolve
  const pending = [...model.joints.keys()];
  while (pending.length > 0) {
    const before = pending.length;
    for (let k = pending.length - 1; k >= 0; k--) {
      const j = model.joints[pending[k]];
      const parent = poses.get(j.parent);
      if (!parent) continue;
      const rPre = matMul(parent.r, rpyMatrix(j.origin_rpy));
      const tPre = add3(matVec(parent.r, j.origin_xyz), parent.t);
      poses.set(j.child, {
        r: matMul(rPre, axisAngleMatrix(j.axis, q[pending[k]])),
        t: tPre,
      });
      pending.splice(k, 1);
    }
    if (pending.length === before) throw new Error("disconnected joint graph");
  }
  return poses;
}

export function transform(pose: Pose, local: Vec3): Vec3 {
  return add3(matVec(pose.r, local), pose.t);
}

export function clampConfiguration(model: ModelMessage, q: number[]): number[] {
  return model.joints.map((j, k) =>
    Math.min(Math.max(q[k] ?? 0, j.limit.lower), j.limit.upper),
  );
}

function add3(a: Vec3, b: Vec3): Vec3 {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}
