/**
 * Message vocabulary of the retargeting session service.
 *
 * One JSON document per WebSocket text frame. The server opens with a full
 * model document; every client `frame` is answered by a `state`.
 */

export type Vec3 = [number, number, number];

export interface ModelJoint {
  name: string;
  parent: string;
  child: string;
  axis: Vec3;
  origin_xyz: Vec3;
  origin_rpy: Vec3;
  limit: { lower: number; upper: number };
}

export interface ModelCapsule {
  link: string;
  a: Vec3;
  b: Vec3;
  radius: number;
}

export interface ModelKeypoint {
  id: number;
  link: string;
  offset: Vec3;
}

export interface ModelMessage {
  type: "model";
  links: string[];
  joints: ModelJoint[];
  capsules: ModelCapsule[];
  keypoints: ModelKeypoint[];
  collision_pairs: [number, number][];
}

export interface PairClearance {
  pair: [number, number];
  h: number;
  active: boolean;
}

export interface StateMessage {
  type: "state";
  q: number[];
  h: PairClearance[];
  kp_robot: Vec3[];
  latency_s: number;
  qp_status: string;
}

export interface ErrorMessage {
  type: "error";
  msg: string;
}

export type ServerMessage = ModelMessage | StateMessage | ErrorMessage;

export interface FrameMessage {
  type: "frame";
  t: number;
  kp: Vec3[];
}

/** Partial parameter update; field names mirror the server's parameter set. */
export interface ParamsMessage {
  type: "params";
  alpha?: number;
  beta?: number;
  cbf_enabled?: boolean;
  gamma?: number;
  safety_threshold?: number;
  activation_distance?: number;
  keypoint_scale?: number;
}

export type ClientMessage = FrameMessage | ParamsMessage | { type: "reset" };

/** Parse one incoming document; null for anything that is not a known message. */
export function parseServerMessage(raw: string): ServerMessage | null {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof doc !== "object" || doc === null || !("type" in doc)) return null;
  const msg = doc as { type: unknown };
  if (msg.type === "model") {
    const m = doc as ModelMessage;
    return Array.isArray(m.links) && Array.isArray(m.capsules) ? m : null;
  }
  if (msg.type === "state") {
    const s = doc as StateMessage;
    return Array.isArray(s.q) && Array.isArray(s.h) && Array.isArray(s.kp_robot)
      ? s
      : null;
  }
  if (msg.type === "error") {
    const e = doc as ErrorMessage;
    return typeof e.msg === "string" ? e : null;
  }
  return null;
}

export function encodeFrame(t: number, keypoints: Vec3[]): string {
  return JSON.stringify({ type: "frame", t, kp: keypoints } satisfies FrameMessage);
}

export function encodeParams(fields: Omit<ParamsMessage, "type">): string {
  return JSON.stringify({ type: "params", ...fields } satisfies ParamsMessage);
}

export function encodeReset(): string {
  return JSON.stringify({ type: "reset" });
}
