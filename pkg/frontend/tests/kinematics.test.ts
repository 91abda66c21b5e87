import { describe, expect, it } from "vitest";

import {
  clampConfiguration,
  forwardKinematics,
  transform,
} from "../src/kinematics";
import { intersectDragPlane } from "../src/drag";
import { ModelMessage } from "../src/protocol";

const MODEL: ModelMessage = {
  type: "model",
  links: ["base", "arm"],
  joints: [
    {
      name: "j0",
      parent: "base",
      child: "arm",
      axis: [0, 0, 1],
      origin_xyz: [0.1, 0, 0],
      origin_rpy: [0, 0, 0],
      limit: { lower: -3, upper: 3 },
    },
  ],
  capsules: [],
  keypoints: [{ id: 1, link: "arm", offset: [0.2, 0, 0] }],
  collision_pairs: [],
};

describe("forwardKinematics", () => {
  it("composes origins at zero configuration", () => {
    const poses = forwardKinematics(MODEL, [0]);
    const p = transform(poses.get("arm")!, [0.2, 0, 0]);
    expect(p[0]).toBeCloseTo(0.3, 12);
    expect(p[1]).toBeCloseTo(0.0, 12);
  });

  it("rotates a quarter turn about z", () => {
    const poses = forwardKinematics(MODEL, [Math.PI / 2]);
    const p = transform(poses.get("arm")!, [0.2, 0, 0]);
    expect(p[0]).toBeCloseTo(0.1, 12);
    expect(p[1]).toBeCloseTo(0.2, 12);
    expect(p[2]).toBeCloseTo(0.0, 12);
  });

  it("resolves joints in any document order", () => {
    const shuffled: ModelMessage = {
      ...MODEL,
      links: ["base", "mid", "tip"],
      joints: [
        // child joint listed before its parent's joint
        {
          name: "j1", parent: "mid", child: "tip", axis: [0, 0, 1],
          origin_xyz: [0.1, 0, 0], origin_rpy: [0, 0, 0],
          limit: { lower: -3, upper: 3 },
        },
        {
          name: "j0", parent: "base", child: "mid", axis: [0, 0, 1],
          origin_xyz: [0.1, 0, 0], origin_rpy: [0, 0, 0],
          limit: { lower: -3, upper: 3 },
        },
      ],
      keypoints: [],
    };
    const poses = forwardKinematics(shuffled, [0, 0]);
    expect(transform(poses.get("tip")!, [0, 0, 0])[0]).toBeCloseTo(0.2, 12);
  });
});

describe("clampConfiguration", () => {
  it("projects into the limit box and pads missing entries", () => {
    expect(clampConfiguration(MODEL, [5])).toEqual([3]);
    expect(clampConfiguration(MODEL, [])).toEqual([0]);
  });
});

describe("intersectDragPlane", () => {
  it("hits the camera-facing plane through the grab point", () => {
    const hit = intersectDragPlane([0, 0, 5], [0, 0, -1], [0.5, 0.5, 0], [0, 0, -1]);
    expect(hit).not.toBeNull();
    expect(hit![2]).toBeCloseTo(0, 12);
  });

  it("returns null for parallel rays and behind-origin hits", () => {
    expect(intersectDragPlane([0, 0, 5], [1, 0, 0], [0, 0, 0], [0, 0, 1])).toBeNull();
    expect(intersectDragPlane([0, 0, -5], [0, 0, -1], [0, 0, 0], [0, 0, 1])).toBeNull();
  });
});
