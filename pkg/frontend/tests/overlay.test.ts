import { describe, expect, it } from "vitest";

import {
  classifyClearance,
  formatClearance,
  minClearance,
} from "../src/overlay";

const T = { safety: 0.01, activation: 0.011 };

describe("classifyClearance", () => {
  it("maps boundary values to yellow on both band edges", () => {
    expect(classifyClearance(0.01, T)).toBe("yellow"); // exactly D_safe
    expect(classifyClearance(0.011, T)).toBe("yellow"); // exactly d_act
  });

  it("maps strict band interiors to the specified colors", () => {
    expect(classifyClearance(0.0105, T)).toBe("yellow");
    expect(classifyClearance(0.0111, T)).toBe("green"); // strictly above d_act
    expect(classifyClearance(0.02, T)).toBe("green");
    expect(classifyClearance(0.0099, T)).toBe("red");
    expect(classifyClearance(0.0, T)).toBe("red");
    expect(classifyClearance(-0.005, T)).toBe("red"); // penetration
  });
});

describe("formatClearance", () => {
  it("renders signed millimeters", () => {
    expect(formatClearance(0.0123)).toBe("+12.30 mm");
    expect(formatClearance(-0.0041)).toBe("-4.10 mm");
  });
});

describe("minClearance", () => {
  it("returns the worst entry and null for empty lists", () => {
    expect(minClearance([])).toBeNull();
    const entries = [{ h: 0.02 }, { h: -0.001 }, { h: 0.005 }];
    expect(minClearance(entries)).toEqual({ h: -0.001 });
  });
});
