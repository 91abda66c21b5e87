/**
 * Clearance classification for the safety overlay.
 *
 * Bands (boundaries belong to the cautious side):
 *   red    h <  safety threshold      inside the protected set
 *   yellow h <= activation distance   barrier territory, incl. both bounds
 *   green  h >  activation distance   free motion
 */

export type RiskColor = "green" | "yellow" | "red";

export interface Thresholds {
  safety: number; // D_safe, m
  activation: number; // d_act, m
}

export function classifyClearance(h: number, t: Thresholds): RiskColor {
  if (h < t.safety) return "red";
  if (h <= t.activation) return "yellow";
  return "green";
}

export const RISK_RGB: Record<RiskColor, number> = {
  green: 0x2ecc71,
  yellow: 0xf1c40f,
  red: 0xe74c3c,
};

/** Human-readable clearance readout in millimeters. */
export function formatClearance(h: number): string {
  const mm = h * 1000;
  return `${mm >= 0 ? "+" : ""}${mm.toFixed(2)} mm`;
}

/** Minimum clearance entry of a state's pair list, or null when empty. */
export function minClearance<T extends { h: number }>(entries: T[]): T | null {
  let best: T | null = null;
  for (const e of entries) {
    if (best === null || e.h < best.h) best = e;
  }
  return best;
}
