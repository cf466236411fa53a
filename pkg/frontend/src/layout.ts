/** Deterministic scatter positions for the spatial world layout. Position
 * is presentation only, hashed from the ganimal id so the same creature
 * lands on the same spot for every visitor and every poll. */

export function fnv1a(text: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h >>> 0;
}

export interface ScatterPosition {
  x: number;
  y: number;
}

export function scatterPosition(ganimalId: string): ScatterPosition {
  return {
    x: fnv1a("x|" + ganimalId) / 0x1_0000_0000,
    y: fnv1a("y|" + ganimalId) / 0x1_0000_0000,
  };
}
