/** Categorical palette: 12 distinguishable hues; event types beyond the
 * palette hash into it (color collisions are resolved by the legend). */

export const PALETTE = [
  "#4e79a7",
  "#f28e2b",
  "#e15759",
  "#76b7b2",
  "#59a14f",
  "#edc948",
  "#b07aa1",
  "#ff9da7",
  "#9c755f",
  "#bab0ac",
  "#1b9e77",
  "#7570b3",
] as const;

export const GRAY = "#999999";

function hash(n: number): number {
  // Knuth multiplicative hash keeps near ids away from each other
  return (n * 2654435761) >>> 0;
}

export function colorFor(eventId: number): string {
  if (eventId < PALETTE.length) {
    return PALETTE[eventId];
  }
  return PALETTE[hash(eventId) % PALETTE.length];
}
