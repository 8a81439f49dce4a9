/** Pointer-to-intent mapping for the play area.
 *
 * The vertical axis is finger gap: the top edge is far (gapMaxMm), the
 * bottom edge is touching (0 mm). The horizontal axis stands in for finger
 * rigidity, loose on the left (0) to rigid on the right (1), because
 * commodity pointers cannot sense grip force.
 */

export interface FingerIntent {
  gap_mm: number;
  rigidity: number;
}

function clamp01(v: number): number {
  return v < 0 ? 0 : v > 1 ? 1 : v;
}

export function pointerToIntent(
  x: number,
  y: number,
  width: number,
  height: number,
  gapMaxMm = 17,
): FingerIntent {
  if (!(width > 0) || !(height > 0)) {
    throw new RangeError("play area has zero size");
  }
  return {
    gap_mm: (1 - clamp01(y / height)) * gapMaxMm,
    rigidity: clamp01(x / width),
  };
}
