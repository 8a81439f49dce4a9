/** Strip-chart geometry and drawing.
 *
 * Charts scroll right to left: the newest sample is pinned to the right
 * edge and the horizontal span is always the full buffer capacity, so a
 * partially filled buffer occupies only the right-hand part of the box.
 * Every vertex corresponds to one received frame; nothing is interpolated
 * or extrapolated.
 */

/** Flat [x0, y0, x1, y1, ...] polyline for values in a w x h box. */
export function stripPath(
  values: ArrayLike<number>,
  span: number,
  w: number,
  h: number,
  min: number,
  max: number,
): number[] {
  const k = values.length;
  if (span < 2 || k > span) throw new RangeError("span must hold the values");
  const out: number[] = [];
  const dy = max - min;
  for (let i = 0; i < k; i++) {
    const x = (w * (span - k + i)) / (span - 1);
    let f = (values[i]! - min) / dy;
    f = f < 0 ? 0 : f > 1 ? 1 : f;
    out.push(x, h - f * h);
  }
  return out;
}

export interface StripStyle {
  min: number;
  max: number;
  color: string;
  label: string;
}

export function drawStrip(
  canvas: HTMLCanvasElement,
  values: ArrayLike<number>,
  span: number,
  style: StripStyle,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#2a3140";
  ctx.lineWidth = 1;
  ctx.strokeRect(0.5, 0.5, w - 1, h - 1);
  ctx.fillStyle = "#8b93a5";
  ctx.font = "11px system-ui, sans-serif";
  ctx.fillText(style.label, 6, 14);
  ctx.fillText(String(style.max), w - 28, 14);
  ctx.fillText(String(style.min), w - 28, h - 5);
  if (values.length < 2) return;
  const pts = stripPath(values, span, w, h, style.min, style.max);
  ctx.strokeStyle = style.color;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  ctx.moveTo(pts[0]!, pts[1]!);
  for (let i = 2; i < pts.length; i += 2) ctx.lineTo(pts[i]!, pts[i + 1]!);
  ctx.stroke();
}
