/** Diverging map scale: score -1 renders white, +1 renders deep blue.
 * Grey is reserved strictly for countries with no data at all.
 */

export const NO_DATA_GREY = "#c8c8c8";

const WHITE: [number, number, number] = [255, 255, 255];
const BLUE: [number, number, number] = [8, 48, 107];

export function scoreToColor(score: number): string {
  const clamped = Math.max(-1, Math.min(1, score));
  const t = (clamped + 1) / 2;
  const channel = (i: number) => Math.round(WHITE[i] + t * (BLUE[i] - WHITE[i]));
  return `rgb(${channel(0)},${channel(1)},${channel(2)})`;
}

export const LEGEND_TEXT =
  "color score = (positive - negative) / total, white = -1 to blue = +1; grey = no data";
