/** Pure rendering: every function maps (state, payloads) to a markup string.
 * No DOM access here, so the whole visual layer is testable against recorded
 * payloads, and replaying the same inputs always reproduces the same output.
 */

import { LEGEND_TEXT, NO_DATA_GREY, scoreToColor } from "./color";
import type {
  MapPayload,
  SeriesPoint,
  TopicPayload,
  WorldFeature,
  WorldGeo,
} from "./types";

export const MAP_WIDTH = 960;
export const MAP_HEIGHT = 480;

export const FONT_FLOOR_PX = 11;
export const FONT_SCALE_PX = 90;

/** Equirectangular projection onto the SVG viewport. */
export function project(lon: number, lat: number): [number, number] {
  const x = ((lon + 180) / 360) * MAP_WIDTH;
  const y = ((90 - lat) / 180) * MAP_HEIGHT;
  return [Math.round(x * 10) / 10, Math.round(y * 10) / 10];
}

function ringToPath(ring: number[][]): string {
  const points = ring.map(([lon, lat]) => project(lon, lat).join(","));
  return `M${points.join("L")}Z`;
}

function featureToPath(feature: WorldFeature): string {
  if (feature.geometry.type === "Polygon") {
    const rings = feature.geometry.coordinates as number[][][];
    return rings.map(ringToPath).join("");
  }
  const polys = feature.geometry.coordinates as number[][][][];
  return polys.map((rings) => rings.map(ringToPath).join("")).join("");
}

export function countryFill(code: string, map: MapPayload | null): string {
  const cell = map?.[code];
  if (!cell || cell.count <= 0) {
    return NO_DATA_GREY;
  }
  return scoreToColor(cell.score);
}

export function renderMap(
  world: WorldGeo,
  map: MapPayload | null,
  selectedCountry: string | null,
): string {
  const paths = world.features
    .map((feature) => {
      const fill = countryFill(feature.id, map);
      const selected = feature.id === selectedCountry ? ' class="selected"' : "";
      const clickable = map?.[feature.id] ? ' data-clickable="1"' : "";
      return (
        `<path data-code="${feature.id}" data-name="${escapeHtml(feature.properties.name)}"` +
        `${selected}${clickable} fill="${fill}" stroke="#888" stroke-width="0.4" ` +
        `d="${featureToPath(feature)}"></path>`
      );
    })
    .join("");
  return (
    `<svg viewBox="0 0 ${MAP_WIDTH} ${MAP_HEIGHT}" xmlns="http://www.w3.org/2000/svg" ` +
    `role="img" aria-label="sentiment map">${paths}</svg>`
  );
}

export function renderLegend(): string {
  const stops = [-1, -0.5, 0, 0.5, 1]
    .map(
      (s) =>
        `<span class="stop" style="background:${scoreToColor(s)}" title="${s}"></span>`,
    )
    .join("");
  return `<div class="legend">${stops}<span class="legend-text">${LEGEND_TEXT}</span></div>`;
}

export function wordFontSize(weight: number): number {
  return Math.max(FONT_FLOOR_PX, Math.round(weight * FONT_SCALE_PX));
}

/** Keyword cloud panel: words sized by probability with a legibility floor. */
export function renderKeywordPanel(title: string, topics: TopicPayload[] | null): string {
  if (topics === null) {
    return `<div class="panel"><h3>${escapeHtml(title)}</h3><p class="loading">loading</p></div>`;
  }
  if (topics.length === 0) {
    return `<div class="panel"><h3>${escapeHtml(title)}</h3><p class="no-data">no data</p></div>`;
  }
  const entries = topics
    .flatMap((t) => t.words)
    .sort((a, b) => b[1] - a[1])
    .slice(0, 24);
  const words = entries
    .map(
      ([word, weight]) =>
        `<span class="cloud-word" style="font-size:${wordFontSize(weight)}px" ` +
        `title="${weight.toFixed(4)}">${escapeHtml(word)}</span>`,
    )
    .join(" ");
  return `<div class="panel"><h3>${escapeHtml(title)}</h3><p class="cloud">${words}</p></div>`;
}

export function renderSparkline(series: SeriesPoint[], width = 280, height = 48): string {
  if (series.length === 0) {
    return `<svg viewBox="0 0 ${width} ${height}" class="sparkline"></svg>`;
  }
  const max = Math.max(1, ...series.map((p) => p.count));
  const step = series.length > 1 ? width / (series.length - 1) : 0;
  const points = series
    .map((p, i) => {
      const x = Math.round(i * step * 10) / 10;
      const y = Math.round((height - (p.count / max) * (height - 4)) * 10) / 10;
      return `${x},${y}`;
    })
    .join(" ");
  return (
    `<svg viewBox="0 0 ${width} ${height}" class="sparkline">` +
    `<polyline fill="none" stroke="#08306b" stroke-width="1.5" points="${points}"></polyline></svg>`
  );
}

export function renderCountryPanel(
  code: string,
  name: string,
  topics: TopicPayload[],
  series: SeriesPoint[],
): string {
  return (
    `<div class="country-panel" data-code="${code}">` +
    `<button class="close" data-action="close-country">close</button>` +
    `<h2>${escapeHtml(name)} (${code})</h2>` +
    renderSparkline(series) +
    renderKeywordPanel("keywords", topics) +
    `</div>`
  );
}

export function renderErrorBanner(message: string | null): string {
  if (!message) {
    return "";
  }
  return `<div class="banner error">${escapeHtml(message)}</div>`;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
