/**
 * Pure SVG builders: PlotSpec in, markup string out. No DOM access here,
 * so everything is unit-testable in a plain node environment. Interaction
 * (facet toggles, zoom) is wired afterwards by the viewer glue.
 */
import type { Annotation, Histogram2dBins, PlotSpec, RidgelineBins, Series } from './types.js';

export const PLOT_WIDTH = 640;
export const PLOT_HEIGHT = 400;
export const MARGIN = { top: 16, right: 16, bottom: 44, left: 56 };
export const MAX_POINT_MARKERS = 200;
export const MAX_SCATTER_POINTS = 4000;

const SERIES_COLORS = ['#2563eb', '#dc2626', '#059669', '#d97706', '#7c3aed', '#0d9488'];

export function seriesColor(index: number): string {
  return SERIES_COLORS[index % SERIES_COLORS.length];
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export interface Scale {
  (value: number): number;
  domain: [number, number];
}

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0;
  const fn = ((value: number) => {
    if (span === 0) return (r0 + r1) / 2;
    return r0 + ((value - d0) / span) * (r1 - r0);
  }) as Scale;
  fn.domain = [d0, d1];
  return fn;
}

export function dataBounds(series: Series[]): { x: [number, number]; y: [number, number] } {
  let xMin = Infinity;
  let xMax = -Infinity;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const s of series) {
    for (const [x, y] of s.points ?? []) {
      if (x < xMin) xMin = x;
      if (x > xMax) xMax = x;
      if (y < yMin) yMin = y;
      if (y > yMax) yMax = y;
    }
  }
  if (!isFinite(xMin)) {
    xMin = 0;
    xMax = 1;
    yMin = 0;
    yMax = 1;
  }
  if (xMin === xMax) {
    xMin -= 0.5;
    xMax += 0.5;
  }
  if (yMin === yMax) {
    yMin -= 0.5;
    yMax += 0.5;
  }
  return { x: [xMin, xMax], y: [yMin, yMax] };
}

/** Thin a point list to at most `limit` entries, always keeping both ends. */
export function decimate<T>(items: T[], limit: number): T[] {
  if (items.length <= limit) return items;
  const out: T[] = [];
  const step = (items.length - 1) / (limit - 1);
  for (let i = 0; i < limit; i++) {
    out.push(items[Math.round(i * step)]);
  }
  return out;
}

function fmt(value: number): string {
  if (!isFinite(value)) return String(value);
  const abs = Math.abs(value);
  if (value !== 0 && (abs >= 1e6 || abs < 1e-4)) return value.toExponential(3);
  return String(Math.round(value * 1e6) / 1e6);
}

function svgOpen(width: number, height: number, cssClass: string): string {
  return (
    `<svg class="${cssClass}" viewBox="0 0 ${width} ${height}" width="${width}" height="${height}" ` +
    `data-original-viewbox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">`
  );
}

function axes(xLabel: string, yLabel: string, width: number, height: number): string {
  const { left, bottom } = MARGIN;
  const axisY = height - bottom;
  return (
    `<line x1="${left}" y1="${axisY}" x2="${width - MARGIN.right}" y2="${axisY}" class="axis"/>` +
    `<line x1="${left}" y1="${MARGIN.top}" x2="${left}" y2="${axisY}" class="axis"/>` +
    `<text x="${(left + width - MARGIN.right) / 2}" y="${height - 8}" class="axis-label">${escapeXml(
      xLabel
    )}</text>` +
    `<text x="14" y="${(MARGIN.top + axisY) / 2}" class="axis-label" transform="rotate(-90 14 ${
      (MARGIN.top + axisY) / 2
    })">${escapeXml(yLabel)}</text>`
  );
}

function tickLabels(xs: Scale, ys: Scale, width: number, height: number): string {
  const axisY = height - MARGIN.bottom;
  const [x0, x1] = xs.domain;
  const [y0, y1] = ys.domain;
  return (
    `<text x="${MARGIN.left}" y="${axisY + 16}" class="tick">${fmt(x0)}</text>` +
    `<text x="${width - MARGIN.right}" y="${axisY + 16}" class="tick" text-anchor="end">${fmt(x1)}</text>` +
    `<text x="${MARGIN.left - 4}" y="${axisY}" class="tick" text-anchor="end">${fmt(y0)}</text>` +
    `<text x="${MARGIN.left - 4}" y="${MARGIN.top + 10}" class="tick" text-anchor="end">${fmt(y1)}</text>`
  );
}

function annotationRegions(
  annotations: Annotation[] | null,
  xs: Scale,
  height: number
): string {
  if (!annotations) return '';
  let out = '';
  for (const a of annotations) {
    const range = a.update_or_episode_range;
    if (!range) continue;
    const [lo, hi] = range;
    const x0 = Math.max(MARGIN.left, Math.min(xs(lo), PLOT_WIDTH - MARGIN.right));
    const x1 = Math.max(MARGIN.left, Math.min(xs(hi), PLOT_WIDTH - MARGIN.right));
    const w = Math.max(x1 - x0, 2);
    out +=
      `<rect class="flag-region" x="${x0}" y="${MARGIN.top}" width="${w}" ` +
      `height="${height - MARGIN.top - MARGIN.bottom}"><title>${escapeXml(a.message)}</title></rect>`;
  }
  return out;
}

function annotationList(annotations: Annotation[] | null): string {
  if (!annotations || annotations.length === 0) return '';
  const items = annotations
    .map((a) => {
      const range = a.update_or_episode_range;
      const prefix = range ? `[${range[0]}..${range[1]}] ` : '';
      return `<li>${escapeXml(prefix + a.message)}</li>`;
    })
    .join('');
  return `<ul class="annotations">${items}</ul>`;
}

function legend(series: Series[]): string {
  if (series.length < 2) return '';
  const items = series
    .map(
      (s, i) =>
        `<span class="legend-item"><span class="swatch" style="background:${seriesColor(
          i
        )}"></span>${escapeXml(s.label)}</span>`
    )
    .join('');
  return `<div class="legend">${items}</div>`;
}

function lineLayer(series: Series, index: number, xs: Scale, ys: Scale): string {
  const pts = series.points ?? [];
  const path = pts.map(([x, y]) => `${fmt(xs(x))},${fmt(ys(y))}`).join(' ');
  const markers = decimate(pts, MAX_POINT_MARKERS)
    .map(
      ([x, y]) =>
        `<circle cx="${fmt(xs(x))}" cy="${fmt(ys(y))}" r="2.5" fill="${seriesColor(index)}">` +
        `<title>${escapeXml(series.label)}: (${fmt(x)}, ${fmt(y)})</title></circle>`
    )
    .join('');
  return (
    `<g class="series" data-label="${escapeXml(series.label)}">` +
    `<polyline points="${path}" fill="none" stroke="${seriesColor(index)}" stroke-width="1.5"/>` +
    markers +
    `</g>`
  );
}

function scatterLayer(series: Series, index: number, xs: Scale, ys: Scale): string {
  const pts = series.points ?? [];
  const shown = decimate(pts, MAX_SCATTER_POINTS);
  const markers = shown
    .map(
      ([x, y]) =>
        `<circle cx="${fmt(xs(x))}" cy="${fmt(ys(y))}" r="2" fill="${seriesColor(index)}" fill-opacity="0.6">` +
        `<title>(${fmt(x)}, ${fmt(y)})</title></circle>`
    )
    .join('');
  const note =
    shown.length < pts.length
      ? `<text x="${MARGIN.left + 4}" y="${MARGIN.top + 2}" class="tick">showing ${shown.length} of ${pts.length} points</text>`
      : '';
  return `<g class="series" data-label="${escapeXml(series.label)}" data-point-count="${pts.length}">${markers}${note}</g>`;
}

/** Blue-to-red heat ramp for histogram cells, t in [0, 1]. */
export function heatColor(t: number): string {
  const clamped = Math.max(0, Math.min(1, t));
  const r = Math.round(40 + 200 * clamped);
  const g = Math.round(70 + 40 * (1 - clamped));
  const b = Math.round(220 - 170 * clamped);
  return `rgb(${r},${g},${b})`;
}

function renderLinePlot(spec: PlotSpec): string {
  const bounds = dataBounds(spec.series);
  const xs = linearScale(bounds.x[0], bounds.x[1], MARGIN.left, PLOT_WIDTH - MARGIN.right);
  const ys = linearScale(bounds.y[0], bounds.y[1], PLOT_HEIGHT - MARGIN.bottom, MARGIN.top);
  const layers = spec.series.map((s, i) => lineLayer(s, i, xs, ys)).join('');
  return (
    svgOpen(PLOT_WIDTH, PLOT_HEIGHT, 'plot-svg zoomable') +
    annotationRegions(spec.annotations, xs, PLOT_HEIGHT) +
    layers +
    axes(spec.axes.x_label, spec.axes.y_label, PLOT_WIDTH, PLOT_HEIGHT) +
    tickLabels(xs, ys, PLOT_WIDTH, PLOT_HEIGHT) +
    '</svg>' +
    legend(spec.series) +
    annotationList(spec.annotations)
  );
}

function renderScatterPlot(spec: PlotSpec): string {
  const bounds = dataBounds(spec.series);
  const xs = linearScale(bounds.x[0], bounds.x[1], MARGIN.left, PLOT_WIDTH - MARGIN.right);
  const ys = linearScale(bounds.y[0], bounds.y[1], PLOT_HEIGHT - MARGIN.bottom, MARGIN.top);
  const layers = spec.series.map((s, i) => scatterLayer(s, i, xs, ys)).join('');
  return (
    svgOpen(PLOT_WIDTH, PLOT_HEIGHT, 'plot-svg zoomable') +
    layers +
    axes(spec.axes.x_label, spec.axes.y_label, PLOT_WIDTH, PLOT_HEIGHT) +
    tickLabels(xs, ys, PLOT_WIDTH, PLOT_HEIGHT) +
    '</svg>' +
    legend(spec.series) +
    annotationList(spec.annotations)
  );
}

function renderHistogram2d(spec: PlotSpec): string {
  const binSeries = spec.series.find((s) => s.bins) as Series | undefined;
  const pointSeries = spec.series.filter((s) => s.points);
  if (!binSeries || !binSeries.bins) return renderScatterPlot(spec);
  const bins = binSeries.bins as Histogram2dBins;
  const xEdges = bins.x_edges;
  const yEdges = bins.y_edges;
  const xs = linearScale(
    xEdges[0],
    xEdges[xEdges.length - 1],
    MARGIN.left,
    PLOT_WIDTH - MARGIN.right
  );
  const ys = linearScale(
    yEdges[0],
    yEdges[yEdges.length - 1],
    PLOT_HEIGHT - MARGIN.bottom,
    MARGIN.top
  );
  let maxCount = 0;
  for (const row of bins.counts) for (const c of row) if (c > maxCount) maxCount = c;
  let cells = '';
  for (let i = 0; i < bins.counts.length; i++) {
    for (let j = 0; j < bins.counts[i].length; j++) {
      const count = bins.counts[i][j];
      if (count === 0) continue;
      const x0 = xs(xEdges[i]);
      const x1 = xs(xEdges[i + 1]);
      const y0 = ys(yEdges[j]);
      const y1 = ys(yEdges[j + 1]);
      cells +=
        `<rect x="${fmt(Math.min(x0, x1))}" y="${fmt(Math.min(y0, y1))}" ` +
        `width="${fmt(Math.abs(x1 - x0))}" height="${fmt(Math.abs(y1 - y0))}" ` +
        `fill="${heatColor(maxCount ? count / maxCount : 0)}">` +
        `<title>count ${count}</title></rect>`;
    }
  }
  const overlay = pointSeries.map((s, i) => scatterLayer(s, i + 1, xs, ys)).join('');
  return (
    svgOpen(PLOT_WIDTH, PLOT_HEIGHT, 'plot-svg zoomable') +
    `<g class="heatmap">${cells}</g>` +
    overlay +
    axes(spec.axes.x_label, spec.axes.y_label, PLOT_WIDTH, PLOT_HEIGHT) +
    tickLabels(xs, ys, PLOT_WIDTH, PLOT_HEIGHT) +
    '</svg>' +
    annotationList(spec.annotations)
  );
}

function ridgeRowUpdate(label: string): number | null {
  const match = /update (\d+)/.exec(label);
  return match ? Number(match[1]) : null;
}

function renderRidgeline(spec: PlotSpec): string {
  const rows = spec.series.filter((s) => s.bins) as (Series & { bins: RidgelineBins })[];
  if (rows.length === 0) return fallbackPanel(spec, 'ridgeline plot without binned series');
  const rowGap = Math.max(
    10,
    Math.min(36, (PLOT_HEIGHT - MARGIN.top - MARGIN.bottom) / rows.length)
  );
  const height = Math.max(PLOT_HEIGHT, MARGIN.top + MARGIN.bottom + rowGap * (rows.length + 2));
  let lo = Infinity;
  let hi = -Infinity;
  let maxCount = 1;
  for (const row of rows) {
    lo = Math.min(lo, row.bins.edges[0]);
    hi = Math.max(hi, row.bins.edges[row.bins.edges.length - 1]);
    for (const c of row.bins.counts) maxCount = Math.max(maxCount, c);
  }
  const xs = linearScale(lo, hi, MARGIN.left, PLOT_WIDTH - MARGIN.right);
  const amplitude = rowGap * 1.8;
  const baselines: number[] = [];
  let bodies = '';
  rows.forEach((row, r) => {
    const baseline = MARGIN.top + rowGap * (r + 1) + amplitude * 0.2;
    baselines.push(baseline);
    const pts: string[] = [`${fmt(xs(row.bins.edges[0]))},${fmt(baseline)}`];
    for (let i = 0; i < row.bins.counts.length; i++) {
      const xMid = (row.bins.edges[i] + row.bins.edges[i + 1]) / 2;
      const y = baseline - (row.bins.counts[i] / maxCount) * amplitude;
      pts.push(`${fmt(xs(xMid))},${fmt(y)}`);
    }
    pts.push(`${fmt(xs(row.bins.edges[row.bins.edges.length - 1]))},${fmt(baseline)}`);
    bodies +=
      `<g class="ridge-row"><polygon points="${pts.join(' ')}" fill="${seriesColor(0)}" ` +
      `fill-opacity="0.35" stroke="${seriesColor(0)}" stroke-width="0.8">` +
      `<title>${escapeXml(row.label)}</title></polygon>` +
      `<text x="${PLOT_WIDTH - MARGIN.right + 2}" y="${fmt(baseline)}" class="tick">${escapeXml(
        row.label
      )}</text></g>`;
  });
  // Flagged update ranges shade the affected rows, boxing the problem area.
  let regions = '';
  for (const a of spec.annotations ?? []) {
    if (!a.update_or_episode_range) continue;
    const [rangeLo, rangeHi] = a.update_or_episode_range;
    const hit = rows
      .map((row, r) => ({ update: ridgeRowUpdate(row.label), r }))
      .filter(({ update }) => update !== null && update >= rangeLo && update <= rangeHi);
    if (hit.length === 0) continue;
    const yTop = baselines[hit[0].r] - amplitude;
    const yBottom = baselines[hit[hit.length - 1].r] + rowGap * 0.3;
    regions +=
      `<rect class="flag-region" x="${MARGIN.left}" y="${fmt(yTop)}" ` +
      `width="${PLOT_WIDTH - MARGIN.left - MARGIN.right}" height="${fmt(yBottom - yTop)}">` +
      `<title>${escapeXml(a.message)}</title></rect>`;
  }
  return (
    svgOpen(PLOT_WIDTH, height, 'plot-svg') +
    regions +
    bodies +
    axes(spec.axes.x_label, spec.axes.y_label, PLOT_WIDTH, height) +
    '</svg>' +
    annotationList(spec.annotations)
  );
}

function renderFacetedScatter(spec: PlotSpec): string {
  const facets = spec.facets ?? spec.series.map((s) => s.label);
  const bounds = dataBounds(spec.series);
  const facetWidth = PLOT_WIDTH / 2;
  const panels = spec.series
    .map((s, i) => {
      const xs = linearScale(bounds.x[0], bounds.x[1], MARGIN.left / 2, facetWidth - 8);
      const ys = linearScale(bounds.y[0], bounds.y[1], PLOT_HEIGHT - MARGIN.bottom, MARGIN.top + 14);
      const empty = (s.points ?? []).length === 0;
      const body = empty
        ? `<text x="${facetWidth / 2}" y="${PLOT_HEIGHT / 2}" class="facet-empty" text-anchor="middle">no states in this facet</text>`
        : scatterLayer(s, i, xs, ys);
      return (
        `<div class="facet" data-facet="${escapeXml(facets[i] ?? s.label)}">` +
        svgOpen(facetWidth, PLOT_HEIGHT, 'plot-svg zoomable') +
        `<text x="${facetWidth / 2}" y="${MARGIN.top}" class="facet-title" text-anchor="middle">${escapeXml(
          facets[i] ?? s.label
        )}</text>` +
        body +
        '</svg></div>'
      );
    })
    .join('');
  const toggles = facets
    .map(
      (f) =>
        `<button type="button" class="facet-toggle active" data-facet="${escapeXml(f)}">${escapeXml(
          f
        )}</button>`
    )
    .join('');
  return (
    `<div class="facet-toggles">${toggles}</div>` +
    `<div class="facet-grid">${panels}</div>` +
    `<p class="facet-hint hidden">all facets hidden; toggle one back on</p>` +
    annotationList(spec.annotations)
  );
}

export function fallbackPanel(spec: PlotSpec, note?: string): string {
  const body = escapeXml(JSON.stringify(spec, null, 2));
  const reason = escapeXml(note ?? `unknown plot kind: ${spec.kind}`);
  return (
    `<div class="fallback-panel"><p>${reason}; raw data below</p>` +
    `<pre class="raw-json">${body}</pre></div>`
  );
}

/** Render one plot spec to HTML. Unknown kinds degrade to the raw-JSON panel. */
export function renderPlot(spec: PlotSpec): string {
  let body: string;
  switch (spec.kind) {
    case 'line':
    case 'multi_line':
      body = renderLinePlot(spec);
      break;
    case 'scatter2d':
      body = renderScatterPlot(spec);
      break;
    case 'histogram2d':
      body = renderHistogram2d(spec);
      break;
    case 'histogram_ridgeline':
      body = renderRidgeline(spec);
      break;
    case 'faceted_scatter':
      body = renderFacetedScatter(spec);
      break;
    default:
      body = fallbackPanel(spec);
  }
  return (
    `<figure class="plot" id="plot-${escapeXml(spec.id)}" data-kind="${escapeXml(spec.kind)}">` +
    `<figcaption>${escapeXml(spec.title)}</figcaption>${body}</figure>`
  );
}
