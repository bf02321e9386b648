/* rlinspect report viewer (generated; do not edit) */
(function () {
'use strict';
// --- types.js ---
/**
 * Shapes of the embedded report data block (schema version 1), as the
 * analytics engine emits it. Field names mirror the JSON exactly.
 */

// --- charts.js ---
const PLOT_WIDTH = 640;
const PLOT_HEIGHT = 400;
const MARGIN = { top: 16, right: 16, bottom: 44, left: 56 };
const MAX_POINT_MARKERS = 200;
const MAX_SCATTER_POINTS = 4000;
const SERIES_COLORS = ['#2563eb', '#dc2626', '#059669', '#d97706', '#7c3aed', '#0d9488'];
function seriesColor(index) {
    return SERIES_COLORS[index % SERIES_COLORS.length];
}
function escapeXml(text) {
    return text
        .replace(/&/g, '&amp;')
        .replace(/</g, '&lt;')
        .replace(/>/g, '&gt;')
        .replace(/"/g, '&quot;');
}
function linearScale(d0, d1, r0, r1) {
    const span = d1 - d0;
    const fn = ((value) => {
        if (span === 0)
            return (r0 + r1) / 2;
        return r0 + ((value - d0) / span) * (r1 - r0);
    });
    fn.domain = [d0, d1];
    return fn;
}
function dataBounds(series) {
    var _a;
    let xMin = Infinity;
    let xMax = -Infinity;
    let yMin = Infinity;
    let yMax = -Infinity;
    for (const s of series) {
        for (const [x, y] of (_a = s.points) !== null && _a !== void 0 ? _a : []) {
            if (x < xMin)
                xMin = x;
            if (x > xMax)
                xMax = x;
            if (y < yMin)
                yMin = y;
            if (y > yMax)
                yMax = y;
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
function decimate(items, limit) {
    if (items.length <= limit)
        return items;
    const out = [];
    const step = (items.length - 1) / (limit - 1);
    for (let i = 0; i < limit; i++) {
        out.push(items[Math.round(i * step)]);
    }
    return out;
}
function fmt(value) {
    if (!isFinite(value))
        return String(value);
    const abs = Math.abs(value);
    if (value !== 0 && (abs >= 1e6 || abs < 1e-4))
        return value.toExponential(3);
    return String(Math.round(value * 1e6) / 1e6);
}
function svgOpen(width, height, cssClass) {
    return (`<svg class="${cssClass}" viewBox="0 0 ${width} ${height}" width="${width}" height="${height}" ` +
        `data-original-viewbox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">`);
}
function axes(xLabel, yLabel, width, height) {
    const { left, bottom } = MARGIN;
    const axisY = height - bottom;
    return (`<line x1="${left}" y1="${axisY}" x2="${width - MARGIN.right}" y2="${axisY}" class="axis"/>` +
        `<line x1="${left}" y1="${MARGIN.top}" x2="${left}" y2="${axisY}" class="axis"/>` +
        `<text x="${(left + width - MARGIN.right) / 2}" y="${height - 8}" class="axis-label">${escapeXml(xLabel)}</text>` +
        `<text x="14" y="${(MARGIN.top + axisY) / 2}" class="axis-label" transform="rotate(-90 14 ${(MARGIN.top + axisY) / 2})">${escapeXml(yLabel)}</text>`);
}
function tickLabels(xs, ys, width, height) {
    const axisY = height - MARGIN.bottom;
    const [x0, x1] = xs.domain;
    const [y0, y1] = ys.domain;
    return (`<text x="${MARGIN.left}" y="${axisY + 16}" class="tick">${fmt(x0)}</text>` +
        `<text x="${width - MARGIN.right}" y="${axisY + 16}" class="tick" text-anchor="end">${fmt(x1)}</text>` +
        `<text x="${MARGIN.left - 4}" y="${axisY}" class="tick" text-anchor="end">${fmt(y0)}</text>` +
        `<text x="${MARGIN.left - 4}" y="${MARGIN.top + 10}" class="tick" text-anchor="end">${fmt(y1)}</text>`);
}
function annotationRegions(annotations, xs, height) {
    if (!annotations)
        return '';
    let out = '';
    for (const a of annotations) {
        const range = a.update_or_episode_range;
        if (!range)
            continue;
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
function annotationList(annotations) {
    if (!annotations || annotations.length === 0)
        return '';
    const items = annotations
        .map((a) => {
        const range = a.update_or_episode_range;
        const prefix = range ? `[${range[0]}..${range[1]}] ` : '';
        return `<li>${escapeXml(prefix + a.message)}</li>`;
    })
        .join('');
    return `<ul class="annotations">${items}</ul>`;
}
function legend(series) {
    if (series.length < 2)
        return '';
    const items = series
        .map((s, i) => `<span class="legend-item"><span class="swatch" style="background:${seriesColor(i)}"></span>${escapeXml(s.label)}</span>`)
        .join('');
    return `<div class="legend">${items}</div>`;
}
function lineLayer(series, index, xs, ys) {
    var _a;
    const pts = (_a = series.points) !== null && _a !== void 0 ? _a : [];
    const path = pts.map(([x, y]) => `${fmt(xs(x))},${fmt(ys(y))}`).join(' ');
    const markers = decimate(pts, MAX_POINT_MARKERS)
        .map(([x, y]) => `<circle cx="${fmt(xs(x))}" cy="${fmt(ys(y))}" r="2.5" fill="${seriesColor(index)}">` +
        `<title>${escapeXml(series.label)}: (${fmt(x)}, ${fmt(y)})</title></circle>`)
        .join('');
    return (`<g class="series" data-label="${escapeXml(series.label)}">` +
        `<polyline points="${path}" fill="none" stroke="${seriesColor(index)}" stroke-width="1.5"/>` +
        markers +
        `</g>`);
}
function scatterLayer(series, index, xs, ys) {
    var _a;
    const pts = (_a = series.points) !== null && _a !== void 0 ? _a : [];
    const shown = decimate(pts, MAX_SCATTER_POINTS);
    const markers = shown
        .map(([x, y]) => `<circle cx="${fmt(xs(x))}" cy="${fmt(ys(y))}" r="2" fill="${seriesColor(index)}" fill-opacity="0.6">` +
        `<title>(${fmt(x)}, ${fmt(y)})</title></circle>`)
        .join('');
    const note = shown.length < pts.length
        ? `<text x="${MARGIN.left + 4}" y="${MARGIN.top + 2}" class="tick">showing ${shown.length} of ${pts.length} points</text>`
        : '';
    return `<g class="series" data-label="${escapeXml(series.label)}" data-point-count="${pts.length}">${markers}${note}</g>`;
}
/** Blue-to-red heat ramp for histogram cells, t in [0, 1]. */
function heatColor(t) {
    const clamped = Math.max(0, Math.min(1, t));
    const r = Math.round(40 + 200 * clamped);
    const g = Math.round(70 + 40 * (1 - clamped));
    const b = Math.round(220 - 170 * clamped);
    return `rgb(${r},${g},${b})`;
}
function renderLinePlot(spec) {
    const bounds = dataBounds(spec.series);
    const xs = linearScale(bounds.x[0], bounds.x[1], MARGIN.left, PLOT_WIDTH - MARGIN.right);
    const ys = linearScale(bounds.y[0], bounds.y[1], PLOT_HEIGHT - MARGIN.bottom, MARGIN.top);
    const layers = spec.series.map((s, i) => lineLayer(s, i, xs, ys)).join('');
    return (svgOpen(PLOT_WIDTH, PLOT_HEIGHT, 'plot-svg zoomable') +
        annotationRegions(spec.annotations, xs, PLOT_HEIGHT) +
        layers +
        axes(spec.axes.x_label, spec.axes.y_label, PLOT_WIDTH, PLOT_HEIGHT) +
        tickLabels(xs, ys, PLOT_WIDTH, PLOT_HEIGHT) +
        '</svg>' +
        legend(spec.series) +
        annotationList(spec.annotations));
}
function renderScatterPlot(spec) {
    const bounds = dataBounds(spec.series);
    const xs = linearScale(bounds.x[0], bounds.x[1], MARGIN.left, PLOT_WIDTH - MARGIN.right);
    const ys = linearScale(bounds.y[0], bounds.y[1], PLOT_HEIGHT - MARGIN.bottom, MARGIN.top);
    const layers = spec.series.map((s, i) => scatterLayer(s, i, xs, ys)).join('');
    return (svgOpen(PLOT_WIDTH, PLOT_HEIGHT, 'plot-svg zoomable') +
        layers +
        axes(spec.axes.x_label, spec.axes.y_label, PLOT_WIDTH, PLOT_HEIGHT) +
        tickLabels(xs, ys, PLOT_WIDTH, PLOT_HEIGHT) +
        '</svg>' +
        legend(spec.series) +
        annotationList(spec.annotations));
}
function renderHistogram2d(spec) {
    const binSeries = spec.series.find((s) => s.bins);
    const pointSeries = spec.series.filter((s) => s.points);
    if (!binSeries || !binSeries.bins)
        return renderScatterPlot(spec);
    const bins = binSeries.bins;
    const xEdges = bins.x_edges;
    const yEdges = bins.y_edges;
    const xs = linearScale(xEdges[0], xEdges[xEdges.length - 1], MARGIN.left, PLOT_WIDTH - MARGIN.right);
    const ys = linearScale(yEdges[0], yEdges[yEdges.length - 1], PLOT_HEIGHT - MARGIN.bottom, MARGIN.top);
    let maxCount = 0;
    for (const row of bins.counts)
        for (const c of row)
            if (c > maxCount)
                maxCount = c;
    let cells = '';
    for (let i = 0; i < bins.counts.length; i++) {
        for (let j = 0; j < bins.counts[i].length; j++) {
            const count = bins.counts[i][j];
            if (count === 0)
                continue;
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
    return (svgOpen(PLOT_WIDTH, PLOT_HEIGHT, 'plot-svg zoomable') +
        `<g class="heatmap">${cells}</g>` +
        overlay +
        axes(spec.axes.x_label, spec.axes.y_label, PLOT_WIDTH, PLOT_HEIGHT) +
        tickLabels(xs, ys, PLOT_WIDTH, PLOT_HEIGHT) +
        '</svg>' +
        annotationList(spec.annotations));
}
function ridgeRowUpdate(label) {
    const match = /update (\d+)/.exec(label);
    return match ? Number(match[1]) : null;
}
function renderRidgeline(spec) {
    var _a;
    const rows = spec.series.filter((s) => s.bins);
    if (rows.length === 0)
        return fallbackPanel(spec, 'ridgeline plot without binned series');
    const rowGap = Math.max(10, Math.min(36, (PLOT_HEIGHT - MARGIN.top - MARGIN.bottom) / rows.length));
    const height = Math.max(PLOT_HEIGHT, MARGIN.top + MARGIN.bottom + rowGap * (rows.length + 2));
    let lo = Infinity;
    let hi = -Infinity;
    let maxCount = 1;
    for (const row of rows) {
        lo = Math.min(lo, row.bins.edges[0]);
        hi = Math.max(hi, row.bins.edges[row.bins.edges.length - 1]);
        for (const c of row.bins.counts)
            maxCount = Math.max(maxCount, c);
    }
    const xs = linearScale(lo, hi, MARGIN.left, PLOT_WIDTH - MARGIN.right);
    const amplitude = rowGap * 1.8;
    const baselines = [];
    let bodies = '';
    rows.forEach((row, r) => {
        const baseline = MARGIN.top + rowGap * (r + 1) + amplitude * 0.2;
        baselines.push(baseline);
        const pts = [`${fmt(xs(row.bins.edges[0]))},${fmt(baseline)}`];
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
                `<text x="${PLOT_WIDTH - MARGIN.right + 2}" y="${fmt(baseline)}" class="tick">${escapeXml(row.label)}</text></g>`;
    });
    // Flagged update ranges shade the affected rows, boxing the problem area.
    let regions = '';
    for (const a of (_a = spec.annotations) !== null && _a !== void 0 ? _a : []) {
        if (!a.update_or_episode_range)
            continue;
        const [rangeLo, rangeHi] = a.update_or_episode_range;
        const hit = rows
            .map((row, r) => ({ update: ridgeRowUpdate(row.label), r }))
            .filter(({ update }) => update !== null && update >= rangeLo && update <= rangeHi);
        if (hit.length === 0)
            continue;
        const yTop = baselines[hit[0].r] - amplitude;
        const yBottom = baselines[hit[hit.length - 1].r] + rowGap * 0.3;
        regions +=
            `<rect class="flag-region" x="${MARGIN.left}" y="${fmt(yTop)}" ` +
                `width="${PLOT_WIDTH - MARGIN.left - MARGIN.right}" height="${fmt(yBottom - yTop)}">` +
                `<title>${escapeXml(a.message)}</title></rect>`;
    }
    return (svgOpen(PLOT_WIDTH, height, 'plot-svg') +
        regions +
        bodies +
        axes(spec.axes.x_label, spec.axes.y_label, PLOT_WIDTH, height) +
        '</svg>' +
        annotationList(spec.annotations));
}
function renderFacetedScatter(spec) {
    var _a;
    const facets = (_a = spec.facets) !== null && _a !== void 0 ? _a : spec.series.map((s) => s.label);
    const bounds = dataBounds(spec.series);
    const facetWidth = PLOT_WIDTH / 2;
    const panels = spec.series
        .map((s, i) => {
        var _a, _b, _c;
        const xs = linearScale(bounds.x[0], bounds.x[1], MARGIN.left / 2, facetWidth - 8);
        const ys = linearScale(bounds.y[0], bounds.y[1], PLOT_HEIGHT - MARGIN.bottom, MARGIN.top + 14);
        const empty = ((_a = s.points) !== null && _a !== void 0 ? _a : []).length === 0;
        const body = empty
            ? `<text x="${facetWidth / 2}" y="${PLOT_HEIGHT / 2}" class="facet-empty" text-anchor="middle">no states in this facet</text>`
            : scatterLayer(s, i, xs, ys);
        return (`<div class="facet" data-facet="${escapeXml((_b = facets[i]) !== null && _b !== void 0 ? _b : s.label)}">` +
            svgOpen(facetWidth, PLOT_HEIGHT, 'plot-svg zoomable') +
            `<text x="${facetWidth / 2}" y="${MARGIN.top}" class="facet-title" text-anchor="middle">${escapeXml((_c = facets[i]) !== null && _c !== void 0 ? _c : s.label)}</text>` +
            body +
            '</svg></div>');
    })
        .join('');
    const toggles = facets
        .map((f) => `<button type="button" class="facet-toggle active" data-facet="${escapeXml(f)}">${escapeXml(f)}</button>`)
        .join('');
    return (`<div class="facet-toggles">${toggles}</div>` +
        `<div class="facet-grid">${panels}</div>` +
        `<p class="facet-hint hidden">all facets hidden; toggle one back on</p>` +
        annotationList(spec.annotations));
}
function fallbackPanel(spec, note) {
    const body = escapeXml(JSON.stringify(spec, null, 2));
    const reason = escapeXml(note !== null && note !== void 0 ? note : `unknown plot kind: ${spec.kind}`);
    return (`<div class="fallback-panel"><p>${reason}; raw data below</p>` +
        `<pre class="raw-json">${body}</pre></div>`);
}
/** Render one plot spec to HTML. Unknown kinds degrade to the raw-JSON panel. */
function renderPlot(spec) {
    let body;
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
    return (`<figure class="plot" id="plot-${escapeXml(spec.id)}" data-kind="${escapeXml(spec.kind)}">` +
        `<figcaption>${escapeXml(spec.title)}</figcaption>${body}</figure>`);
}

// --- viewer.js ---
/**
 * Viewer glue: reads the embedded report JSON, renders every section in
 * order, and wires the interactions (facet toggles, wheel zoom with
 * double-click reset). The data block is never mutated; rendering twice
 * from the same JSON produces identical markup.
 */
const DATA_BLOCK_ID = 'rlinspect-data';
const VIEWER_CSS = `
.viewer h2 { font-size: 1.15rem; margin: 1.6rem 0 0.4rem; border-bottom: 1px solid #d8dee4; }
.viewer figure.plot { margin: 1rem 0 1.5rem; }
.viewer figcaption { font-weight: 600; margin-bottom: 0.3rem; }
.plot-svg { border: 1px solid #e2e8f0; background: #fff; max-width: 100%; }
.plot-svg .axis { stroke: #475569; stroke-width: 1; }
.plot-svg .axis-label { font: 12px system-ui, sans-serif; fill: #334155; text-anchor: middle; }
.plot-svg .tick { font: 10px system-ui, sans-serif; fill: #64748b; }
.plot-svg .facet-title { font: 12px system-ui, sans-serif; fill: #334155; font-weight: 600; }
.plot-svg .facet-empty { font: 12px system-ui, sans-serif; fill: #94a3b8; }
.flag-region { fill: #dc2626; fill-opacity: 0.12; stroke: #dc2626; stroke-opacity: 0.4; }
.legend { font: 12px system-ui, sans-serif; margin: 0.25rem 0; }
.legend-item { margin-right: 1rem; }
.swatch { display: inline-block; width: 10px; height: 10px; margin-right: 4px; border-radius: 2px; }
.annotations { font: 12px system-ui, sans-serif; color: #7c2d12; }
.facet-grid { display: flex; gap: 8px; flex-wrap: wrap; }
.facet-toggles { margin-bottom: 4px; }
.facet-toggle { margin-right: 6px; padding: 2px 10px; border: 1px solid #cbd5e1; border-radius: 10px;
  background: #f1f5f9; cursor: pointer; font: 12px system-ui, sans-serif; }
.facet-toggle.active { background: #2563eb; color: #fff; border-color: #2563eb; }
.hidden { display: none; }
.warning { background: #fef3c7; border: 1px solid #fcd34d; padding: 4px 8px; border-radius: 4px;
  font: 13px system-ui, sans-serif; margin: 4px 0; }
.error-banner { background: #fee2e2; border: 1px solid #ef4444; color: #7f1d1d; padding: 12px;
  border-radius: 6px; font: 14px system-ui, sans-serif; }
.fallback-panel { background: #f8fafc; border: 1px dashed #94a3b8; padding: 8px; }
.raw-json { max-height: 320px; overflow: auto; font-size: 11px; }
.no-analyses { color: #64748b; font-style: italic; }
.viewer-meta { color: #64748b; font: 12px system-ui, sans-serif; }
`;
function readDataBlock(doc) {
    const node = doc.getElementById(DATA_BLOCK_ID);
    if (!node || !node.textContent)
        return null;
    try {
        const parsed = JSON.parse(node.textContent);
        if (!parsed || typeof parsed !== 'object' || !Array.isArray(parsed.sections))
            return null;
        return parsed;
    }
    catch {
        return null;
    }
}
function sectionHtml(section) {
    const warnings = section.warnings
        .map((w) => `<p class="warning">warning: ${escapeXml(w)}</p>`)
        .join('');
    const plots = section.plots.map((p) => renderPlot(p)).join('');
    const empty = section.plots.length === 0 && section.warnings.length === 0
        ? '<p class="no-analyses">no output from this analyzer</p>'
        : '';
    return (`<section class="analyzer-section" data-analyzer="${escapeXml(section.analyzer)}">` +
        `<h2>${escapeXml(section.analyzer)}</h2>${warnings}${plots}${empty}</section>`);
}
function reportHtml(report) {
    if (report.sections.length === 0) {
        return '<p class="no-analyses">no analyses</p>';
    }
    const meta = report.metadata;
    const header = `<p class="viewer-meta">run ${escapeXml(meta.run_id)} &middot; generated at ` +
        `${escapeXml(meta.generated_at)} &middot; engine ${escapeXml(meta.engine_version)}</p>`;
    return header + report.sections.map((s) => sectionHtml(s)).join('');
}
function wireFacetToggles(root) {
    for (const figure of Array.from(root.querySelectorAll('figure.plot'))) {
        const buttons = Array.from(figure.querySelectorAll('.facet-toggle'));
        if (buttons.length === 0)
            continue;
        const hint = figure.querySelector('.facet-hint');
        const update = () => {
            let visible = 0;
            for (const button of buttons) {
                const name = button.getAttribute('data-facet');
                const facet = figure.querySelector(`.facet[data-facet="${name}"]`);
                const active = button.classList.contains('active');
                if (facet)
                    facet.classList.toggle('hidden', !active);
                if (active)
                    visible += 1;
            }
            if (hint)
                hint.classList.toggle('hidden', visible > 0);
        };
        for (const button of buttons) {
            button.addEventListener('click', () => {
                button.classList.toggle('active');
                update();
            });
        }
        update();
    }
}
/** Toggle one facet of one plot; exported for tests and console use. */
function facetToggle(root, plotId, facetLabel) {
    const figure = root.querySelector(`#plot-${cssEscape(plotId)}`);
    if (!figure)
        return;
    const button = Array.from(figure.querySelectorAll('.facet-toggle')).find((b) => b.getAttribute('data-facet') === facetLabel);
    if (button)
        button.click();
}
function cssEscape(value) {
    return value.replace(/[^a-zA-Z0-9_-]/g, (c) => `\\${c}`);
}
function wireZoom(root) {
    for (const svg of Array.from(root.querySelectorAll('svg.zoomable'))) {
        svg.addEventListener('wheel', (event) => {
            var _a;
            event.preventDefault();
            const box = ((_a = svg.getAttribute('viewBox')) !== null && _a !== void 0 ? _a : '').split(/\s+/).map(Number);
            if (box.length !== 4 || box.some((v) => !isFinite(v)))
                return;
            const [x, y, w, h] = box;
            const factor = event.deltaY < 0 ? 0.85 : 1 / 0.85;
            const newW = w * factor;
            const newH = h * factor;
            const cx = x + w / 2;
            const cy = y + h / 2;
            svg.setAttribute('viewBox', `${cx - newW / 2} ${cy - newH / 2} ${newW} ${newH}`);
        });
        svg.addEventListener('dblclick', () => {
            const original = svg.getAttribute('data-original-viewbox');
            if (original)
                svg.setAttribute('viewBox', original);
        });
    }
}
/**
 * Entry point: parse the data block and render everything into the app
 * container (creating one if the document lacks it). A missing or invalid
 * block renders a visible error banner instead of throwing.
 */
function renderAll(doc) {
    let app = doc.getElementById('rlinspect-app');
    if (!app) {
        app = doc.createElement('div');
        app.id = 'rlinspect-app';
        doc.body.appendChild(app);
    }
    if (!doc.getElementById('rlinspect-viewer-css')) {
        const style = doc.createElement('style');
        style.id = 'rlinspect-viewer-css';
        style.textContent = VIEWER_CSS;
        doc.head.appendChild(style);
    }
    const report = readDataBlock(doc);
    if (!report) {
        app.innerHTML =
            '<div class="error-banner">rlinspect viewer: report data block is missing or not valid JSON.</div>';
        return;
    }
    app.classList.add('viewer');
    app.innerHTML = reportHtml(report);
    wireFacetToggles(app);
    wireZoom(app);
}

// --- main.js ---
/** Boot the viewer once the document is ready. */
if (typeof document !== 'undefined') {
    if (document.readyState === 'loading') {
        document.addEventListener('DOMContentLoaded', () => renderAll(document));
    }
    else {
        renderAll(document);
    }
}

})();
