/**
 * Viewer glue: reads the embedded report JSON, renders every section in
 * order, and wires the interactions (facet toggles, wheel zoom with
 * double-click reset). The data block is never mutated; rendering twice
 * from the same JSON produces identical markup.
 */
import { escapeXml, renderPlot } from './charts.js';
import type { ReportData, Section } from './types.js';

export const DATA_BLOCK_ID = 'rlinspect-data';

export const VIEWER_CSS = `
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

export function readDataBlock(doc: Document): ReportData | null {
  const node = doc.getElementById(DATA_BLOCK_ID);
  if (!node || !node.textContent) return null;
  try {
    const parsed = JSON.parse(node.textContent) as ReportData;
    if (!parsed || typeof parsed !== 'object' || !Array.isArray(parsed.sections)) return null;
    return parsed;
  } catch {
    return null;
  }
}

export function sectionHtml(section: Section): string {
  const warnings = section.warnings
    .map((w) => `<p class="warning">warning: ${escapeXml(w)}</p>`)
    .join('');
  const plots = section.plots.map((p) => renderPlot(p)).join('');
  const empty =
    section.plots.length === 0 && section.warnings.length === 0
      ? '<p class="no-analyses">no output from this analyzer</p>'
      : '';
  return (
    `<section class="analyzer-section" data-analyzer="${escapeXml(section.analyzer)}">` +
    `<h2>${escapeXml(section.analyzer)}</h2>${warnings}${plots}${empty}</section>`
  );
}

export function reportHtml(report: ReportData): string {
  if (report.sections.length === 0) {
    return '<p class="no-analyses">no analyses</p>';
  }
  const meta = report.metadata;
  const header =
    `<p class="viewer-meta">run ${escapeXml(meta.run_id)} &middot; generated at ` +
    `${escapeXml(meta.generated_at)} &middot; engine ${escapeXml(meta.engine_version)}</p>`;
  return header + report.sections.map((s) => sectionHtml(s)).join('');
}

function wireFacetToggles(root: HTMLElement): void {
  for (const figure of Array.from(root.querySelectorAll('figure.plot'))) {
    const buttons = Array.from(figure.querySelectorAll<HTMLButtonElement>('.facet-toggle'));
    if (buttons.length === 0) continue;
    const hint = figure.querySelector('.facet-hint');
    const update = () => {
      let visible = 0;
      for (const button of buttons) {
        const name = button.getAttribute('data-facet');
        const facet = figure.querySelector<HTMLElement>(`.facet[data-facet="${name}"]`);
        const active = button.classList.contains('active');
        if (facet) facet.classList.toggle('hidden', !active);
        if (active) visible += 1;
      }
      if (hint) hint.classList.toggle('hidden', visible > 0);
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
export function facetToggle(root: HTMLElement, plotId: string, facetLabel: string): void {
  const figure = root.querySelector(`#plot-${cssEscape(plotId)}`);
  if (!figure) return;
  const button = Array.from(figure.querySelectorAll<HTMLButtonElement>('.facet-toggle')).find(
    (b) => b.getAttribute('data-facet') === facetLabel
  );
  if (button) button.click();
}

function cssEscape(value: string): string {
  return value.replace(/[^a-zA-Z0-9_-]/g, (c) => `\\${c}`);
}

function wireZoom(root: HTMLElement): void {
  for (const svg of Array.from(root.querySelectorAll<SVGSVGElement>('svg.zoomable'))) {
    svg.addEventListener('wheel', (event: WheelEvent) => {
      event.preventDefault();
      const box = (svg.getAttribute('viewBox') ?? '').split(/\s+/).map(Number);
      if (box.length !== 4 || box.some((v) => !isFinite(v))) return;
      const [x, y, w, h] = box;
      const factor = event.deltaY < 0 ? 0.85 : 1 / 0.85;
      const newW = w * factor;
      const newH = h * factor;
      const cx = x + w / 2;
      const cy = y + h / 2;
      svg.setAttribute(
        'viewBox',
        `${cx - newW / 2} ${cy - newH / 2} ${newW} ${newH}`
      );
    });
    svg.addEventListener('dblclick', () => {
      const original = svg.getAttribute('data-original-viewbox');
      if (original) svg.setAttribute('viewBox', original);
    });
  }
}

/**
 * Entry point: parse the data block and render everything into the app
 * container (creating one if the document lacks it). A missing or invalid
 * block renders a visible error banner instead of throwing.
 */
export function renderAll(doc: Document): void {
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
