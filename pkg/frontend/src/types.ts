/**
 * Shapes of the embedded report data block (schema version 1), as the
 * analytics engine emits it. Field names mirror the JSON exactly.
 */

export interface ReportData {
  schema: number;
  metadata: ReportMetadata;
  sections: Section[];
}

export interface ReportMetadata {
  run_id: string;
  generated_at: string;
  engine_version: string;
  config: Record<string, unknown>;
}

export interface Section {
  analyzer: string;
  plots: PlotSpec[];
  warnings: string[];
}

export type PlotKind =
  | 'scatter2d'
  | 'histogram2d'
  | 'line'
  | 'multi_line'
  | 'histogram_ridgeline'
  | 'faceted_scatter';

export interface PlotSpec {
  id: string;
  kind: string; // PlotKind, but unknown kinds must render as a fallback panel
  title: string;
  axes: { x_label: string; y_label: string };
  series: Series[];
  facets: string[] | null;
  annotations: Annotation[] | null;
}

export interface Series {
  label: string;
  points?: [number, number][];
  bins?: Histogram2dBins | RidgelineBins;
}

export interface Histogram2dBins {
  x_edges: number[];
  y_edges: number[];
  counts: number[][];
}

export interface RidgelineBins {
  edges: number[];
  counts: number[];
}

export interface Annotation {
  update_or_episode_range: [number, number] | null;
  message: string;
}
