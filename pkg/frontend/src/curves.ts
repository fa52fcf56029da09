/** Curve plotting primitives and CSV export (framework-free). */

export interface CurveSeries {
  label: string;
  thetas: number[];
  values: number[];
}

export interface PlotModel {
  series: { label: string; points: Array<{ x: number; y: number }> }[];
  yMin: number;
  yMax: number;
}

/**
 * Normalize one or more curves into unit-square plotting coordinates
 * (shared y-range so reference and retargeted curves are comparable).
 */
export function buildPlot(series: CurveSeries[]): PlotModel {
  const all = series.flatMap((s) => s.values);
  if (all.length === 0) return { series: [], yMin: 0, yMax: 1 };
  let yMin = Math.min(...all);
  let yMax = Math.max(...all);
  if (yMax - yMin < 1e-12) {
    yMax = yMin + 1;
  }
  return {
    yMin,
    yMax,
    series: series.map((s) => ({
      label: s.label,
      points: s.thetas.map((t, i) => ({
        x: t,
        y: (s.values[i] - yMin) / (yMax - yMin),
      })),
    })),
  };
}

/** CSV made of exactly the plotted samples. */
export function curveCsv(series: CurveSeries[]): string {
  if (series.length === 0) return "theta\n";
  const header = ["theta", ...series.map((s) => s.label)].join(",");
  const n = series[0].thetas.length;
  const lines = [header];
  for (let i = 0; i < n; i++) {
    lines.push([series[0].thetas[i],
                ...series.map((s) => s.values[i])].join(","));
  }
  return lines.join("\n") + "\n";
}

export function parseCsv(text: string):
    { header: string[]; rows: number[][] } {
  const lines = text.trim().split("\n");
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((ln) => ln.split(",").map(Number));
  return { header, rows };
}
