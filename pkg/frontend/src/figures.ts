/** Figure catalog: which result columns each figure analogue plots. */

export interface PanelSpec {
  yColumn: string;
  yLabel: string;
  /** column holding the half-width of the 99% confidence interval, if drawn */
  errorColumn?: string;
}

export interface FigureSpec {
  id: string;
  title: string;
  xColumn: string;
  xLabel: string;
  panels: PanelSpec[];
}

export const FIGURES: Record<string, FigureSpec> = {
  fig3: {
    id: "fig3",
    title: "Delay vs. number of players",
    xColumn: "n_players",
    xLabel: "Number of players",
    panels: [
      { yColumn: "mean_total_ms", yLabel: "Average total delay (ms)", errorColumn: "me_ms" },
      { yColumn: "p99_comm_ms", yLabel: "99th pct comm delay (ms)" },
    ],
  },
  fig4: {
    id: "fig4",
    title: "Reliability / rate / tail-latency tradeoff",
    xColumn: "d_th_ms",
    xLabel: "Delay threshold (ms)",
    panels: [
      { yColumn: "reliability", yLabel: "Reliability (comm < 10 ms)" },
      { yColumn: "mean_rate_gbps", yLabel: "Average service rate (Gbps)" },
      { yColumn: "p99_comm_ms", yLabel: "99th pct comm delay (ms)", errorColumn: "me_ms" },
    ],
  },
  fig5a: {
    id: "fig5a",
    title: "Computing delay vs. cache size",
    xColumn: "cache_capacity",
    xLabel: "Cache size (frames)",
    panels: [
      { yColumn: "mean_comp_ms", yLabel: "Average computing delay (ms)", errorColumn: "me_ms" },
    ],
  },
  fig5b: {
    id: "fig5b",
    title: "Total delay vs. game dynamics",
    xColumn: "action_intensity",
    xLabel: "Impulse actions per player per second",
    panels: [
      { yColumn: "mean_total_ms", yLabel: "Average total delay (ms)", errorColumn: "me_ms" },
    ],
  },
};

export function figureSpec(id: string): FigureSpec {
  const spec = FIGURES[id];
  if (!spec) {
    throw new Error(`unknown figure id ${JSON.stringify(id)}; expected one of ${Object.keys(FIGURES).join(", ")}`);
  }
  return spec;
}

export function requiredColumns(spec: FigureSpec): string[] {
  const cols = new Set<string>(["scheme", spec.xColumn]);
  for (const panel of spec.panels) {
    cols.add(panel.yColumn);
    if (panel.errorColumn) cols.add(panel.errorColumn);
  }
  return [...cols];
}
