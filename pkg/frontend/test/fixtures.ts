/** Test fixtures shaped like the simulator's results CSV (one row per scheme x point). */

export const CSV_HEADER =
  "scheme,n_players,cache_capacity,action_intensity,d_th_ms,mean_total_ms,mean_comp_ms," +
  "mean_comm_ms,p99_comm_ms,reliability,mean_rate_gbps,hd_success,me_ms,n_replications,seed";

export function presetCsv(axis: "n_players" | "cache_capacity" | "action_intensity" | "d_th_ms",
                          values: number[], schemes: string[]): string {
  const lines = [CSV_HEADER];
  const base: Record<string, number> = {
    n_players: 16, cache_capacity: 64, action_intensity: 1, d_th_ms: 20,
  };
  schemes.forEach((scheme, si) => {
    values.forEach((v, vi) => {
      const point = { ...base, [axis]: v };
      const total = 2 + si * 1.5 + vi * 0.8;
      lines.push([
        scheme, point.n_players, point.cache_capacity, point.action_intensity, point.d_th_ms,
        total.toFixed(6), (total * 0.7).toFixed(6), (total * 0.3).toFixed(6),
        (total * 1.9).toFixed(6), (0.99 - 0.01 * vi).toFixed(6), (1.9 - 0.1 * si).toFixed(6),
        (0.98 - 0.02 * si).toFixed(6), (0.05 + 0.01 * vi).toFixed(6), 2, 99,
      ].join(","));
    });
  });
  return lines.join("\n") + "\n";
}

export const SCHEMES = ["Proposed", "Baseline1", "Baseline2"];

export const FIXTURES: Record<string, string> = {
  fig3: presetCsv("n_players", [4, 8, 12, 16], SCHEMES),
  fig4: presetCsv("d_th_ms", [5, 10, 20, 40], ["Proposed"]),
  fig5a: presetCsv("cache_capacity", [0, 8, 32, 128], SCHEMES),
  fig5b: presetCsv("action_intensity", [0.5, 1, 2, 4], SCHEMES),
};
