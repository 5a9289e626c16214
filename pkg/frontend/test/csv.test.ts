import { describe, expect, it } from "vitest";

import { MissingColumnsError, TableError, checkColumns, extractSeries, numeric,
         parseResults } from "../src/csv.js";
import { CSV_HEADER, FIXTURES, presetCsv } from "./fixtures.js";

describe("parseResults", () => {
  it("parses the engine schema into rows", () => {
    const rows = parseResults(FIXTURES.fig3);
    expect(rows).toHaveLength(12);
    expect(rows[0].scheme).toBe("Proposed");
    expect(Object.keys(rows[0])).toContain("me_ms");
  });

  it("tolerates a trailing newline", () => {
    expect(parseResults(FIXTURES.fig3 + "\n")).toHaveLength(12);
  });
});

describe("checkColumns", () => {
  it("passes when every required column exists", () => {
    const rows = parseResults(FIXTURES.fig3);
    expect(() => checkColumns(rows, ["scheme", "n_players", "me_ms"])).not.toThrow();
  });

  it("names each missing column", () => {
    const rows = parseResults(FIXTURES.fig3);
    try {
      checkColumns(rows, ["scheme", "nope_a", "nope_b"]);
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(MissingColumnsError);
      expect((err as Error).message).toContain("nope_a");
      expect((err as Error).message).toContain("nope_b");
    }
  });

  it("treats an empty table as missing everything", () => {
    expect(() => checkColumns([], ["scheme"])).toThrow(MissingColumnsError);
  });
});

describe("numeric", () => {
  it("rejects non-finite cells naming the column", () => {
    const row = { reliability: "not-a-number" };
    expect(() => numeric(row, "reliability")).toThrow(/reliability/);
  });
});

describe("extractSeries", () => {
  it("groups rows by scheme sorted by x", () => {
    const rows = parseResults(FIXTURES.fig3);
    const series = extractSeries(rows, "n_players", "mean_total_ms", "me_ms");
    expect(series.map((s) => s.scheme)).toEqual(["Proposed", "Baseline2", "Baseline1"]);
    for (const s of series) {
      expect(s.points.map((p) => p.x)).toEqual([4, 8, 12, 16]);
      expect(s.points.every((p) => p.err > 0)).toBe(true);
    }
  });

  it("the latest row wins when a point was re-run", () => {
    const dupe = [CSV_HEADER,
      "Proposed,4,64,1,20,5.0,3.5,1.5,9.5,0.99,1.9,0.98,0.05,2,99",
      "Proposed,4,64,1,20,7.0,4.9,2.1,13.3,0.98,1.8,0.97,0.06,2,100",
    ].join("\n");
    const series = extractSeries(parseResults(dupe), "n_players", "mean_total_ms", "me_ms");
    expect(series[0].points).toEqual([{ x: 4, y: 7.0, err: 0.06 }]);
  });

  it("rejects an empty selection", () => {
    expect(() => extractSeries([], "n_players", "mean_total_ms")).toThrow(TableError);
  });

  it("unknown schemes follow the known ones alphabetically", () => {
    const rows = parseResults(presetCsv("n_players", [4], ["Zeta", "Proposed", "Alpha"]));
    const series = extractSeries(rows, "n_players", "mean_total_ms");
    expect(series.map((s) => s.scheme)).toEqual(["Proposed", "Alpha", "Zeta"]);
  });
});
