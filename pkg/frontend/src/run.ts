import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { checkColumns, extractSeries, parseResults } from "./csv.js";
import { figureSpec, requiredColumns } from "./figures.js";
import { RenderOptions, renderFigure } from "./render.js";

/** Read a results CSV, render the requested figure, write `<out>/<id>.svg`. */
export function renderToFile(figureId: string, inputPath: string, outDir: string,
                             options: RenderOptions = {}): string {
  const spec = figureSpec(figureId);
  const rows = parseResults(readFileSync(inputPath, "utf-8"));
  checkColumns(rows, requiredColumns(spec));
  const panelSeries = spec.panels.map((panel) =>
    extractSeries(rows, spec.xColumn, panel.yColumn, panel.errorColumn));
  const svg = renderFigure(spec, panelSeries, options);
  mkdirSync(outDir, { recursive: true });
  const target = join(outDir, `${spec.id}.svg`);
  writeFileSync(target, svg, "utf-8");
  return target;
}
