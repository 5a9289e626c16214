export { FIGURES, figureSpec, requiredColumns } from "./figures.js";
export type { FigureSpec, PanelSpec } from "./figures.js";
export { MissingColumnsError, TableError, checkColumns, extractSeries, parseResults } from "./csv.js";
export type { ResultsRow, Series, SeriesPoint } from "./csv.js";
export { logTicks, niceTicks, renderFigure } from "./render.js";
export type { RenderOptions } from "./render.js";
export { renderToFile } from "./run.js";
