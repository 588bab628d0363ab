export { EmptyInput, MissingColumn, parseCsv, readCsv } from "./csv.js";
export {
  FIGURE_KINDS,
  type FigureKind,
  type FigureRecipe,
  renderFigure,
  renderToFile,
} from "./figures.js";
export { parseArgs, main } from "./cli.js";
