import { join } from "path";
import { readTrajectoryCsv } from "./csv.js";
import { FigureRecipe } from "./figures.js";
import { PanelSpec, renderFigureSvg } from "./svg.js";

/**
 * Read every panel CSV of one figure and render the image.
 *
 * Reading is the only I/O: identical CSVs give a byte-identical SVG (nothing
 * time- or path-dependent is embedded). A panel whose CSV has a header but no
 * rows (or no curve columns) is drawn as empty axes, with a warning through
 * `warn`; a missing or malformed CSV throws a `CsvError` naming the file.
 */
export function renderFigure(
  recipe: FigureRecipe,
  csvDir: string,
  warn: (msg: string) => void = (msg) => console.warn(msg),
): string {
  const panels: PanelSpec[] = recipe.panels.map(({ id, title }) => {
    const table = readTrajectoryCsv(join(csvDir, `${id}.csv`));
    if (table.t.length === 0 || table.curves.length === 0) {
      warn(`warning: ${table.file}: no plottable data, drawing empty axes`);
    }
    return { id, title, table };
  });
  return renderFigureSvg(recipe.name, panels, recipe.columns);
}
