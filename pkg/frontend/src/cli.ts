import { existsSync, mkdirSync, writeFileSync } from "fs";
import { join } from "path";
import { pathToFileURL } from "url";
import { CsvError } from "./csv.js";
import { FIGURES, FigureRecipe, figureNames, findFigure } from "./figures.js";
import { renderFigure } from "./render.js";

const USAGE =
  "usage: oupulse-plots --csv-dir DIR --out-dir DIR [figure ...]\n" +
  `  figure: any of ${figureNames().join(", ")} (default: all)`;

interface Args {
  csvDir: string;
  outDir: string;
  figures: FigureRecipe[];
}

class UsageError extends Error {}

function parseArgs(argv: string[]): Args {
  let csvDir: string | undefined;
  let outDir: string | undefined;
  const names: string[] = [];
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--csv-dir" || arg === "--out-dir") {
      const v = argv[++i];
      if (v === undefined || v.startsWith("--")) throw new UsageError(`${arg}: expected a directory`);
      if (arg === "--csv-dir") csvDir = v;
      else outDir = v;
    } else if (arg === "-h" || arg === "--help") {
      console.log(USAGE);
      process.exit(0);
    } else if (arg.startsWith("--")) {
      throw new UsageError(`unknown option ${arg}`);
    } else {
      names.push(arg);
    }
  }
  if (csvDir === undefined) throw new UsageError("--csv-dir is required");
  if (outDir === undefined) throw new UsageError("--out-dir is required");

  const figures = names.length === 0 ? FIGURES : names.map((n) => {
    const recipe = findFigure(n);
    if (recipe === undefined) {
      throw new UsageError(`unknown figure "${n}"; valid: ${figureNames().join(", ")}`);
    }
    return recipe;
  });
  return { csvDir, outDir, figures };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`error: ${err.message}`);
      console.error(USAGE);
      return 2;
    }
    throw err;
  }

  if (!existsSync(args.csvDir)) {
    console.error(`error: ${args.csvDir}: no such directory`);
    return 1;
  }
  mkdirSync(args.outDir, { recursive: true });

  for (const recipe of args.figures) {
    let svg: string;
    try {
      svg = renderFigure(recipe, args.csvDir);
    } catch (err) {
      if (err instanceof CsvError) {
        console.error(`error: ${err.message}`);
        return 1;
      }
      throw err;
    }
    const out = join(args.outDir, `${recipe.name}.svg`);
    writeFileSync(out, svg);
    console.log(`wrote ${out}`);
  }
  return 0;
}

if (process.argv[1] !== undefined && pathToFileURL(process.argv[1]).href === import.meta.url) {
  process.exit(main(process.argv.slice(2)));
}
