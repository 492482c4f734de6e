import { beforeAll, describe, expect, it } from "vitest";
import { spawnSync } from "child_process";
import { mkdtempSync, readFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { fileURLToPath } from "url";
import { FIGURES } from "../src/figures";

const CLI = fileURLToPath(new URL("../dist/cli.js", import.meta.url));
const FIGURE_NAMES = FIGURES.map((f) => f.name);

let csvDir: string;
let outDir: string;

// The full pipeline: the simulator writes the scenario CSVs, this package
// renders them. Everything downstream reads only those files.
beforeAll(() => {
  csvDir = mkdtempSync(join(tmpdir(), "e2e-csv-"));
  outDir = mkdtempSync(join(tmpdir(), "e2e-img-"));
  const gen = spawnSync(
    "python3",
    ["-m", "oupulse", "figure", ...FIGURE_NAMES, "--out", csvDir],
    { encoding: "utf8" },
  );
  if (gen.status !== 0) {
    throw new Error(`oupulse figure failed (status ${gen.status}): ${gen.stderr}`);
  }
  const render = spawnSync(
    process.execPath,
    [CLI, "--csv-dir", csvDir, "--out-dir", outDir],
    { encoding: "utf8" },
  );
  if (render.status !== 0) {
    throw new Error(`render failed (status ${render.status}): ${render.stderr}`);
  }
}, 300_000);

/** Minimal independent CSV read so the renderer is not checked against itself. */
function csvColumns(path: string): { rows: number; byLabel: Map<string, number[]>; t: number[] } {
  const lines = readFileSync(path, "utf8").trim().split("\n");
  const header = lines[0].split(",");
  const byLabel = new Map<string, number[]>();
  const t: number[] = [];
  const absIdx: Array<{ label: string; j: number }> = [];
  header.forEach((name, j) => {
    if (name.endsWith("_abs")) {
      absIdx.push({ label: name.slice(0, -4), j });
      byLabel.set(name.slice(0, -4), []);
    }
  });
  for (let i = 1; i < lines.length; i++) {
    const fields = lines[i].split(",");
    t.push(Number(fields[0]));
    for (const { label, j } of absIdx) byLabel.get(label)!.push(Number(fields[j]));
  }
  return { rows: lines.length - 1, byLabel, t };
}

function panelChunks(svg: string): Map<string, string> {
  const chunks = new Map<string, string>();
  const parts = svg.split('data-panel="');
  for (let i = 1; i < parts.length; i++) {
    const id = parts[i].slice(0, parts[i].indexOf('"'));
    chunks.set(id, parts[i]);
  }
  return chunks;
}

function curvePoints(chunk: string): Map<string, Array<[number, number]>> {
  const curves = new Map<string, Array<[number, number]>>();
  const re = /data-curve="([^"]*)"[^>]*points="([^"]*)"/g;
  let m: RegExpExecArray | null;
  while ((m = re.exec(chunk)) !== null) {
    const pts = m[2].split(" ").map((p) => {
      const [x, y] = p.split(",");
      return [Number(x), Number(y)] as [number, number];
    });
    curves.set(m[1], pts);
  }
  return curves;
}

it("emits one image per figure without error", () => {
  for (const name of FIGURE_NAMES) {
    const svg = readFileSync(join(outDir, `${name}.svg`), "utf8");
    expect(svg.startsWith("<svg ")).toBe(true);
    expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
  }
});

it("keeps every panel of every figure, one group per scenario", () => {
  for (const recipe of FIGURES) {
    const svg = readFileSync(join(outDir, `${recipe.name}.svg`), "utf8");
    const chunks = panelChunks(svg);
    expect([...chunks.keys()].sort()).toEqual(recipe.panels.map((p) => p.id).sort());
  }
});

it("plots exactly the CSV values, point for point", () => {
  for (const recipe of FIGURES) {
    const svg = readFileSync(join(outDir, `${recipe.name}.svg`), "utf8");
    const chunks = panelChunks(svg);
    for (const panel of recipe.panels) {
      const csv = csvColumns(join(csvDir, `${panel.id}.csv`));
      const curves = curvePoints(chunks.get(panel.id)!);
      expect([...curves.keys()].sort()).toEqual([...csv.byLabel.keys()].sort());
      for (const [label, want] of csv.byLabel) {
        const pts = curves.get(label)!;
        expect(pts.length).toBe(csv.rows);
        for (let i = 0; i < pts.length; i++) {
          if (pts[i][0] !== csv.t[i] || pts[i][1] !== want[i]) {
            throw new Error(
              `${recipe.name}/${panel.id}/${label} point ${i}: ` +
                `svg (${pts[i][0]}, ${pts[i][1]}) != csv (${csv.t[i]}, ${want[i]})`,
            );
          }
        }
      }
    }
  }
});

describe("rerendering", () => {
  it("is byte-identical for identical inputs", () => {
    const again = mkdtempSync(join(tmpdir(), "e2e-img2-"));
    const r = spawnSync(process.execPath, [CLI, "--csv-dir", csvDir, "--out-dir", again, "fig1"], {
      encoding: "utf8",
    });
    expect(r.status).toBe(0);
    const a = readFileSync(join(outDir, "fig1.svg"));
    const b = readFileSync(join(again, "fig1.svg"));
    expect(a.equals(b)).toBe(true);
  }, 60_000);
});
