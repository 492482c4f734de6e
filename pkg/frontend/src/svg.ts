import { LinearScale, apply, fmtTick, linearScale, niceTicks } from "./scale.js";
import { TrajectoryTable } from "./csv.js";

export interface PanelSpec {
  id: string;
  title: string;
  table: TrajectoryTable;
}

export const PANEL_W = 460;
export const PANEL_H = 330;
const MARGIN = { left: 64, right: 14, top: 34, bottom: 46 };
const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

/**
 * Curves are emitted in data coordinates and mapped to pixels by a single
 * affine `matrix(...)` on the enclosing group, so the `points` attribute of
 * each polyline carries the CSV values verbatim. `vector-effect` keeps the
 * stroke width uniform under that (strongly anisotropic) transform.
 */
function curvePolyline(t: number[], abs: number[], label: string, color: string): string {
  const pts: string[] = new Array(t.length);
  for (let i = 0; i < t.length; i++) pts[i] = `${t[i]},${abs[i]}`;
  return (
    `<polyline data-curve="${esc(label)}" fill="none" stroke="${color}" stroke-width="1.4" ` +
    `vector-effect="non-scaling-stroke" points="${pts.join(" ")}"/>`
  );
}

function dataRange(table: TrajectoryTable): { x0: number; x1: number; y1: number } {
  let x0 = Infinity;
  let x1 = -Infinity;
  let y1 = -Infinity;
  for (const v of table.t) {
    if (v < x0) x0 = v;
    if (v > x1) x1 = v;
  }
  for (const c of table.curves) {
    for (const v of c.abs) if (v > y1) y1 = v;
  }
  return { x0, x1, y1 };
}

function axisTicks(
  xs: LinearScale,
  ys: LinearScale,
  xt: number[],
  yt: number[],
  box: { l: number; r: number; t: number; b: number },
): string {
  const parts: string[] = [];
  for (const v of xt) {
    const px = apply(xs, v);
    parts.push(`<line x1="${px}" y1="${box.b}" x2="${px}" y2="${box.b + 5}" stroke="currentColor"/>`);
    parts.push(
      `<text x="${px}" y="${box.b + 18}" text-anchor="middle" font-size="11">${fmtTick(v)}</text>`,
    );
  }
  for (const v of yt) {
    const py = apply(ys, v);
    parts.push(`<line x1="${box.l - 5}" y1="${py}" x2="${box.l}" y2="${py}" stroke="currentColor"/>`);
    parts.push(
      `<text x="${box.l - 8}" y="${py + 3.5}" text-anchor="end" font-size="11">${fmtTick(v)}</text>`,
    );
  }
  return parts.join("\n");
}

function legend(labels: string[], box: { l: number; r: number; t: number }): string {
  const parts: string[] = [];
  labels.forEach((label, i) => {
    const y = box.t + 14 + 16 * i;
    const x = box.r - 86;
    parts.push(
      `<line x1="${x}" y1="${y - 4}" x2="${x + 20}" y2="${y - 4}" stroke="${PALETTE[i % PALETTE.length]}" stroke-width="2"/>`,
    );
    parts.push(`<text x="${x + 26}" y="${y}" font-size="11">${esc(label)}</text>`);
  });
  return parts.join("\n");
}

/** One panel: titled axes, |alpha(t)| curves, legend. Empty tables get bare axes. */
export function renderPanel(panel: PanelSpec, ox: number, oy: number, clipId: string): string {
  const box = {
    l: ox + MARGIN.left,
    r: ox + PANEL_W - MARGIN.right,
    t: oy + MARGIN.top,
    b: oy + PANEL_H - MARGIN.bottom,
  };

  const hasData = panel.table.t.length > 0 && panel.table.curves.length > 0;
  const { x0, x1, y1 } = hasData ? dataRange(panel.table) : { x0: 0, x1: 1, y1: 1 };
  const yTop = y1 > 0 ? y1 * 1.05 : 1;
  const xs = linearScale(x0, x1, box.l, box.r);
  const ys = linearScale(0, yTop, box.b, box.t);

  const parts: string[] = [];
  parts.push(`<g data-panel="${esc(panel.id)}">`);
  parts.push(
    `<text x="${ox + PANEL_W / 2}" y="${oy + 18}" text-anchor="middle" font-size="13" font-weight="bold">${esc(panel.title)}</text>`,
  );
  parts.push(
    `<rect x="${box.l}" y="${box.t}" width="${box.r - box.l}" height="${box.b - box.t}" fill="none" stroke="currentColor"/>`,
  );
  parts.push(axisTicks(xs, ys, niceTicks(x0, x1), niceTicks(0, yTop), box));
  parts.push(
    `<text x="${(box.l + box.r) / 2}" y="${box.b + 36}" text-anchor="middle" font-size="12">t</text>`,
  );
  parts.push(
    `<text x="${ox + 16}" y="${(box.t + box.b) / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 ${ox + 16} ${(box.t + box.b) / 2})">|&#945;(t)|</text>`,
  );

  if (hasData) {
    parts.push(`<clipPath id="${clipId}"><rect x="${box.l}" y="${box.t}" width="${box.r - box.l}" height="${box.b - box.t}"/></clipPath>`);
    parts.push(
      `<g clip-path="url(#${clipId})" transform="matrix(${xs.a} 0 0 ${ys.a} ${xs.b} ${ys.b})">`,
    );
    panel.table.curves.forEach((c, i) => {
      parts.push(curvePolyline(panel.table.t, c.abs, c.label, PALETTE[i % PALETTE.length]));
    });
    parts.push(`</g>`);
    parts.push(legend(panel.table.curves.map((c) => c.label), box));
  } else {
    parts.push(
      `<text data-empty="true" x="${(box.l + box.r) / 2}" y="${(box.t + box.b) / 2}" text-anchor="middle" font-size="12" fill="#888">no data</text>`,
    );
  }
  parts.push(`</g>`);
  return parts.join("\n");
}

/** Assemble one figure image: a grid of panels, `columns` wide. */
export function renderFigureSvg(name: string, panels: PanelSpec[], columns: number): string {
  const rows = Math.ceil(panels.length / columns);
  const width = PANEL_W * columns;
  const height = PANEL_H * rows;
  const body = panels
    .map((p, i) =>
      renderPanel(p, PANEL_W * (i % columns), PANEL_H * Math.floor(i / columns), `clip-${name}-${i}`),
    )
    .join("\n");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif" color="#222">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n${body}\n</svg>\n`
  );
}
