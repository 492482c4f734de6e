/** Layout of the four figure images: which scenario CSVs go on which panels. */
export interface FigureRecipe {
  name: string;
  columns: number;
  panels: Array<{ id: string; title: string }>;
}

export const FIGURES: FigureRecipe[] = [
  {
    name: "fig1",
    columns: 2,
    panels: [
      { id: "fig1a", title: "free decay" },
      { id: "fig1b", title: "rectangular control" },
    ],
  },
  {
    name: "fig2",
    columns: 2,
    panels: [
      { id: "fig2a", title: "pulse strength, gamma0 = 1" },
      { id: "fig2b", title: "pulse strength, gamma0 = 5" },
      { id: "fig2c", title: "duty ratio, T = 0.05" },
      { id: "fig2d", title: "pulse period, Delta/T = 0.7" },
    ],
  },
  {
    name: "fig3",
    columns: 2,
    panels: [
      { id: "fig3a", title: "noisy pulses, T = 0.05" },
      { id: "fig3b", title: "noisy pulses, T = 0.4" },
      { id: "fig3c", title: "pulse shapes, T = 0.05" },
      { id: "fig3d", title: "pulse shapes, T = 0.6" },
    ],
  },
  {
    name: "fig4",
    columns: 2,
    panels: [
      { id: "fig4a", title: "zero-energy control" },
      { id: "fig4b", title: "zero-energy strength, gamma0 = 5" },
    ],
  },
];

export function figureNames(): string[] {
  return FIGURES.map((f) => f.name);
}

export function findFigure(name: string): FigureRecipe | undefined {
  return FIGURES.find((f) => f.name === name);
}
