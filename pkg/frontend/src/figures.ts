import { basename } from "node:path";
import { writeFileSync } from "node:fs";

import { EmptyInput, MissingColumn, numericColumns, readCsv } from "./csv.js";
import { PALETTE, Scene, extent, pad } from "./svg.js";

export type FigureKind =
  | "policy_overlay"
  | "bne_strategies"
  | "approx_ratio"
  | "regret"
  | "distance";

export const FIGURE_KINDS: FigureKind[] = [
  "policy_overlay",
  "bne_strategies",
  "approx_ratio",
  "regret",
  "distance",
];

export interface FigureRecipe {
  kind: FigureKind;
  /** Main CSV inputs; meaning depends on the kind. */
  inputs: string[];
  /** Non-attack distribution CSV for the policy overlay. */
  histogram?: string;
  output: string;
}

function label(path: string): string {
  return basename(path).replace(/\.csv$/, "");
}

function mean(values: number[]): number {
  return values.reduce((a, b) => a + b, 0) / values.length;
}

function std(values: number[]): number {
  const m = mean(values);
  return Math.sqrt(mean(values.map((v) => (v - m) ** 2)));
}

/** Indices of at most `count` evenly spaced samples, always keeping the ends. */
function subsample(length: number, count = 400): number[] {
  if (length <= count) return Array.from({ length }, (_, i) => i);
  const out: number[] = [];
  for (let i = 0; i < count; i++) {
    out.push(Math.round((i * (length - 1)) / (count - 1)));
  }
  return [...new Set(out)];
}

function policyOverlay(recipe: FigureRecipe): Scene {
  if (!recipe.histogram) {
    throw new MissingColumn("policy_overlay needs a histogram CSV (--hist)");
  }
  if (recipe.inputs.length === 0) {
    throw new EmptyInput("policy_overlay needs at least one policy CSV");
  }
  const hist = numericColumns(readCsv(recipe.histogram), ["vector_id", "p0"], recipe.histogram);
  const histMax = Math.max(...hist.p0);
  const scene = new Scene(
    pad(extent(hist.vector_id)),
    { min: 0, max: 1.02 },
    "Non-attack distribution and detection policies",
    "vector",
    "probability of detection",
  );
  // Histogram normalized to the unit axis so policies overlay it.
  scene.bars(hist.vector_id, hist.p0.map((p) => p / histMax), 1.0, "#9dbcd4");
  const entries: [string, string][] = [];
  recipe.inputs.forEach((path, i) => {
    const pol = numericColumns(readCsv(path), ["vector_id", "pi"], path);
    const color = PALETTE[i % PALETTE.length];
    scene.curve(pol.vector_id, pol.pi, color, label(path));
    entries.push([label(path), color]);
  });
  scene.legend(entries);
  return scene;
}

function bneStrategies(recipe: FigureRecipe): Scene {
  if (recipe.inputs.length < 2) {
    throw new EmptyInput("bne_strategies needs policy.csv and attacker.csv");
  }
  const [policyPath, attackerPath] = recipe.inputs;
  const pol = numericColumns(readCsv(policyPath), ["vector_id", "pi"], policyPath);
  const att = numericColumns(
    readCsv(attackerPath), ["type", "vector_id", "alpha"], attackerPath,
  );
  const scene = new Scene(
    pad(extent(pol.vector_id)),
    { min: 0, max: 1.02 },
    "Equilibrium strategies",
    "vector",
    "probability",
  );
  const types = [...new Set(att.type)].sort((a, b) => a - b);
  const entries: [string, string][] = [["detection policy", PALETTE[0]]];
  scene.curve(pol.vector_id, pol.pi, PALETTE[0], "policy");
  types.forEach((t, i) => {
    const color = PALETTE[(i + 1) % PALETTE.length];
    const xs: number[] = [];
    const ys: number[] = [];
    att.type.forEach((rowType, j) => {
      if (rowType === t) {
        xs.push(att.vector_id[j]);
        ys.push(att.alpha[j]);
      }
    });
    scene.stems(xs, ys, color);
    entries.push([`attacker type ${t}`, color]);
  });
  scene.legend(entries);
  return scene;
}

function approxRatio(recipe: FigureRecipe): Scene {
  if (recipe.inputs.length === 0) throw new EmptyInput("approx_ratio needs a sweep CSV");
  const sweep = numericColumns(
    readCsv(recipe.inputs[0]), ["n", "replica", "ratio", "in_argmax"], recipe.inputs[0],
  );
  const sizes = [...new Set(sweep.n)].sort((a, b) => a - b);
  const ratioMean: number[] = [];
  const ratioStd: number[] = [];
  const pN: number[] = [];
  for (const n of sizes) {
    const ratios: number[] = [];
    const hits: number[] = [];
    sweep.n.forEach((value, i) => {
      if (value === n) {
        if (Number.isFinite(sweep.ratio[i])) ratios.push(sweep.ratio[i]);
        hits.push(sweep.in_argmax[i]);
      }
    });
    if (ratios.length === 0) throw new EmptyInput(`no usable ratios for n=${n}`);
    ratioMean.push(mean(ratios));
    ratioStd.push(std(ratios));
    pN.push(100 * mean(hits));
  }
  const scene = new Scene(
    pad(extent(sizes), 0.08),
    { min: 0, max: 102 },
    "Training quality by sample size",
    "training samples",
    "percent",
  );
  scene.curve(sizes, ratioMean, PALETTE[0], "approximation ratio");
  sizes.forEach((n, i) => scene.errorBar(n, ratioMean[i], ratioStd[i], PALETTE[0]));
  scene.curve(sizes, pN, PALETTE[1], "optimum-hit rate");
  scene.legend([
    ["approximation ratio (mean ± 1 sd)", PALETTE[0]],
    ["optimum-hit rate", PALETTE[1]],
  ]);
  return scene;
}

function replicaBandFigure(
  recipe: FigureRecipe,
  valueColumn: string,
  title: string,
  yLabel: string,
): Scene {
  if (recipe.inputs.length === 0) throw new EmptyInput(`${recipe.kind} needs trace CSVs`);
  const traces = recipe.inputs.map((path) =>
    numericColumns(readCsv(path), ["step", valueColumn], path),
  );
  const length = Math.min(...traces.map((t) => t.step.length));
  if (length === 0) throw new EmptyInput("traces are empty");
  const idx = subsample(length);
  const steps = idx.map((i) => traces[0].step[i]);
  const means: number[] = [];
  const lows: number[] = [];
  const highs: number[] = [];
  for (const i of idx) {
    const values = traces.map((t) => t[valueColumn][i]);
    const m = mean(values);
    const s = std(values);
    means.push(m);
    lows.push(m - s);
    highs.push(m + s);
  }
  const scene = new Scene(
    pad(extent(steps), 0.02),
    pad(extent([...lows, ...highs, 0])),
    title,
    "step",
    yLabel,
  );
  if (recipe.inputs.length > 1) scene.band(steps, lows, highs, PALETTE[0]);
  scene.curve(steps, means, PALETTE[0], valueColumn);
  scene.legend([[`${valueColumn} (mean of ${recipe.inputs.length})`, PALETTE[0]]]);
  return scene;
}

export function renderFigure(recipe: FigureRecipe): string {
  switch (recipe.kind) {
    case "policy_overlay":
      return policyOverlay(recipe).render();
    case "bne_strategies":
      return bneStrategies(recipe).render();
    case "approx_ratio":
      return approxRatio(recipe).render();
    case "regret":
      return replicaBandFigure(
        recipe, "cum_surrogate_regret", "Cumulative regret", "regret",
      ).render();
    case "distance":
      return replicaBandFigure(
        recipe, "l2_to_gmax", "Distance to the equilibrium profile", "L2 distance",
      ).render();
    default:
      throw new Error(`unknown figure kind '${recipe.kind}'`);
  }
}

export function renderToFile(recipe: FigureRecipe): void {
  writeFileSync(recipe.output, renderFigure(recipe) + "\n", "utf8");
}
