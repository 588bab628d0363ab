#!/usr/bin/env node
import { EmptyInput, MissingColumn } from "./csv.js";
import { FIGURE_KINDS, FigureKind, FigureRecipe, renderToFile } from "./figures.js";

const USAGE = `usage: advgame-plots render --kind <kind> --in <csv...> [--hist <csv>] --out <file.svg>

kinds: ${FIGURE_KINDS.join(", ")}

  policy_overlay   --hist p0.csv --in policy_a.csv policy_b.csv ...
  bne_strategies   --in policy.csv attacker.csv
  approx_ratio     --in saa_sweep.csv
  regret           --in regret_trace_r0.csv regret_trace_r1.csv ...
  distance         --in distance_r0.csv distance_r1.csv ...`;

export function parseArgs(argv: string[]): FigureRecipe {
  if (argv[0] !== "render") throw new Error(USAGE);
  let kind: string | undefined;
  let out: string | undefined;
  let hist: string | undefined;
  const inputs: string[] = [];
  let collecting = false;
  for (let i = 1; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--kind") {
      kind = argv[++i];
      collecting = false;
    } else if (arg === "--out") {
      out = argv[++i];
      collecting = false;
    } else if (arg === "--hist") {
      hist = argv[++i];
      collecting = false;
    } else if (arg === "--in") {
      collecting = true;
    } else if (collecting && !arg.startsWith("--")) {
      inputs.push(arg);
    } else {
      throw new Error(`unexpected argument '${arg}'\n${USAGE}`);
    }
  }
  if (!kind || !out) throw new Error(USAGE);
  if (!FIGURE_KINDS.includes(kind as FigureKind)) {
    throw new Error(`unknown kind '${kind}'\n${USAGE}`);
  }
  return { kind: kind as FigureKind, inputs, histogram: hist, output: out };
}

export function main(argv: string[]): number {
  try {
    const recipe = parseArgs(argv);
    renderToFile(recipe);
    console.log(`wrote ${recipe.output}`);
    return 0;
  } catch (err) {
    if (err instanceof MissingColumn || err instanceof EmptyInput) {
      console.error(`input error: ${(err as Error).message}`);
      return 2;
    }
    console.error((err as Error).message);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
