import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { EmptyInput, MissingColumn } from "../src/csv.js";
import { FigureRecipe, renderFigure, renderToFile } from "../src/figures.js";
import { main, parseArgs } from "../src/cli.js";

const DATA = join(__dirname, "..", "testdata");

function count(svg: string, needle: string): number {
  return svg.split(needle).length - 1;
}

const POLICIES = [
  join(DATA, "policy_ell0.006.csv"),
  join(DATA, "policy_ell0.04.csv"),
  join(DATA, "policy_ell0.074.csv"),
];

describe("policy_overlay", () => {
  it("draws the histogram plus one curve per policy file", () => {
    const svg = renderFigure({
      kind: "policy_overlay",
      inputs: POLICIES,
      histogram: join(DATA, "p0.csv"),
      output: "unused.svg",
    });
    expect(count(svg, 'class="curve"')).toBe(POLICIES.length);
    expect(count(svg, 'class="bar"')).toBeGreaterThan(10);
    expect(count(svg, 'class="legend-text"')).toBe(POLICIES.length);
  });

  it("requires the histogram input", () => {
    expect(() =>
      renderFigure({
        kind: "policy_overlay",
        inputs: POLICIES,
        output: "unused.svg",
      }),
    ).toThrow(MissingColumn);
  });

  it("rejects a policy file with wrong columns", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "vector_id,probability\n0,0.5\n");
    expect(() =>
      renderFigure({
        kind: "policy_overlay",
        inputs: [bad],
        histogram: join(DATA, "p0.csv"),
        output: "unused.svg",
      }),
    ).toThrow(MissingColumn);
  });
});

describe("bne_strategies", () => {
  it("draws the policy curve and per-type attack stems", () => {
    const svg = renderFigure({
      kind: "bne_strategies",
      inputs: [join(DATA, "bne_policy.csv"), join(DATA, "bne_attacker.csv")],
      output: "unused.svg",
    });
    expect(count(svg, 'class="curve"')).toBe(1);
    expect(count(svg, 'class="stem"')).toBeGreaterThan(2);
    // game 1 has two attacker types -> policy + 2 legend entries
    expect(count(svg, 'class="legend-text"')).toBe(3);
  });
});

describe("approx_ratio", () => {
  it("draws ratio and hit-rate curves with one error bar per sample size", () => {
    const svg = renderFigure({
      kind: "approx_ratio",
      inputs: [join(DATA, "saa_sweep.csv")],
      output: "unused.svg",
    });
    expect(count(svg, 'class="curve"')).toBe(2);
    expect(count(svg, 'class="errbar"')).toBe(3); // n in {50, 200, 800}
  });
});

describe("regret", () => {
  it("draws a mean curve with a replica band", () => {
    const svg = renderFigure({
      kind: "regret",
      inputs: [0, 1, 2].map((r) => join(DATA, `regret_trace_r${r}.csv`)),
      output: "unused.svg",
    });
    expect(count(svg, 'class="curve"')).toBe(1);
    expect(count(svg, 'class="band"')).toBe(1);
  });

  it("rejects an empty trace", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const empty = join(dir, "empty.csv");
    writeFileSync(empty, "step,cum_surrogate_regret\n");
    expect(() =>
      renderFigure({ kind: "regret", inputs: [empty], output: "unused.svg" }),
    ).toThrow(EmptyInput);
  });
});

describe("distance", () => {
  it("draws the distance curve with a band", () => {
    const svg = renderFigure({
      kind: "distance",
      inputs: [0, 1, 2].map((r) => join(DATA, `distance_r${r}.csv`)),
      output: "unused.svg",
    });
    expect(count(svg, 'class="curve"')).toBe(1);
    expect(count(svg, 'class="band"')).toBe(1);
  });
});

describe("all five kinds render from the golden artifacts", () => {
  const dir = mkdtempSync(join(tmpdir(), "plots-out-"));
  const recipes: FigureRecipe[] = [
    {
      kind: "policy_overlay",
      inputs: POLICIES,
      histogram: join(DATA, "p0.csv"),
      output: join(dir, "overlay.svg"),
    },
    {
      kind: "bne_strategies",
      inputs: [join(DATA, "bne_policy.csv"), join(DATA, "bne_attacker.csv")],
      output: join(dir, "bne.svg"),
    },
    {
      kind: "approx_ratio",
      inputs: [join(DATA, "saa_sweep.csv")],
      output: join(dir, "ratio.svg"),
    },
    {
      kind: "regret",
      inputs: [0, 1, 2].map((r) => join(DATA, `regret_trace_r${r}.csv`)),
      output: join(dir, "regret.svg"),
    },
    {
      kind: "distance",
      inputs: [0, 1, 2].map((r) => join(DATA, `distance_r${r}.csv`)),
      output: join(dir, "distance.svg"),
    },
  ];
  for (const recipe of recipes) {
    it(`renders ${recipe.kind}`, () => {
      renderToFile(recipe);
      const svg = readFileSync(recipe.output, "utf8");
      expect(svg.startsWith("<svg")).toBe(true);
      expect(count(svg, 'class="axis"')).toBe(2);
    });
  }
});

describe("cli", () => {
  it("parses a render invocation", () => {
    const recipe = parseArgs([
      "render", "--kind", "regret", "--in", "a.csv", "b.csv", "--out", "fig.svg",
    ]);
    expect(recipe.kind).toBe("regret");
    expect(recipe.inputs).toEqual(["a.csv", "b.csv"]);
    expect(recipe.output).toBe("fig.svg");
  });

  it("renders end to end and reports input errors as exit 2", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-cli-"));
    const out = join(dir, "fig.svg");
    const code = main([
      "render", "--kind", "approx_ratio",
      "--in", join(DATA, "saa_sweep.csv"), "--out", out,
    ]);
    expect(code).toBe(0);
    expect(readFileSync(out, "utf8")).toContain("</svg>");
    expect(main(["render", "--kind", "regret", "--in", "--out", out])).toBe(2);
  });
});
