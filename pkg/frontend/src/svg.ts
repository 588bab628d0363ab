/** Minimal SVG chart scene: fixed canvas, linear scales, tagged elements.
 *
 * Every visual element carries a class (curve, bar, band, errbar, stem)
 * so tests can count objects in the saved file instead of comparing
 * pixels.
 */

export const WIDTH = 720;
export const HEIGHT = 440;
const MARGIN = { left: 64, right: 16, top: 28, bottom: 46 };

export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b", "#e377c2", "#17becf",
];

export interface Range {
  min: number;
  max: number;
}

export function extent(values: number[]): Range {
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      if (v < min) min = v;
      if (v > max) max = v;
    }
  }
  if (!Number.isFinite(min)) throw new Error("no finite values to scale");
  if (min === max) {
    min -= 1;
    max += 1;
  }
  return { min, max };
}

export function pad(range: Range, fraction = 0.05): Range {
  const span = range.max - range.min;
  return { min: range.min - fraction * span, max: range.max + fraction * span };
}

export class Scene {
  private parts: string[] = [];
  constructor(
    readonly x: Range,
    readonly y: Range,
    readonly title: string,
    readonly xLabel: string,
    readonly yLabel: string,
  ) {}

  sx(v: number): number {
    const w = WIDTH - MARGIN.left - MARGIN.right;
    return MARGIN.left + ((v - this.x.min) / (this.x.max - this.x.min)) * w;
  }

  sy(v: number): number {
    const h = HEIGHT - MARGIN.top - MARGIN.bottom;
    return HEIGHT - MARGIN.bottom - ((v - this.y.min) / (this.y.max - this.y.min)) * h;
  }

  private fmt(v: number): string {
    return Number.isInteger(v) ? String(v) : v.toPrecision(4);
  }

  curve(xs: number[], ys: number[], color: string, label = ""): void {
    const points = xs
      .map((x, i) => [this.sx(x), this.sy(ys[i])])
      .filter(([, py]) => Number.isFinite(py));
    if (points.length === 0) return;
    const d =
      `M ${points[0][0].toFixed(2)} ${points[0][1].toFixed(2)} ` +
      points.slice(1).map(([px, py]) => `L ${px.toFixed(2)} ${py.toFixed(2)}`).join(" ");
    this.parts.push(
      `<path class="curve" data-label="${label}" d="${d}" fill="none" stroke="${color}" stroke-width="1.6"/>`,
    );
  }

  band(xs: number[], low: number[], high: number[], color: string): void {
    const up = xs.map((x, i) => `${this.sx(x).toFixed(2)} ${this.sy(high[i]).toFixed(2)}`);
    const down = xs
      .slice()
      .reverse()
      .map((x, i) => {
        const j = xs.length - 1 - i;
        return `${this.sx(x).toFixed(2)} ${this.sy(low[j]).toFixed(2)}`;
      });
    this.parts.push(
      `<path class="band" d="M ${up.join(" L ")} L ${down.join(" L ")} Z" ` +
        `fill="${color}" fill-opacity="0.18" stroke="none"/>`,
    );
  }

  bars(xs: number[], heights: number[], width: number, color: string): void {
    const y0 = this.sy(Math.max(this.y.min, 0));
    for (let i = 0; i < xs.length; i++) {
      const px = this.sx(xs[i] - width / 2);
      const pw = Math.max(0.5, this.sx(xs[i] + width / 2) - px);
      const py = this.sy(heights[i]);
      if (!Number.isFinite(py)) continue;
      this.parts.push(
        `<rect class="bar" x="${px.toFixed(2)}" y="${Math.min(py, y0).toFixed(2)}" ` +
          `width="${pw.toFixed(2)}" height="${Math.abs(y0 - py).toFixed(2)}" ` +
          `fill="${color}" fill-opacity="0.55"/>`,
      );
    }
  }

  errorBar(x: number, center: number, halfWidth: number, color: string): void {
    const px = this.sx(x);
    const yLow = this.sy(center - halfWidth);
    const yHigh = this.sy(center + halfWidth);
    this.parts.push(
      `<line class="errbar" x1="${px.toFixed(2)}" x2="${px.toFixed(2)}" ` +
        `y1="${yLow.toFixed(2)}" y2="${yHigh.toFixed(2)}" stroke="${color}" stroke-width="1.2"/>`,
      `<line class="errbar-cap" x1="${(px - 3).toFixed(2)}" x2="${(px + 3).toFixed(2)}" ` +
        `y1="${yLow.toFixed(2)}" y2="${yLow.toFixed(2)}" stroke="${color}" stroke-width="1.2"/>`,
      `<line class="errbar-cap" x1="${(px - 3).toFixed(2)}" x2="${(px + 3).toFixed(2)}" ` +
        `y1="${yHigh.toFixed(2)}" y2="${yHigh.toFixed(2)}" stroke="${color}" stroke-width="1.2"/>`,
    );
  }

  stems(xs: number[], ys: number[], color: string): void {
    const y0 = this.sy(Math.max(this.y.min, 0));
    for (let i = 0; i < xs.length; i++) {
      const px = this.sx(xs[i]).toFixed(2);
      this.parts.push(
        `<line class="stem" x1="${px}" x2="${px}" y1="${y0.toFixed(2)}" ` +
          `y2="${this.sy(ys[i]).toFixed(2)}" stroke="${color}" stroke-width="1.5"/>`,
      );
    }
  }

  legend(entries: [string, string][]): void {
    entries.forEach(([label, color], i) => {
      const y = MARGIN.top + 8 + i * 16;
      this.parts.push(
        `<rect class="legend-swatch" x="${WIDTH - 168}" y="${y - 8}" width="12" height="10" fill="${color}"/>`,
        `<text class="legend-text" x="${WIDTH - 150}" y="${y}" font-size="11">${label}</text>`,
      );
    });
  }

  render(): string {
    const axisY = HEIGHT - MARGIN.bottom;
    const ticksX = 6;
    const ticksY = 5;
    const axis: string[] = [
      `<line class="axis" x1="${MARGIN.left}" y1="${axisY}" x2="${WIDTH - MARGIN.right}" y2="${axisY}" stroke="#333"/>`,
      `<line class="axis" x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${axisY}" stroke="#333"/>`,
    ];
    for (let i = 0; i <= ticksX; i++) {
      const v = this.x.min + ((this.x.max - this.x.min) * i) / ticksX;
      const px = this.sx(v).toFixed(2);
      axis.push(
        `<line class="tick" x1="${px}" x2="${px}" y1="${axisY}" y2="${axisY + 4}" stroke="#333"/>`,
        `<text class="tick-label" x="${px}" y="${axisY + 17}" font-size="10" text-anchor="middle">${this.fmt(v)}</text>`,
      );
    }
    for (let i = 0; i <= ticksY; i++) {
      const v = this.y.min + ((this.y.max - this.y.min) * i) / ticksY;
      const py = this.sy(v).toFixed(2);
      axis.push(
        `<line class="tick" x1="${MARGIN.left - 4}" x2="${MARGIN.left}" y1="${py}" y2="${py}" stroke="#333"/>`,
        `<text class="tick-label" x="${MARGIN.left - 7}" y="${py}" font-size="10" text-anchor="end" dominant-baseline="middle">${this.fmt(v)}</text>`,
      );
    }
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      `<text class="title" x="${WIDTH / 2}" y="16" font-size="13" text-anchor="middle">${this.title}</text>`,
      `<text class="x-label" x="${WIDTH / 2}" y="${HEIGHT - 8}" font-size="11" text-anchor="middle">${this.xLabel}</text>`,
      `<text class="y-label" x="14" y="${HEIGHT / 2}" font-size="11" text-anchor="middle" transform="rotate(-90 14 ${HEIGHT / 2})">${this.yLabel}</text>`,
      ...axis,
      ...this.parts,
      "</svg>",
    ].join("\n");
  }
}
