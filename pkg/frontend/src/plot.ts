// Live line chart on a plain canvas: one polyline per label, axes autoscale
// to the data so far. The values drawn are exactly the streamed plot points;
// the panel keeps the arrays it last rendered so tests (and the legend) can
// read back what is on screen.

export const PALETTE = ["#2666cf", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export interface ChartData {
  ticks: number[];
  series: Record<string, number[]>;
}

interface Scale {
  x0: number;
  x1: number;
  y0: number;
  y1: number;
}

function dataRange(data: ChartData): Scale {
  let y0 = Infinity;
  let y1 = -Infinity;
  for (const values of Object.values(data.series)) {
    for (const v of values) {
      if (v < y0) y0 = v;
      if (v > y1) y1 = v;
    }
  }
  if (y0 === Infinity) {
    y0 = 0;
    y1 = 1;
  }
  if (y1 - y0 < 1e-9) {
    // flat series still need a visible band
    y0 -= 0.05;
    y1 += 0.05;
  }
  const x1 = data.ticks.length > 0 ? Math.max(data.ticks[data.ticks.length - 1], 1) : 1;
  return { x0: 0, x1, y0, y1 };
}

export class PlotPanel {
  /** exact copy of the data used in the most recent render */
  lastDrawn: ChartData = { ticks: [], series: {} };
  colors: Record<string, string> = {};

  constructor(
    private canvas: HTMLCanvasElement,
    private legend?: HTMLElement,
  ) {}

  private assignColors(labels: string[]): void {
    labels.forEach((label, i) => {
      this.colors[label] ??= PALETTE[i % PALETTE.length];
    });
  }

  render(data: ChartData): void {
    const ctx = this.canvas.getContext("2d");
    if (ctx === null) return;
    const w = this.canvas.width;
    const h = this.canvas.height;
    const labels = Object.keys(data.series);
    this.assignColors(labels);

    this.lastDrawn = {
      ticks: [...data.ticks],
      series: Object.fromEntries(labels.map((l) => [l, [...data.series[l]]])),
    };

    ctx.clearRect(0, 0, w, h);
    ctx.fillStyle = "#ffffff";
    ctx.fillRect(0, 0, w, h);

    const mL = 44;
    const mR = 10;
    const mT = 10;
    const mB = 26;
    const plotW = w - mL - mR;
    const plotH = h - mT - mB;
    const { x0, x1, y0, y1 } = dataRange(data);
    const px = (t: number) => mL + ((t - x0) / (x1 - x0)) * plotW;
    const py = (v: number) => mT + plotH - ((v - y0) / (y1 - y0)) * plotH;

    // frame + a handful of y gridlines with tick labels
    ctx.strokeStyle = "#d8d8d4";
    ctx.lineWidth = 1;
    ctx.strokeRect(mL, mT, plotW, plotH);
    ctx.fillStyle = "#6e7781";
    ctx.font = "10px sans-serif";
    ctx.textAlign = "right";
    ctx.textBaseline = "middle";
    const yTicks = 4;
    for (let i = 0; i <= yTicks; i++) {
      const v = y0 + ((y1 - y0) * i) / yTicks;
      const y = py(v);
      if (i > 0 && i < yTicks) {
        ctx.beginPath();
        ctx.moveTo(mL, y);
        ctx.lineTo(mL + plotW, y);
        ctx.stroke();
      }
      ctx.fillText(v.toFixed(2), mL - 4, y);
    }
    ctx.textAlign = "center";
    ctx.textBaseline = "top";
    ctx.fillText("0", px(x0), mT + plotH + 4);
    ctx.fillText(String(x1), px(x1), mT + plotH + 4);

    for (const label of labels) {
      const values = data.series[label];
      if (values.length === 0) continue;
      ctx.strokeStyle = this.colors[label];
      ctx.lineWidth = 1.5;
      ctx.beginPath();
      values.forEach((v, i) => {
        const x = px(data.ticks[i]);
        const y = py(v);
        if (i === 0) ctx.moveTo(x, y);
        else ctx.lineTo(x, y);
      });
      ctx.stroke();
    }

    this.renderLegend(labels, data);
  }

  private renderLegend(labels: string[], data: ChartData): void {
    if (this.legend === undefined) return;
    this.legend.textContent = "";
    for (const label of labels) {
      const values = data.series[label];
      const item = document.createElement("span");
      item.className = "item";
      const swatch = document.createElement("span");
      swatch.className = "swatch";
      swatch.style.background = this.colors[label];
      item.appendChild(swatch);
      const latest = values.length > 0 ? values[values.length - 1].toFixed(3) : "—";
      item.appendChild(document.createTextNode(`${label}: ${latest}`));
      this.legend.appendChild(item);
    }
  }
}
