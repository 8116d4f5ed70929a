// Canvas 2D drawing of draw-list messages. The layout mirrors the service's
// offline renderer: 4%-margin fit of the world bounds, y up, arrows as
// rotated isoceles triangles, edges beneath nodes. 3D worlds are drawn as an
// orthographic projection with a selectable depth axis, far-to-near so nearer
// glyphs paint on top.

import { Entity, StepMessage } from "./wire";

export type DepthAxis = "x" | "y" | "z";

export interface ViewOptions {
  /** client-side glyph size multiplier (the size slider) */
  glyphScale: number;
  /** which axis is depth when bounds are 3D; "z" shows the x-y plane */
  depthAxis: DepthAxis;
}

export const DEFAULT_VIEW: ViewOptions = { glyphScale: 1.0, depthAxis: "z" };

const AXES: Record<DepthAxis, [number, number]> = {
  x: [1, 2],
  y: [0, 2],
  z: [0, 1],
};

class FrameLayout {
  ax: number;
  ay: number;
  depthAxis: DepthAxis | null;
  worldW: number;
  worldH: number;
  margin: number;
  scale: number;
  width: number;
  height: number;
  glyphScale: number;

  constructor(bounds: number[], width: number, opts: ViewOptions) {
    if (bounds.length === 3) {
      [this.ax, this.ay] = AXES[opts.depthAxis];
      this.depthAxis = opts.depthAxis;
    } else {
      this.ax = 0;
      this.ay = 1;
      this.depthAxis = null;
    }
    this.worldW = Number(bounds[this.ax]);
    this.worldH = Number(bounds[this.ay]);
    this.margin = 0.04 * width;
    this.scale = (width - 2 * this.margin) / this.worldW;
    this.width = width;
    this.height = Math.round(2 * this.margin + this.worldH * this.scale);
    this.glyphScale = opts.glyphScale;
  }

  toCanvas(ent: Entity): [number, number] {
    const coords = [ent.x, ent.y, ent.z ?? 0];
    return [
      this.margin + coords[this.ax] * this.scale,
      this.height - this.margin - coords[this.ay] * this.scale,
    ];
  }

  radius(ent: Entity): number {
    return ent.size * this.scale * this.glyphScale;
  }

  sorted(entities: Entity[]): Entity[] {
    const depth = this.depthAxis;
    if (depth === null) return entities;
    return [...entities].sort((a, b) => {
      const da = (a[depth] ?? 0) - (b[depth] ?? 0);
      return da !== 0 ? da : a.id - b.id;
    });
  }
}

function arrowPath(
  ctx: CanvasRenderingContext2D,
  cx: number,
  cy: number,
  r: number,
  orientation: number,
): void {
  // orientation 0 points up on the canvas (world +y); canvas y grows down,
  // so the flip is folded into the rotation
  const local: [number, number][] = [
    [0, 1.6 * r],
    [-0.9 * r, -1.2 * r],
    [0, -0.6 * r],
    [0.9 * r, -1.2 * r],
  ];
  const sin = Math.sin(orientation);
  const cos = Math.cos(orientation);
  ctx.beginPath();
  local.forEach(([lx, ly], i) => {
    const px = cx + lx * cos - ly * sin;
    const py = cy - (lx * sin + ly * cos);
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  ctx.closePath();
}

/**
 * Draw one step message onto the canvas, resizing it to fit the world's
 * aspect ratio at the given pixel width. A null message just clears.
 */
export function drawFrame(
  canvas: HTMLCanvasElement,
  msg: StepMessage | null,
  width: number,
  opts: ViewOptions = DEFAULT_VIEW,
): void {
  const ctx = canvas.getContext("2d");
  if (ctx === null) return;
  if (msg === null) {
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    return;
  }

  const layout = new FrameLayout(msg.bounds, width, opts);
  if (canvas.width !== layout.width) canvas.width = layout.width;
  if (canvas.height !== layout.height) canvas.height = layout.height;

  ctx.clearRect(0, 0, layout.width, layout.height);
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, layout.width, layout.height);
  ctx.strokeStyle = "#888888";
  ctx.lineWidth = 1;
  ctx.strokeRect(
    layout.margin,
    layout.margin,
    layout.worldW * layout.scale,
    layout.worldH * layout.scale,
  );

  // edges first, beneath the nodes
  if (msg.edges && msg.edges.length > 0) {
    const byId = new Map<number, Entity>();
    for (const ent of msg.entities) byId.set(ent.id, ent);
    ctx.strokeStyle = "#999999";
    ctx.lineWidth = 0.6;
    ctx.beginPath();
    for (const [u, v] of msg.edges) {
      const a = byId.get(u);
      const b = byId.get(v);
      if (a === undefined || b === undefined) continue;
      const [ax, ay] = layout.toCanvas(a);
      const [bx, by] = layout.toCanvas(b);
      ctx.moveTo(ax, ay);
      ctx.lineTo(bx, by);
    }
    ctx.stroke();
  }

  for (const ent of layout.sorted(msg.entities)) {
    const [cx, cy] = layout.toCanvas(ent);
    const r = layout.radius(ent);
    ctx.fillStyle = ent.color;
    if (ent.shape === "arrow") {
      arrowPath(ctx, cx, cy, r, ent.orientation);
      ctx.fill();
    } else {
      ctx.beginPath();
      ctx.arc(cx, cy, r, 0, 2 * Math.PI);
      ctx.fill();
      ctx.strokeStyle = "#333333";
      ctx.lineWidth = 0.4;
      ctx.stroke();
    }
  }
}
