// Typed view of the steering service's JSON wire schema (v: 1). The client
// consumes these payloads verbatim; nothing here computes model dynamics.

export const WIRE_VERSION = 1;

/** (lo, step, hi) slider grid, exactly as served. */
export type SliderRange = [number, number, number];

export interface ControlSpec {
  key: string;
  widget: string;
  range: SliderRange;
  value?: number;
  structural: boolean;
}

export interface ModelInfo {
  name: string;
  params: Record<string, unknown>;
  controls: ControlSpec[];
  frames: number;
}

export interface PlotSpec {
  label: string;
  reducer: string;
}

export interface SessionInfo {
  v: number;
  id: string;
  model: string;
  status: string;
  tick: number;
  epoch: number;
  seed: number;
  frames: number;
  params: Record<string, unknown>;
  staged: Record<string, number>;
  controls: ControlSpec[];
  plots: PlotSpec[];
  error?: string;
}

export interface Entity {
  id: number;
  x: number;
  y: number;
  z?: number;
  shape: string;
  color: string;
  orientation: number;
  size: number;
}

/** One step message: draw list plus one plot point per label. */
export interface StepMessage {
  v: number;
  tick: number;
  bounds: number[];
  entities: Entity[];
  edges?: [number, number][];
  plots: Record<string, number>;
}

/** Sent when the session re-initialised; the epoch's backlog follows. */
export interface ResetMessage {
  v: number;
  type: "reset";
  epoch: number;
}

export type StreamMessage = StepMessage | ResetMessage;

export interface PlotData {
  v: number;
  ticks: number[];
  series: Record<string, number[]>;
}

export class WireError extends Error {}

function versioned(raw: unknown, what: string): Record<string, unknown> {
  if (typeof raw !== "object" || raw === null) {
    throw new WireError(`${what}: expected an object`);
  }
  const obj = raw as Record<string, unknown>;
  if (obj.v !== WIRE_VERSION) {
    throw new WireError(`${what}: unsupported wire version ${String(obj.v)}`);
  }
  return obj;
}

export function isReset(msg: StreamMessage): msg is ResetMessage {
  return (msg as ResetMessage).type === "reset";
}

export function parseStreamMessage(text: string): StreamMessage {
  const obj = versioned(JSON.parse(text), "stream message");
  if (obj.type === "reset") {
    if (typeof obj.epoch !== "number") {
      throw new WireError("reset message without an epoch");
    }
    return obj as unknown as ResetMessage;
  }
  if (typeof obj.tick !== "number" || !Array.isArray(obj.entities)) {
    throw new WireError("step message needs tick and entities");
  }
  if (typeof obj.plots !== "object" || obj.plots === null) {
    throw new WireError("step message needs a plots map");
  }
  return obj as unknown as StepMessage;
}

export function parseModelList(raw: unknown): ModelInfo[] {
  const obj = versioned(raw, "model list");
  if (!Array.isArray(obj.models)) throw new WireError("model list without models");
  return obj.models as ModelInfo[];
}

export function parseSessionInfo(raw: unknown): SessionInfo {
  const obj = versioned(raw, "session info");
  if (typeof obj.id !== "string" || !Array.isArray(obj.controls)) {
    throw new WireError("session info needs id and controls");
  }
  return obj as unknown as SessionInfo;
}

export function parsePlotData(raw: unknown): PlotData {
  const obj = versioned(raw, "plot data");
  if (!Array.isArray(obj.ticks) || typeof obj.series !== "object" || obj.series === null) {
    throw new WireError("plot data needs ticks and series");
  }
  return obj as unknown as PlotData;
}

// -- slider grid helpers ----------------------------------------------------

/**
 * Snap a requested value onto the slider grid, mirroring how the server
 * validates it. Returns null when the value is out of range — the caller
 * blocks the request instead of sending a value the server would reject.
 * Integer grids stay integers; float grids are scrubbed of step noise so a
 * slider at a grid point sends the exact grid value.
 */
export function snapToGrid(range: SliderRange, raw: number): number | null {
  const [lo, step, hi] = range;
  if (!Number.isFinite(raw) || raw < lo || raw > hi) return null;
  const k = Math.round((raw - lo) / step);
  const value = lo + k * step;
  if (Number.isInteger(lo) && Number.isInteger(step)) return Math.round(value);
  return Math.min(Number(value.toFixed(12)), hi);
}

/** Decimal places needed to display values on this step grid. */
export function stepDecimals(step: number): number {
  const text = String(step);
  const dot = text.indexOf(".");
  return dot === -1 ? 0 : text.length - dot - 1;
}

export function formatValue(range: SliderRange, value: number): string {
  const digits = Math.max(stepDecimals(range[0]), stepDecimals(range[1]));
  return digits === 0 ? String(value) : value.toFixed(digits);
}
