// Slider panel built from the served ControlSpecs. Values move on the
// (lo, step, hi) grid; out-of-range manual entries are blocked before any
// request goes out, and server rejections land inline on the row that
// caused them.

import { ControlSpec, formatValue, snapToGrid } from "./wire";
import { ApiError } from "./api";

export interface ControlsHooks {
  setParams(params: Record<string, number>): Promise<unknown>;
  run(): void;
  pause(): void;
  reset(): void;
}

export interface ControlRow {
  spec: ControlSpec;
  slider: HTMLInputElement;
  entry: HTMLInputElement;
  valueLabel: HTMLSpanElement;
  error: HTMLSpanElement;
  accepted: number;
}

export class ControlPanel {
  readonly rows = new Map<string, ControlRow>();
  readonly buttons: { run: HTMLButtonElement; pause: HTMLButtonElement; reset: HTMLButtonElement };

  constructor(
    root: HTMLElement,
    specs: ControlSpec[],
    private hooks: ControlsHooks,
  ) {
    root.textContent = "";

    const toolbar = document.createElement("div");
    toolbar.className = "toolbar";
    const mkButton = (name: "run" | "pause" | "reset") => {
      const b = document.createElement("button");
      b.textContent = name;
      b.className = name;
      b.addEventListener("click", () => this.hooks[name]());
      toolbar.appendChild(b);
      return b;
    };
    this.buttons = { run: mkButton("run"), pause: mkButton("pause"), reset: mkButton("reset") };
    root.appendChild(toolbar);

    for (const spec of specs) root.appendChild(this.buildRow(spec));
  }

  private buildRow(spec: ControlSpec): HTMLElement {
    const [lo, step, hi] = spec.range;
    const row = document.createElement("div");
    row.className = "ctl-row";
    row.dataset.key = spec.key;

    const label = document.createElement("label");
    label.textContent = spec.key;
    if (spec.structural) {
      const hint = document.createElement("span");
      hint.className = "ctl-hint";
      hint.textContent = " (applies on reset)";
      label.appendChild(hint);
    }
    row.appendChild(label);

    const widgets = document.createElement("div");
    widgets.className = "widgets";

    const slider = document.createElement("input");
    slider.type = "range";
    slider.className = "ctl-slider";
    slider.dataset.key = spec.key;
    slider.min = String(lo);
    slider.max = String(hi);
    slider.step = String(step);

    const entry = document.createElement("input");
    entry.type = "number";
    entry.className = "ctl-entry";
    entry.dataset.key = spec.key;
    entry.min = String(lo);
    entry.max = String(hi);
    entry.step = String(step);

    const valueLabel = document.createElement("span");
    valueLabel.className = "ctl-value";

    const error = document.createElement("span");
    error.className = "ctl-error";

    widgets.appendChild(slider);
    widgets.appendChild(entry);
    widgets.appendChild(valueLabel);
    row.appendChild(widgets);
    row.appendChild(error);

    const initial = typeof spec.value === "number" ? spec.value : lo;
    const ctl: ControlRow = { spec, slider, entry, valueLabel, error, accepted: initial };
    this.rows.set(spec.key, ctl);
    this.display(ctl, initial);

    slider.addEventListener("input", () => {
      const snapped = snapToGrid(spec.range, slider.valueAsNumber);
      if (snapped !== null) valueLabel.textContent = formatValue(spec.range, snapped);
    });
    slider.addEventListener("change", () => this.submit(ctl, slider.valueAsNumber));
    entry.addEventListener("change", () => this.submit(ctl, entry.valueAsNumber));

    return row;
  }

  private display(ctl: ControlRow, value: number): void {
    ctl.slider.value = String(value);
    ctl.entry.value = String(value);
    ctl.valueLabel.textContent = formatValue(ctl.spec.range, value);
  }

  private submit(ctl: ControlRow, raw: number): void {
    const snapped = snapToGrid(ctl.spec.range, raw);
    if (snapped === null) {
      const [lo, , hi] = ctl.spec.range;
      ctl.error.textContent = `out of range [${lo}, ${hi}]`;
      this.display(ctl, ctl.accepted);
      return;
    }
    ctl.error.textContent = "";
    this.hooks
      .setParams({ [ctl.spec.key]: snapped })
      .then(() => {
        ctl.accepted = snapped;
        this.display(ctl, snapped);
      })
      .catch((err: unknown) => {
        ctl.error.textContent = err instanceof ApiError ? err.detail : String(err);
        this.display(ctl, ctl.accepted);
      });
  }

  /** Refresh rows from the session's accepted parameter values. */
  setValues(params: Record<string, unknown>): void {
    for (const ctl of this.rows.values()) {
      const value = params[ctl.spec.key];
      if (typeof value === "number") {
        ctl.accepted = value;
        ctl.error.textContent = "";
        this.display(ctl, value);
      }
    }
  }
}
