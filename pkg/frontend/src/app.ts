// Wires the pieces together: model picker, session lifecycle, control panel,
// world canvas and live plots. All state shown is a projection of server
// messages plus the two local view options (glyph scale, projection plane);
// the client never steps a model itself.

import { ApiError, Client, CreateBody } from "./api";
import { ControlPanel } from "./controls";
import { DEFAULT_VIEW, DepthAxis, ViewOptions, drawFrame } from "./draw";
import { PlotPanel } from "./plot";
import { SessionStream, StreamStatus } from "./stream";
import { SessionView } from "./state";
import { ModelInfo, SessionInfo, StreamMessage } from "./wire";

const FRAME_WIDTH = 560;

const raf: (cb: () => void) => void =
  typeof requestAnimationFrame === "function"
    ? (cb) => requestAnimationFrame(() => cb())
    : (cb) => void setTimeout(cb, 16);

interface AppElements {
  modelSelect: HTMLSelectElement;
  newSession: HTMLButtonElement;
  status: HTMLSpanElement;
  controls: HTMLDivElement;
  appError: HTMLDivElement;
  frame: HTMLCanvasElement;
  glyphScale: HTMLInputElement;
  axisWrap: HTMLLabelElement;
  axisSelect: HTMLSelectElement;
  plotCanvas: HTMLCanvasElement;
  legend: HTMLDivElement;
}

function buildSkeleton(root: HTMLElement): AppElements {
  root.innerHTML = `
    <header>
      <h1>abmkit steering</h1>
      <select id="model-select"></select>
      <button id="new-session">new session</button>
      <span class="status" id="status">no session</span>
    </header>
    <main>
      <section class="pane" id="controls-pane">
        <h2>controls</h2>
        <div id="controls"></div>
        <div id="app-error" class="err"></div>
      </section>
      <section class="pane" id="view-pane">
        <h2>world</h2>
        <canvas id="frame" width="${FRAME_WIDTH}" height="${FRAME_WIDTH}"></canvas>
        <div class="view-opts">
          <label>size <input id="glyph-scale" type="range" min="0.2" max="4" step="0.1" value="1"></label>
          <label id="axis-wrap" hidden>plane
            <select id="axis-select">
              <option value="z">x–y</option>
              <option value="y">x–z</option>
              <option value="x">y–z</option>
            </select>
          </label>
        </div>
      </section>
      <section class="pane" id="plot-pane">
        <h2>plots</h2>
        <canvas id="plot" width="340" height="240"></canvas>
        <div class="legend" id="legend"></div>
      </section>
    </main>`;
  const get = <T extends HTMLElement>(id: string) => root.querySelector<T>(`#${id}`)!;
  return {
    modelSelect: get<HTMLSelectElement>("model-select"),
    newSession: get<HTMLButtonElement>("new-session"),
    status: get<HTMLSpanElement>("status"),
    controls: get<HTMLDivElement>("controls"),
    appError: get<HTMLDivElement>("app-error"),
    frame: get<HTMLCanvasElement>("frame"),
    glyphScale: get<HTMLInputElement>("glyph-scale"),
    axisWrap: get<HTMLLabelElement>("axis-wrap"),
    axisSelect: get<HTMLSelectElement>("axis-select"),
    plotCanvas: get<HTMLCanvasElement>("plot"),
    legend: get<HTMLDivElement>("legend"),
  };
}

export class App {
  readonly client: Client;
  readonly els: AppElements;
  models: ModelInfo[] = [];
  session: SessionInfo | null = null;
  view = new SessionView();
  panel: ControlPanel | null = null;
  plot: PlotPanel;
  viewOpts: ViewOptions = { ...DEFAULT_VIEW };
  streamStatus: StreamStatus = "closed";
  private stream: SessionStream | null = null;
  private rafPending = false;

  constructor(root: HTMLElement, base = "") {
    this.client = new Client(base);
    this.els = buildSkeleton(root);
    this.plot = new PlotPanel(this.els.plotCanvas, this.els.legend);

    this.els.newSession.addEventListener("click", () => {
      void this.createSession(this.els.modelSelect.value).catch((err: unknown) => {
        this.els.appError.textContent = String(err);
      });
    });
    this.els.glyphScale.addEventListener("input", () => {
      this.viewOpts.glyphScale = this.els.glyphScale.valueAsNumber;
      this.scheduleRender();
    });
    this.els.axisSelect.addEventListener("change", () => {
      this.viewOpts.depthAxis = this.els.axisSelect.value as DepthAxis;
      this.scheduleRender();
    });
  }

  /** Fetch the model gallery and populate the picker. */
  static async boot(root: HTMLElement, base = ""): Promise<App> {
    const app = new App(root, base);
    app.models = await app.client.models();
    for (const model of app.models) {
      const opt = document.createElement("option");
      opt.value = model.name;
      opt.textContent = model.name;
      app.els.modelSelect.appendChild(opt);
    }
    return app;
  }

  async createSession(
    name: string,
    opts: Omit<CreateBody, "model"> = {},
  ): Promise<SessionInfo> {
    this.stream?.close();
    const info = await this.client.createSession({ model: name, ...opts });
    this.session = info;
    this.view = new SessionView();
    this.els.appError.textContent = "";
    this.panel = new ControlPanel(this.els.controls, info.controls, {
      setParams: (params) => this.client.setParams(info.id, params),
      run: () => this.run(),
      pause: () => this.pause(),
      reset: () => this.reset(),
    });
    this.stream = new SessionStream(this.client.streamUrl(info.id), {
      onMessage: (msg) => this.onStreamMessage(msg),
      onStatus: (status) => {
        this.streamStatus = status;
        this.updateStatus();
      },
      sessionExists: () =>
        this.client.sessionInfo(info.id).then(
          () => true,
          (err: unknown) => !(err instanceof ApiError && err.status === 404),
        ),
    });
    this.updateStatus();
    return info;
  }

  private onStreamMessage(msg: StreamMessage): void {
    if (this.view.applyMessage(msg) !== "stale") this.scheduleRender();
  }

  run(): void {
    this.lifecycle(this.client.run(this.session!.id));
  }

  pause(): void {
    this.lifecycle(this.client.pause(this.session!.id));
  }

  reset(): void {
    this.lifecycle(
      this.client.reset(this.session!.id).then((info) => {
        this.session = info;
        this.panel?.setValues(info.params);
      }),
    );
  }

  private lifecycle(call: Promise<unknown>): void {
    call
      .then(() => {
        this.els.appError.textContent = "";
      })
      .catch((err: unknown) => {
        this.els.appError.textContent = String(err);
      });
  }

  private scheduleRender(): void {
    if (this.rafPending) return;
    this.rafPending = true;
    raf(() => {
      this.rafPending = false;
      this.renderNow();
    });
  }

  /** Draw the newest frame and the full plot history (frames between two
   *  renders are skipped; plot points are all there from the projection). */
  renderNow(): void {
    drawFrame(this.els.frame, this.view.frame, FRAME_WIDTH, this.viewOpts);
    this.plot.render({ ticks: this.view.ticks, series: this.view.series });
    this.els.axisWrap.hidden = !(this.view.frame && this.view.frame.bounds.length === 3);
    this.updateStatus();
  }

  private updateStatus(): void {
    if (this.session === null) {
      this.els.status.textContent = "no session";
      return;
    }
    this.els.status.textContent =
      `${this.session.id} · ${this.session.model}` +
      ` · tick ${this.view.tick < 0 ? "—" : this.view.tick}` +
      ` · stream ${this.streamStatus}`;
  }

  close(): void {
    this.stream?.close();
  }
}
