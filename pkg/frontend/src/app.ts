// DOM shell around the canvas scene. The app is a thin client: every pixel
// it paints comes from a service payload, it never recomputes layout or
// geometry, and all state changes go through the HTTP API.

import { Api, ApiError } from "./api.js";
import { DoiModel } from "./doi.js";
import { Playback } from "./playback.js";
import {
  buildScene,
  executeScene,
  hitTest,
  NorthCorner,
  RenderableDoc,
  Scene,
  SceneError,
} from "./scene.js";
import type { BundleDoc, GeometryDoc, TransitionFrameDoc } from "./types.js";

export interface AppDeps {
  api: Api;
  /** Monotone clock in seconds. */
  now(): number;
  /** Schedule cb at the next display refresh; returns a cancel. */
  schedule(cb: () => void): () => void;
  screenPx?: number;
  northCorner?: NorthCorner;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Pick the keyframe geometry a transition frame points at. */
export function frameGeometry(
  frame: TransitionFrameDoc,
  bundle: BundleDoc | null,
): GeometryDoc | null {
  const ref = frame.geometry;
  if (!ref || !bundle) return null;
  if (ref.section === "morphIn") return bundle.morphIn[ref.index]?.geometry ?? null;
  if (ref.section === "morphOut") return bundle.morphOut[ref.index]?.geometry ?? null;
  return bundle.zoom.geometry;
}

export class App {
  lastScene: Scene | null = null;
  transitioning = false;
  currentVertex: string | null = null;

  private api: Api;
  private canvas!: HTMLCanvasElement;
  private ctx: CanvasRenderingContext2D | null = null;
  private banner!: HTMLElement;
  private hover!: HTMLElement;
  private currentLabel!: HTMLElement;
  private historyList!: HTMLOListElement;
  private doiSection!: HTMLElement;
  private doiErrorBox!: HTMLElement;
  private doiModel: DoiModel | null = null;
  private playback: Playback | null = null;
  private lastWork: Promise<void> = Promise.resolve();

  constructor(private readonly deps: AppDeps) {
    this.api = deps.api;
  }

  /** Resolves once the most recently started interaction has settled. */
  idle(): Promise<void> {
    return this.lastWork;
  }

  async init(root: HTMLElement): Promise<void> {
    const doc = root.ownerDocument;
    root.textContent = "";

    const topbar = el(doc, "div", { class: "topbar" });
    topbar.append(el(doc, "span", { class: "title" }, "egomap"));
    this.currentLabel = el(doc, "span", { id: "current", class: "current" });
    topbar.append(this.currentLabel);

    const stage = el(doc, "div", { class: "stage" });
    this.canvas = el(doc, "canvas", { id: "map" });
    this.banner = el(doc, "div", { id: "banner", class: "banner" });
    this.banner.hidden = true;
    this.hover = el(doc, "div", { id: "hover", class: "hover" });
    this.hover.hidden = true;
    stage.append(this.canvas, this.banner, this.hover);

    const panel = el(doc, "aside", { class: "panel" });
    this.doiSection = el(doc, "section", { id: "doi" });
    this.doiSection.append(el(doc, "h2", {}, "Interest"));
    this.doiErrorBox = el(doc, "div", { id: "doi-error", class: "inline-error" });
    this.doiErrorBox.hidden = true;
    const historySection = el(doc, "section", { id: "history-section" });
    historySection.append(el(doc, "h2", {}, "History"));
    this.historyList = el(doc, "ol", { id: "history" });
    historySection.append(this.historyList);
    panel.append(this.doiSection, historySection);

    const main = el(doc, "div", { class: "main" });
    main.append(stage, panel);
    root.append(topbar, main);

    try {
      this.ctx = this.canvas.getContext("2d");
    } catch {
      this.ctx = null; // headless DOM without a raster backend
    }

    this.canvas.addEventListener("click", (ev) => this.onClick(ev as MouseEvent));
    this.canvas.addEventListener("mousemove", (ev) => this.onHover(ev as MouseEvent));
    this.canvas.addEventListener("mouseleave", () => {
      this.hover.hidden = true;
    });

    const [graph, session] = await Promise.all([
      this.api.getGraph(),
      this.api.getSession(),
    ]);
    this.doiModel = new DoiModel(session.doi);
    this.buildDoiPanel();
    this.renderHistory(session.history);
    const start = session.currentVertex ?? graph.vertices[0]?.id;
    if (start === undefined) {
      this.showError(new Error("the graph has no vertices"));
      return;
    }
    await this.showView(start);
  }

  async showView(vertex: string): Promise<void> {
    const view = await this.api.getView(vertex);
    this.currentVertex = view.vertex;
    this.currentLabel.textContent = view.vertex;
    this.render({ frame: view.frame, layout: view.layout, geometry: view.geometry });
  }

  navigate(to: string): Promise<void> {
    if (this.transitioning || to === this.currentVertex || this.currentVertex === null) {
      return this.lastWork;
    }
    const from = this.currentVertex;
    this.transitioning = true;
    const work = (async () => {
      try {
        const td = await this.api.postTransition(from, to);
        let bundle: BundleDoc | null = null;
        if (td.bundleKey) {
          try {
            bundle = await this.api.getBundle(`/api/assets/${td.bundleKey}`);
          } catch {
            bundle = null; // frames still play, just without the basemap
          }
        }
        await new Promise<void>((resolve, reject) => {
          this.playback = new Playback(td.durationS, {
            now: this.deps.now,
            schedule: this.deps.schedule,
            fetchFrame: (t) => this.api.getFrame(td.id, t),
            onFrame: (f) =>
              this.render({
                frame: f.frame,
                layout: f.layout,
                geometry: frameGeometry(f, bundle),
              }),
            onDone: resolve,
            onError: reject,
          });
          this.playback.start();
        });
        await this.showView(to);
        const session = await this.api.getSession();
        this.renderHistory(session.history);
      } catch (err) {
        this.showError(err);
      } finally {
        this.transitioning = false;
        this.playback = null;
      }
    })();
    this.lastWork = work;
    return work;
  }

  private render(payload: RenderableDoc): void {
    try {
      const scene = buildScene(payload, {
        screenPx: this.deps.screenPx ?? 480,
        northCorner: this.deps.northCorner ?? "tr",
      });
      this.lastScene = scene;
      this.banner.hidden = true;
      if (this.canvas.width !== scene.width) this.canvas.width = scene.width;
      if (this.canvas.height !== scene.height) this.canvas.height = scene.height;
      if (this.ctx) executeScene(this.ctx, scene);
    } catch (err) {
      if (err instanceof SceneError) {
        this.showError(new Error(`malformed view payload: ${err.message}`));
      } else {
        throw err;
      }
    }
  }

  private onClick(ev: MouseEvent): void {
    if (this.transitioning || !this.lastScene) return;
    const { x, y } = this.canvasPoint(ev);
    const hit = hitTest(this.lastScene, x, y);
    if (!hit) return;
    if (hit.kind === "vertex") {
      if (hit.vertex === this.currentVertex) return; // clicking the focus is a no-op
      void this.navigate(hit.vertex);
      return;
    }
    // a proxy click travels to its most interesting member
    void this.navigate(hit.vertices[0]);
  }

  private onHover(ev: MouseEvent): void {
    if (!this.lastScene) return;
    const { x, y } = this.canvasPoint(ev);
    const hit = hitTest(this.lastScene, x, y);
    if (hit && hit.kind === "proxy") {
      const order = hit.vertices
        .map((v, i) => ({ v, s: hit.scores[i] ?? 0 }))
        .sort((a, b) => b.s - a.s);
      this.hover.textContent = order.map((o) => o.v).join("\n");
      this.hover.style.left = `${x + 14}px`;
      this.hover.style.top = `${y + 14}px`;
      this.hover.hidden = false;
    } else {
      this.hover.hidden = true;
    }
  }

  private canvasPoint(ev: MouseEvent): { x: number; y: number } {
    const rect = this.canvas.getBoundingClientRect();
    return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
  }

  private buildDoiPanel(): void {
    if (!this.doiModel) return;
    const doc = this.doiSection.ownerDocument;
    for (const fn of this.doiModel.functions()) {
      const row = el(doc, "label", { class: "doi-row" });
      row.append(el(doc, "span", {}, fn));
      const input = el(doc, "input", {
        type: "range",
        min: "0",
        max: "2",
        step: "0.1",
        value: String(this.doiModel.weight(fn)),
        "data-fn": fn,
      });
      input.addEventListener("change", () => {
        this.doiModel!.setWeight(fn, Number(input.value));
        this.lastWork = this.applyDoi();
      });
      row.append(input);
      this.doiSection.append(row);
    }
    const thrRow = el(doc, "label", { class: "doi-row" });
    thrRow.append(el(doc, "span", {}, "threshold"));
    const thr = el(doc, "input", {
      type: "range",
      min: "0",
      max: "1",
      step: "0.05",
      value: String(this.doiModel.getThreshold()),
      "data-fn": "threshold",
    });
    thr.addEventListener("change", () => {
      this.doiModel!.setThreshold(Number(thr.value));
      this.lastWork = this.applyDoi();
    });
    thrRow.append(thr);
    const maxRow = el(doc, "label", { class: "doi-row" });
    maxRow.append(el(doc, "span", {}, "max proxies"));
    const maxIn = el(doc, "input", {
      type: "number",
      min: "1",
      step: "1",
      value: String(this.doiModel.getMaxProxies()),
      "data-fn": "maxProxies",
    });
    maxIn.addEventListener("change", () => {
      this.doiModel!.setMaxProxies(Number(maxIn.value));
      this.lastWork = this.applyDoi();
    });
    maxRow.append(maxIn);
    this.doiSection.append(thrRow, maxRow, this.doiErrorBox);
  }

  private async applyDoi(): Promise<void> {
    if (!this.doiModel) return;
    const problem = this.doiModel.validate();
    if (problem !== null) {
      this.doiErrorBox.textContent = problem;
      this.doiErrorBox.hidden = false;
      return; // blocked before any request leaves the client
    }
    this.doiErrorBox.hidden = true;
    try {
      await this.api.putDoiConfig(this.doiModel.toDoc());
      // proxies refresh in place; this is not a navigation
      if (this.currentVertex !== null) await this.showView(this.currentVertex);
    } catch (err) {
      if (err instanceof ApiError) {
        this.doiErrorBox.textContent = err.detail;
        this.doiErrorBox.hidden = false;
      } else {
        this.showError(err);
      }
    }
  }

  private renderHistory(history: string[]): void {
    this.historyList.textContent = "";
    const doc = this.historyList.ownerDocument;
    for (const v of history) {
      this.historyList.append(el(doc, "li", {}, v));
    }
  }

  private showError(err: unknown): void {
    const msg =
      err instanceof ApiError
        ? err.detail
        : err instanceof Error
          ? err.message
          : String(err);
    this.banner.textContent = msg;
    this.banner.hidden = false;
  }
}
