// DOM-level tests of the explorer shell: boot, proxy click navigation with
// frame playback, interest tuning, and error surfacing. The service is a
// recorded mock around the committed fixture payloads.

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { beforeAll, beforeEach, describe, expect, it } from "vitest";
import type { Api } from "../src/api.js";
import { ApiError } from "../src/api.js";
import { App } from "../src/app.js";
import type {
  BundleDoc,
  DoIConfigDoc,
  GraphDoc,
  SessionDoc,
  TransitionDoc,
  TransitionFrameDoc,
  ViewDoc,
} from "../src/types.js";

// vitest runs with cwd at the frontend root
function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join("tests/fixtures", name), "utf8")) as T;
}

const graph = fixture<GraphDoc>("graph.json");
const viewBerlin = fixture<ViewDoc>("view_berlin.json");
const viewTokyo = fixture<ViewDoc>("view_tokyo.json");
const transition = fixture<TransitionDoc>("transition.json");
const frameFirst = fixture<TransitionFrameDoc>("frame_first.json");
const frameMid = fixture<TransitionFrameDoc>("frame_mid.json");
const frameLast = fixture<TransitionFrameDoc>("frame_last.json");
const bundle = fixture<BundleDoc>("bundle.json");
const sessionAfter = fixture<SessionDoc>("session.json");

const sessionBefore: SessionDoc = {
  ...sessionAfter,
  currentVertex: "berlin",
  history: ["berlin"],
  activeTransition: null,
};

const DURATION = 0.4;

interface Calls {
  postTransition: [string, string][];
  getFrame: number[];
  putDoiConfig: DoIConfigDoc[];
  getView: string[];
  getBundle: number;
}

function makeApi(overrides: Partial<Api> = {}): { api: Api; calls: Calls } {
  const calls: Calls = {
    postTransition: [],
    getFrame: [],
    putDoiConfig: [],
    getView: [],
    getBundle: 0,
  };
  let navigated = false;
  const api: Api = {
    getGraph: async () => graph,
    getSession: async () => (navigated ? sessionAfter : sessionBefore),
    getView: async (v) => {
      calls.getView.push(v);
      return v === "tokyo" ? viewTokyo : viewBerlin;
    },
    postTransition: async (from, to) => {
      calls.postTransition.push([from, to]);
      navigated = true;
      return { ...transition, durationS: DURATION };
    },
    getFrame: async (_id, t) => {
      calls.getFrame.push(t);
      if (t <= 0) return frameFirst;
      if (t >= DURATION) return frameLast;
      return frameMid;
    },
    getBundle: async () => {
      calls.getBundle += 1;
      return bundle;
    },
    putDoiConfig: async (doc) => {
      calls.putDoiConfig.push(doc);
      return { applied: doc };
    },
    ...overrides,
  };
  return { api, calls };
}

function makeApp(api: Api) {
  const clock = { t: 0 };
  const ticks: (() => void)[] = [];
  const app = new App({
    api,
    now: () => clock.t,
    schedule: (cb) => {
      ticks.push(cb);
      return () => {
        const i = ticks.indexOf(cb);
        if (i >= 0) ticks.splice(i, 1);
      };
    },
    screenPx: 480,
  });
  return {
    app,
    clock,
    runTick: () => {
      const cb = ticks.shift();
      if (cb) cb();
    },
  };
}

async function flush(): Promise<void> {
  for (let i = 0; i < 20; i++) await Promise.resolve();
}

function root(): HTMLElement {
  document.body.innerHTML = '<div id="app"></div>';
  return document.getElementById("app")!;
}

function canvas(): HTMLCanvasElement {
  return document.getElementById("map") as HTMLCanvasElement;
}

function click(x: number, y: number): void {
  canvas().dispatchEvent(
    new MouseEvent("click", { clientX: x, clientY: y, bubbles: true }),
  );
}

beforeAll(() => {
  // jsdom ships no raster canvas; the app keeps working off command lists
  HTMLCanvasElement.prototype.getContext = (() =>
    null) as typeof HTMLCanvasElement.prototype.getContext;
});

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("boot", () => {
  it("renders the session's current vertex as a static view", async () => {
    const { api } = makeApi();
    const { app } = makeApp(api);
    await app.init(root());
    expect(app.currentVertex).toBe("berlin");
    expect(document.getElementById("current")!.textContent).toBe("berlin");
    expect(app.lastScene).not.toBeNull();
    const discs = app.lastScene!.hits.filter((h) => h.kind === "vertex");
    expect(discs.map((d) => (d.kind === "vertex" ? d.vertex : ""))).toContain("berlin");
    const items = [...document.querySelectorAll("#history li")].map(
      (li) => li.textContent,
    );
    expect(items).toEqual(["berlin"]);
  });
});

describe("proxy click navigation", () => {
  it("runs transition playback, then lands on the destination view", async () => {
    const { api, calls } = makeApi();
    const { app, clock, runTick } = makeApp(api);
    await app.init(root());

    const proxy = app.lastScene!.hits.find(
      (h) => h.kind === "proxy" && h.vertices.includes("tokyo"),
    )!;
    click(proxy.x, proxy.y);
    await flush();

    expect(calls.postTransition).toEqual([["berlin", "tokyo"]]);
    expect(calls.getBundle).toBe(1);
    expect(app.transitioning).toBe(true);

    // clicks during an active transition are ignored
    click(proxy.x, proxy.y);
    await flush();
    expect(calls.postTransition).toHaveLength(1);

    for (let i = 0; i < 50 && app.transitioning; i++) {
      clock.t += 0.15;
      runTick();
      await flush();
    }

    expect(app.transitioning).toBe(false);
    expect(app.currentVertex).toBe("tokyo");
    expect(document.getElementById("current")!.textContent).toBe("tokyo");

    // frame requests never went backwards and reached the end
    for (let i = 1; i < calls.getFrame.length; i++) {
      expect(calls.getFrame[i]).toBeGreaterThanOrEqual(calls.getFrame[i - 1]);
    }
    expect(calls.getFrame[0]).toBe(0);
    expect(calls.getFrame[calls.getFrame.length - 1]).toBe(DURATION);

    // destination static view was requested and painted
    expect(calls.getView).toEqual(["berlin", "tokyo"]);
    const items = [...document.querySelectorAll("#history li")].map(
      (li) => li.textContent,
    );
    expect(items).toEqual(["berlin", "tokyo"]);
  });

  it("clicking the focused vertex is a no-op", async () => {
    const { api, calls } = makeApi();
    const { app } = makeApp(api);
    await app.init(root());
    const focus = app.lastScene!.hits.find(
      (h) => h.kind === "vertex" && h.vertex === "berlin",
    )!;
    click(focus.x, focus.y);
    await flush();
    expect(calls.postTransition).toEqual([]);
    expect(app.transitioning).toBe(false);
  });

  it("clicking empty map is a no-op", async () => {
    const { api, calls } = makeApi();
    const { app } = makeApp(api);
    await app.init(root());
    click(5, 470);
    await flush();
    expect(calls.postTransition).toEqual([]);
  });

  it("a refused transition shows the error banner and stays put", async () => {
    const { api, calls } = makeApi({
      postTransition: async () => {
        throw new ApiError(409, "transition t9 still active");
      },
    });
    const { app } = makeApp(api);
    await app.init(root());
    const proxy = app.lastScene!.hits.find((h) => h.kind === "proxy")!;
    click(proxy.x, proxy.y);
    await app.idle();
    const banner = document.getElementById("banner")!;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("still active");
    expect(app.transitioning).toBe(false);
    expect(app.currentVertex).toBe("berlin");
    expect(calls.getFrame).toEqual([]);
  });
});

describe("interest panel", () => {
  it("a threshold change refreshes proxies without navigating", async () => {
    const { api, calls } = makeApi();
    const { app } = makeApp(api);
    await app.init(root());

    const input = document.querySelector<HTMLInputElement>(
      'input[data-fn="threshold"]',
    )!;
    input.value = "0.6";
    input.dispatchEvent(new Event("change"));
    await app.idle();
    await flush();

    expect(calls.putDoiConfig).toHaveLength(1);
    expect(calls.putDoiConfig[0].threshold).toBe(0.6);
    // the current view was re-fetched; nothing navigated
    expect(calls.getView).toEqual(["berlin", "berlin"]);
    expect(calls.postTransition).toEqual([]);
    expect(app.currentVertex).toBe("berlin");
    const items = [...document.querySelectorAll("#history li")].map(
      (li) => li.textContent,
    );
    expect(items).toEqual(["berlin"]);
  });

  it("zeroing every weight is blocked before any request leaves", async () => {
    const { api, calls } = makeApi();
    const { app } = makeApp(api);
    await app.init(root());

    const weights = [
      ...document.querySelectorAll<HTMLInputElement>(
        'input[type="range"]:not([data-fn="threshold"])',
      ),
    ];
    expect(weights.length).toBeGreaterThanOrEqual(2);
    for (const w of weights) {
      w.value = "0";
      w.dispatchEvent(new Event("change"));
      await app.idle();
      await flush();
    }

    const errBox = document.getElementById("doi-error")!;
    expect(errBox.hidden).toBe(false);
    expect(errBox.textContent).toMatch(/weight/);
    // the final, all-zero change never reached the service
    expect(calls.putDoiConfig).toHaveLength(weights.length - 1);
    expect(
      calls.putDoiConfig.every((d) => d.components.some((c) => c.weight > 0)),
    ).toBe(true);
  });

  it("a service rejection lands in the inline error box", async () => {
    const { api } = makeApi({
      putDoiConfig: async () => {
        throw new ApiError(422, "invalid DoI configuration: threshold out of range");
      },
    });
    const { app } = makeApp(api);
    await app.init(root());
    const input = document.querySelector<HTMLInputElement>(
      'input[data-fn="threshold"]',
    )!;
    input.value = "0.9";
    input.dispatchEvent(new Event("change"));
    await app.idle();
    await flush();
    const errBox = document.getElementById("doi-error")!;
    expect(errBox.hidden).toBe(false);
    expect(errBox.textContent).toContain("invalid DoI configuration");
  });
});

describe("proxy hover", () => {
  it("shows the member list and hides it off-widget", async () => {
    const { api } = makeApi();
    const { app } = makeApp(api);
    await app.init(root());
    const proxy = app.lastScene!.hits.find(
      (h) => h.kind === "proxy" && h.vertices.includes("tokyo"),
    )!;
    canvas().dispatchEvent(
      new MouseEvent("mousemove", { clientX: proxy.x, clientY: proxy.y }),
    );
    const hover = document.getElementById("hover")!;
    expect(hover.hidden).toBe(false);
    expect(hover.textContent).toContain("tokyo");
    canvas().dispatchEvent(new MouseEvent("mousemove", { clientX: 2, clientY: 2 }));
    expect(hover.hidden).toBe(true);
  });
});

describe("malformed payloads", () => {
  it("raise the error banner instead of a broken canvas", async () => {
    const { api } = makeApi({
      getView: async () => ({}) as unknown as ViewDoc,
    });
    const { app } = makeApp(api);
    await app.init(root());
    const banner = document.getElementById("banner")!;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("malformed view payload");
  });
});
