import { createApi } from "./api.js";
import { App } from "./app.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");

const app = new App({
  api: createApi(""),
  now: () => performance.now() / 1000,
  schedule: (cb) => {
    const id = requestAnimationFrame(() => cb());
    return () => cancelAnimationFrame(id);
  },
  screenPx: 720,
});

void app.init(root);
