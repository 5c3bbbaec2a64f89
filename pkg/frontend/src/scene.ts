// Pure view renderer. Turns one (frame, layout, geometry) payload into a
// flat, JSON-serializable draw-command list plus hit regions. Keeping the
// command list serializable makes snapshots reviewable and lets tests run
// without a raster canvas; executeScene replays the list onto a real 2D
// context in the browser.
//
// The plane-to-screen transform mirrors the server's SVG renderer: x maps
// left-to-right, y flips for kilometre-based planes (plane y grows north)
// and stays put for Mercator (unit-square y grows south).

import type {
  FrameDoc,
  GeometryDoc,
  LayoutDoc,
  PlanePt,
  ViewportRect,
} from "./types.js";

export class SceneError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SceneError";
  }
}

const LAYER_STYLES: Record<string, [string | null, string | null]> = {
  land: ["#e8e4d6", null],
  coastline: [null, "#54778f"],
  countries: [null, "#b9ada3"],
  graticule: [null, "#d4dde6"],
};
const DEFAULT_POLYGON_FILL = "#e0e0da";
const DEFAULT_LINE_STROKE = "#8a8a8a";
const POINT_FILL = "#b5543c";
const BACKGROUND = "#f2f7fa";
const MARKER_FILL = "#2a4d7d";
const EDGE_STROKE = "#44618c";
const PROXY_RADIUS_PX = 22;
// mini-map viewport width as a fraction of the main viewport width
const PROXY_CROP_FRACTION = 0.25;
const NORTH_INSET_PX = 28;

export type NorthCorner = "tl" | "tr" | "bl" | "br";

export interface SceneOptions {
  screenPx?: number;
  northCorner?: NorthCorner;
}

export type XY = [number, number];

export type SceneCmd =
  | { op: "clear"; width: number; height: number; fill: string }
  | { op: "clipRect"; x: number; y: number; width: number; height: number }
  | { op: "clipCircle"; x: number; y: number; r: number }
  | { op: "endClip" }
  | { op: "polygon"; layer: string; points: XY[]; fill: string }
  | { op: "polyline"; layer: string; points: XY[]; stroke: string; width: number }
  | { op: "point"; layer: string; x: number; y: number; r: number; fill: string }
  | { op: "edge"; from: string; to: string; x1: number; y1: number; x2: number; y2: number }
  | {
      op: "disc";
      vertex: string;
      x: number;
      y: number;
      r: number;
      label: string | null;
    }
  | { op: "proxyRing"; x: number; y: number; r: number }
  | { op: "proxyPointer"; x: number; y: number; r: number; rotationRad: number }
  | { op: "proxyLabel"; x: number; y: number; r: number; text: string }
  | { op: "proxyBadge"; x: number; y: number; r: number; count: number }
  | { op: "northArrow"; x: number; y: number; rotationRad: number };

export type HitRegion =
  | { kind: "vertex"; vertex: string; x: number; y: number; r: number }
  | {
      kind: "proxy";
      vertices: string[];
      scores: number[];
      x: number;
      y: number;
      r: number;
    };

export interface Scene {
  width: number;
  height: number;
  commands: SceneCmd[];
  hits: HitRegion[];
}

/** The payload slice every renderable response shares. */
export interface RenderableDoc {
  frame: FrameDoc;
  layout: LayoutDoc;
  geometry: GeometryDoc | null;
}

interface Transform {
  (p: PlanePt): XY;
}

function r2(v: number): number {
  if (!Number.isFinite(v)) throw new SceneError(`non-finite coordinate ${v}`);
  const r = Math.round(v * 100) / 100;
  return r === 0 ? 0 : r; // normalize -0 so command lists serialize stably
}

function makeTransform(
  viewport: ViewportRect,
  kind: string,
  widthPx: number,
  heightPx: number,
): Transform {
  const [cx, cy, w, h] = viewport;
  if (!(w > 0) || !(h > 0)) {
    throw new SceneError(`degenerate viewport ${JSON.stringify(viewport)}`);
  }
  const flipY = kind !== "mercator";
  return (p: PlanePt): XY => {
    const sx = ((p[0] - (cx - w / 2)) / w) * widthPx;
    const sy = flipY
      ? (((cy + h / 2) - p[1]) / h) * heightPx
      : ((p[1] - (cy - h / 2)) / h) * heightPx;
    return [r2(sx), r2(sy)];
  };
}

function checkShape(doc: RenderableDoc): void {
  const frame = doc.frame;
  const layout = doc.layout;
  if (!frame || typeof frame !== "object") throw new SceneError("missing frame");
  if (!frame.spec || typeof frame.spec.kind !== "string") {
    throw new SceneError("frame has no projection spec");
  }
  if (!Array.isArray(frame.viewport) || frame.viewport.length !== 4) {
    throw new SceneError("frame viewport is not [cx, cy, w, h]");
  }
  if (!layout || typeof layout !== "object") throw new SceneError("missing layout");
  if (!Array.isArray(layout.onScreen) || !Array.isArray(layout.proxies)) {
    throw new SceneError("layout is missing onScreen or proxies");
  }
  for (const p of layout.proxies) {
    if (!Array.isArray(p.vertices) || p.vertices.length === 0) {
      throw new SceneError("proxy cluster has no members");
    }
    if (!Array.isArray(p.anchor) || p.anchor.length !== 2) {
      throw new SceneError("proxy cluster has no anchor");
    }
  }
  const g = doc.geometry;
  if (g !== null && g !== undefined && !Array.isArray(g.layers)) {
    throw new SceneError("geometry has no layers");
  }
}

function geometryCmds(
  geometry: GeometryDoc,
  tr: Transform,
): SceneCmd[] {
  const out: SceneCmd[] = [];
  for (const layer of geometry.layers) {
    const [fill, stroke] = LAYER_STYLES[layer.name] ?? [null, null];
    const polyFill = fill ?? DEFAULT_POLYGON_FILL;
    const lineStroke = stroke ?? DEFAULT_LINE_STROKE;
    for (const ring of layer.polygons) {
      out.push({ op: "polygon", layer: layer.name, points: ring.map(tr), fill: polyFill });
    }
    for (const line of layer.lines) {
      out.push({
        op: "polyline",
        layer: layer.name,
        points: line.map(tr),
        stroke: lineStroke,
        width: 1,
      });
    }
    for (const p of layer.points) {
      const [x, y] = tr(p);
      out.push({ op: "point", layer: layer.name, x, y, r: 2.5, fill: POINT_FILL });
    }
  }
  return out;
}

function northAnchor(corner: NorthCorner, width: number, height: number): XY {
  const x = corner === "tl" || corner === "bl" ? NORTH_INSET_PX : width - NORTH_INSET_PX;
  const y = corner === "tl" || corner === "tr" ? NORTH_INSET_PX : height - NORTH_INSET_PX;
  return [x, y];
}

export function buildScene(doc: RenderableDoc, opts: SceneOptions = {}): Scene {
  checkShape(doc);
  const screenPx = opts.screenPx ?? 480;
  const corner = opts.northCorner ?? "tr";
  const frame = doc.frame;
  const layout = doc.layout;
  const viewport = layout.viewport ?? frame.viewport;
  const kind = frame.spec.kind;
  const aspect = viewport[3] / viewport[2];
  const width = screenPx;
  const height = r2(screenPx * aspect);
  const tr = makeTransform(viewport, kind, width, height);

  const commands: SceneCmd[] = [
    { op: "clear", width, height, fill: BACKGROUND },
    { op: "clipRect", x: 0, y: 0, width, height },
  ];
  const hits: HitRegion[] = [];

  if (doc.geometry) {
    commands.push(...geometryCmds(doc.geometry, tr));
  }

  const positions = new Map<string, XY>();
  for (const v of layout.onScreen) {
    positions.set(v.vertex, tr(v.pos));
  }
  for (const [a, b] of layout.explicitEdges) {
    const pa = positions.get(a);
    const pb = positions.get(b);
    if (!pa || !pb) continue;
    commands.push({ op: "edge", from: a, to: b, x1: pa[0], y1: pa[1], x2: pb[0], y2: pb[1] });
  }

  // only the most interesting vertex carries a text label
  let labelled: string | null = null;
  let best = -Infinity;
  for (const v of layout.onScreen) {
    if (v.score > best) {
      best = v.score;
      labelled = v.vertex;
    }
  }
  for (const v of layout.onScreen) {
    const [x, y] = positions.get(v.vertex)!;
    const r = r2(4 + 4 * v.score);
    commands.push({
      op: "disc",
      vertex: v.vertex,
      x,
      y,
      r,
      label: v.vertex === labelled ? v.vertex : null,
    });
    hits.push({ kind: "vertex", vertex: v.vertex, x, y, r: Math.max(r, 10) });
  }

  commands.push({ op: "endClip" });

  for (const proxy of layout.proxies) {
    const [px, py] = tr(proxy.anchor);
    commands.push({ op: "clipCircle", x: px, y: py, r: PROXY_RADIUS_PX });
    if (doc.geometry) {
      // the mini-map reuses the main geometry payload, cropped around the
      // cluster anchor so the widget shows local context
      const cropW = viewport[2] * PROXY_CROP_FRACTION;
      const crop: ViewportRect = [proxy.anchor[0], proxy.anchor[1], cropW, cropW];
      const miniTr = makeTransform(crop, kind, 2 * PROXY_RADIUS_PX, 2 * PROXY_RADIUS_PX);
      const shift: Transform = (p) => {
        const [mx, my] = miniTr(p);
        return [r2(px - PROXY_RADIUS_PX + mx), r2(py - PROXY_RADIUS_PX + my)];
      };
      commands.push(...geometryCmds(doc.geometry, shift));
    }
    commands.push({ op: "endClip" });
    commands.push({ op: "proxyRing", x: px, y: py, r: PROXY_RADIUS_PX });
    commands.push({
      op: "proxyPointer",
      x: px,
      y: py,
      r: PROXY_RADIUS_PX,
      rotationRad: r2(proxy.directionRad),
    });
    if (proxy.vertices.length === 1) {
      commands.push({
        op: "proxyLabel",
        x: px,
        y: py,
        r: PROXY_RADIUS_PX,
        text: proxy.vertices[0],
      });
    } else {
      commands.push({
        op: "proxyBadge",
        x: px,
        y: py,
        r: PROXY_RADIUS_PX,
        count: proxy.vertices.length,
      });
    }
    hits.push({
      kind: "proxy",
      vertices: [...proxy.vertices],
      scores: [...proxy.scores],
      x: px,
      y: py,
      r: PROXY_RADIUS_PX,
    });
  }

  const northRad = layout.northArrowRad ?? frame.northArrowRad ?? 0;
  const [nx, ny] = northAnchor(corner, width, height);
  commands.push({ op: "northArrow", x: nx, y: ny, rotationRad: r2(northRad) });

  return { width, height, commands, hits };
}

export function hitTest(scene: Scene, x: number, y: number): HitRegion | null {
  // proxies sit on top of vertex discs, so scan them first
  const ordered = [...scene.hits].sort((a, b) =>
    a.kind === b.kind ? 0 : a.kind === "proxy" ? -1 : 1,
  );
  for (const h of ordered) {
    const dx = x - h.x;
    const dy = y - h.y;
    if (dx * dx + dy * dy <= h.r * h.r) return h;
  }
  return null;
}

/** Replay a command list onto a canvas 2D context. */
export function executeScene(ctx: CanvasRenderingContext2D, scene: Scene): void {
  let clipped = 0;
  const path = (points: XY[], close: boolean) => {
    ctx.beginPath();
    points.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
    if (close) ctx.closePath();
  };
  for (const cmd of scene.commands) {
    switch (cmd.op) {
      case "clear":
        ctx.fillStyle = cmd.fill;
        ctx.fillRect(0, 0, cmd.width, cmd.height);
        break;
      case "clipRect":
        ctx.save();
        clipped += 1;
        ctx.beginPath();
        ctx.rect(cmd.x, cmd.y, cmd.width, cmd.height);
        ctx.clip();
        break;
      case "clipCircle":
        ctx.save();
        clipped += 1;
        ctx.beginPath();
        ctx.arc(cmd.x, cmd.y, cmd.r, 0, 2 * Math.PI);
        ctx.fillStyle = BACKGROUND;
        ctx.fill();
        ctx.clip();
        break;
      case "endClip":
        if (clipped > 0) {
          ctx.restore();
          clipped -= 1;
        }
        break;
      case "polygon":
        path(cmd.points, true);
        ctx.fillStyle = cmd.fill;
        ctx.fill();
        break;
      case "polyline":
        path(cmd.points, false);
        ctx.strokeStyle = cmd.stroke;
        ctx.lineWidth = cmd.width;
        ctx.stroke();
        break;
      case "point":
        ctx.beginPath();
        ctx.arc(cmd.x, cmd.y, cmd.r, 0, 2 * Math.PI);
        ctx.fillStyle = cmd.fill;
        ctx.fill();
        break;
      case "edge":
        ctx.beginPath();
        ctx.moveTo(cmd.x1, cmd.y1);
        ctx.lineTo(cmd.x2, cmd.y2);
        ctx.strokeStyle = EDGE_STROKE;
        ctx.lineWidth = 1.5;
        ctx.stroke();
        break;
      case "disc":
        ctx.beginPath();
        ctx.arc(cmd.x, cmd.y, cmd.r, 0, 2 * Math.PI);
        ctx.fillStyle = MARKER_FILL;
        ctx.fill();
        ctx.strokeStyle = "#ffffff";
        ctx.lineWidth = 1.5;
        ctx.stroke();
        if (cmd.label) {
          ctx.fillStyle = "#22303c";
          ctx.font = "12px sans-serif";
          ctx.fillText(cmd.label, cmd.x + cmd.r + 3, cmd.y + 4);
        }
        break;
      case "proxyRing":
        ctx.beginPath();
        ctx.arc(cmd.x, cmd.y, cmd.r, 0, 2 * Math.PI);
        ctx.strokeStyle = MARKER_FILL;
        ctx.lineWidth = 2;
        ctx.stroke();
        break;
      case "proxyPointer":
        ctx.save();
        ctx.translate(cmd.x, cmd.y);
        ctx.rotate(cmd.rotationRad);
        ctx.beginPath();
        ctx.moveTo(0, -cmd.r);
        ctx.lineTo(4, -cmd.r + 6);
        ctx.lineTo(-4, -cmd.r + 6);
        ctx.closePath();
        ctx.fillStyle = MARKER_FILL;
        ctx.fill();
        ctx.restore();
        break;
      case "proxyLabel":
        ctx.fillStyle = "#22303c";
        ctx.font = "10px sans-serif";
        ctx.textAlign = "center";
        ctx.fillText(cmd.text, cmd.x, cmd.y + cmd.r + 12);
        ctx.textAlign = "left";
        break;
      case "proxyBadge":
        ctx.beginPath();
        ctx.arc(cmd.x + cmd.r * 0.75, cmd.y - cmd.r * 0.75, 8, 0, 2 * Math.PI);
        ctx.fillStyle = POINT_FILL;
        ctx.fill();
        ctx.fillStyle = "#ffffff";
        ctx.font = "10px sans-serif";
        ctx.textAlign = "center";
        ctx.fillText(String(cmd.count), cmd.x + cmd.r * 0.75, cmd.y - cmd.r * 0.75 + 3);
        ctx.textAlign = "left";
        break;
      case "northArrow":
        ctx.save();
        ctx.translate(cmd.x, cmd.y);
        ctx.beginPath();
        ctx.arc(0, 0, 16, 0, 2 * Math.PI);
        ctx.fillStyle = "rgba(255,255,255,0.8)";
        ctx.fill();
        ctx.strokeStyle = "#8a8a8a";
        ctx.lineWidth = 1;
        ctx.stroke();
        ctx.rotate(cmd.rotationRad);
        ctx.beginPath();
        ctx.moveTo(0, -12);
        ctx.lineTo(5, 6);
        ctx.lineTo(0, 2);
        ctx.lineTo(-5, 6);
        ctx.closePath();
        ctx.fillStyle = POINT_FILL;
        ctx.fill();
        ctx.restore();
        break;
    }
  }
  while (clipped > 0) {
    ctx.restore();
    clipped -= 1;
  }
}
