// Wire types mirroring the service JSON contract (docs/formats.md).
// The client treats all of these as read-only payloads.

export type LatLon = [number, number];
export type PlanePt = [number, number];
/** Camera rect in plane units: [centerX, centerY, width, height]. */
export type ViewportRect = [number, number, number, number];

export interface GraphVertex {
  id: string;
  name: string;
  lat: number;
  lon: number;
  attributes: Record<string, number>;
}

export interface GraphDoc {
  schemaVersion: number;
  vertices: GraphVertex[];
  edges: [string, string][];
}

export interface ProjectionSpecDoc {
  kind: string; // "tpeqd" | "azeqd" | "mercator"
  nodeA: LatLon | null;
  nodeB: LatLon | null;
  rotationRad: number;
  offset: PlanePt;
  baselineKm: number;
}

export interface FrameDoc {
  t: number;
  phase: string;
  spec: ProjectionSpecDoc;
  viewport: ViewportRect;
  northArrowRad: number;
}

export interface OnScreenVertexDoc {
  vertex: string;
  pos: PlanePt;
  score: number;
}

export interface ProxyDoc {
  vertices: string[];
  scores: number[];
  anchor: PlanePt;
  directionRad: number;
  isNeighbor: boolean[];
}

export interface LayoutDoc {
  viewport: ViewportRect;
  onScreen: OnScreenVertexDoc[];
  proxies: ProxyDoc[];
  explicitEdges: [string, string][];
  northArrowRad: number;
}

export interface GeometryLayerDoc {
  name: string;
  lines: PlanePt[][];
  polygons: PlanePt[][];
  points: PlanePt[];
}

export interface GeometryDoc {
  specDigest: string;
  tolerance: number;
  flaggedLayers: string[];
  layers: GeometryLayerDoc[];
}

export interface ViewDoc {
  schemaVersion: number;
  vertex: string;
  frame: FrameDoc;
  layout: LayoutDoc;
  geometry: GeometryDoc;
}

export interface PhaseDoc {
  kind: string;
  durationS: number;
}

export interface TransitionDoc {
  schemaVersion: number;
  id: string;
  from: string;
  to: string;
  projection: string;
  durationS: number;
  frameCount: number;
  frameRate: number;
  phases: PhaseDoc[];
  bundleKey: string | null;
}

export interface GeometryRefDoc {
  bundleKey: string;
  url: string;
  section: "morphIn" | "zoom" | "morphOut";
  index: number;
}

export interface TransitionFrameDoc {
  schemaVersion: number;
  id: string;
  frameIndex: number;
  frame: FrameDoc;
  layout: LayoutDoc;
  geometry: GeometryRefDoc | null;
}

export interface DoIComponentDoc {
  function: string;
  weight: number;
  params: Record<string, number>;
}

export interface DoIConfigDoc {
  components: DoIComponentDoc[];
  threshold: number;
  maxProxies: number;
}

export interface SessionDoc {
  schemaVersion: number;
  currentVertex: string | null;
  history: string[];
  doi: DoIConfigDoc;
  activeTransition: string | null;
}

export interface MorphKeyframeDoc {
  frac: number;
  spec: ProjectionSpecDoc;
  geometry: GeometryDoc;
}

export interface BundleDoc {
  schemaVersion: number;
  kind: string;
  pair: [string, string];
  from: string;
  to: string;
  direction: "forward" | "reverse";
  configHash: string;
  projection: string;
  phases: PhaseDoc[];
  frameRate: number;
  morphIn: MorphKeyframeDoc[];
  zoom: {
    spec: ProjectionSpecDoc;
    geometry: GeometryDoc;
    clipRects: ViewportRect[];
  };
  morphOut: MorphKeyframeDoc[];
}
