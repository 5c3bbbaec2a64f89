// Client-side transition playback. The client owns the clock: each tick
// computes elapsed time, asks the service for the nearest frame, and paints
// whatever comes back. Three rules keep it honest under network jitter:
// at most one frame request is in flight, requested times never go
// backwards, and a response older than the newest painted frame is dropped.

import type { TransitionFrameDoc } from "./types.js";

export interface PlaybackDeps {
  /** Monotone clock in seconds. */
  now(): number;
  /** Schedule cb to run on the next display refresh; returns a cancel. */
  schedule(cb: () => void): () => void;
  fetchFrame(t: number): Promise<TransitionFrameDoc>;
  onFrame(frame: TransitionFrameDoc): void;
  onDone(): void;
  onError(err: unknown): void;
}

export class Playback {
  private startedAt = 0;
  private running = false;
  private inFlight = false;
  private pendingT: number | null = null;
  private lastRequestedT = -Infinity;
  private lastPaintedT = -Infinity;
  private finalRequested = false;
  private doneFired = false;
  private cancelTick: (() => void) | null = null;

  constructor(
    private readonly durationS: number,
    private readonly deps: PlaybackDeps,
  ) {}

  start(): void {
    if (this.running) return;
    this.running = true;
    this.startedAt = this.deps.now();
    this.tick();
  }

  stop(): void {
    this.running = false;
    if (this.cancelTick) {
      this.cancelTick();
      this.cancelTick = null;
    }
  }

  get active(): boolean {
    return this.running;
  }

  private tick = (): void => {
    if (!this.running) return;
    const elapsed = this.deps.now() - this.startedAt;
    const t = Math.min(elapsed, this.durationS);
    this.request(t);
    // the loop always ends on a tick clamped to the full duration
    if (t < this.durationS) {
      this.cancelTick = this.deps.schedule(this.tick);
    }
  };

  private request(t: number): void {
    if (this.inFlight) {
      // coalesce: only the newest wanted time survives
      this.pendingT = Math.max(t, this.pendingT ?? -Infinity);
      return;
    }
    if (t <= this.lastRequestedT) {
      this.maybeDone();
      return;
    }
    this.issue(t);
  }

  private issue(t: number): void {
    this.inFlight = true;
    this.lastRequestedT = t;
    if (t >= this.durationS) this.finalRequested = true;
    this.deps
      .fetchFrame(t)
      .then((frame) => {
        this.inFlight = false;
        if (!this.running) return;
        if (frame.frame.t >= this.lastPaintedT) {
          this.lastPaintedT = frame.frame.t;
          this.deps.onFrame(frame);
        }
        this.drain();
      })
      .catch((err) => {
        this.inFlight = false;
        if (!this.running) return;
        this.stop();
        this.deps.onError(err);
      });
  }

  private drain(): void {
    if (this.pendingT !== null) {
      const t = this.pendingT;
      this.pendingT = null;
      if (t > this.lastRequestedT) {
        this.issue(t);
        return;
      }
    }
    this.maybeDone();
  }

  private maybeDone(): void {
    if (this.finalRequested && !this.inFlight && this.running && !this.doneFired) {
      this.doneFired = true;
      this.stop();
      this.deps.onDone();
    }
  }
}
