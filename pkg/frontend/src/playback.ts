import type { DetectionWire } from "./types.js";

export interface JumpResult {
  frame: number;
  clamped: boolean;
  notice: string | null;
}

/**
 * Playback position and the detection toggle. Frame images are optional:
 * when absent the overlay renders boxes on a blank canvas.
 */
export class PlaybackModel {
  current = 0;
  playing = false;
  detectionEnabled = false;
  detections: DetectionWire[] = [];
  private detectionCursor = 0;
  private min = 0;
  private max = -1;

  setRange(min: number | null, max: number | null): void {
    this.min = min ?? 0;
    this.max = max ?? -1;
    if (this.max >= this.min) this.current = Math.min(Math.max(this.current, this.min), this.max);
  }

  get range(): { min: number; max: number } {
    return { min: this.min, max: this.max };
  }

  /** Jump-to-frame, clamped to the processed range with a notice. */
  jumpTo(frame: number): JumpResult {
    if (this.max < this.min) {
      return { frame: this.current, clamped: true, notice: "no frames loaded" };
    }
    const clamped = Math.min(Math.max(frame, this.min), this.max);
    this.current = clamped;
    return {
      frame: clamped,
      clamped: clamped !== frame,
      notice: clamped !== frame ? `frame ${frame} is outside ${this.min}..${this.max}` : null,
    };
  }

  /** Advance one frame; stops playing at the end of the range. */
  step(): number {
    if (this.current < this.max) {
      this.current += 1;
    } else {
      this.playing = false;
    }
    return this.current;
  }

  toggleDetection(enabled: boolean): void {
    this.detectionEnabled = enabled;
    if (!enabled) {
      this.detections = [];
      this.detectionCursor = 0;
    }
  }

  /** Fold a /monitor/detections poll into the model; returns the new hits. */
  acceptDetections(next: number, detections: DetectionWire[]): DetectionWire[] {
    if (!this.detectionEnabled) return [];
    this.detections.push(...detections);
    this.detectionCursor = next;
    return detections;
  }

  get pollCursor(): number {
    return this.detectionCursor;
  }
}
