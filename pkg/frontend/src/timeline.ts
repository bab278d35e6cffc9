import type { BarPayload } from "./types.js";

export interface TimelineBar {
  stepId: string;
  x0: number;
  x1: number;
}

const MIN_WIDTH = 1;

/**
 * One draggable bar per frame-template step. Bar coordinates are purely
 * relational: the server derives ordering constraints from the layout, the
 * pixel values carry no metric meaning.
 */
export class TimelineModel {
  private bars = new Map<string, TimelineBar>();
  selectedId: string | null = null;

  addBar(stepId: string, x0: number, x1: number): TimelineBar {
    if (this.bars.has(stepId)) throw new Error(`duplicate step id: ${stepId}`);
    if (!(x1 - x0 >= MIN_WIDTH)) throw new Error("bar width must be positive");
    const bar: TimelineBar = { stepId, x0, x1 };
    this.bars.set(stepId, bar);
    this.selectedId = stepId;
    return bar;
  }

  allBars(): TimelineBar[] {
    return [...this.bars.values()];
  }

  moveBar(stepId: string, dx: number): void {
    const bar = this.require(stepId);
    bar.x0 += dx;
    bar.x1 += dx;
  }

  /** Drag one edge; the bar keeps at least the minimum width. */
  dragEdge(stepId: string, edge: "left" | "right", x: number): void {
    const bar = this.require(stepId);
    if (edge === "left") bar.x0 = Math.min(x, bar.x1 - MIN_WIDTH);
    else bar.x1 = Math.max(x, bar.x0 + MIN_WIDTH);
  }

  removeBar(stepId: string): void {
    if (!this.bars.delete(stepId)) throw new Error(`unknown step id: ${stepId}`);
    if (this.selectedId === stepId) this.selectedId = null;
  }

  toPayload(): BarPayload[] {
    return this.allBars().map((b) => ({ step_id: b.stepId, x0: b.x0, x1: b.x1 }));
  }

  private require(stepId: string): TimelineBar {
    const bar = this.bars.get(stepId);
    if (!bar) throw new Error(`unknown step id: ${stepId}`);
    return bar;
  }
}
