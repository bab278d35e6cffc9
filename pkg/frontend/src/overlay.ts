import type { EntityType, FrameResponse } from "./types.js";

export interface OverlayBox {
  id: string;
  label: string;
  /** top-left corner + size, ready for canvas strokeRect */
  x: number;
  y: number;
  w: number;
  h: number;
  color: string;
  dashed: boolean;
}

/** Per-type accent styles: persons blue, objects red, statics dashed amber. */
export const TYPE_STYLES: Record<EntityType, { color: string; dashed: boolean }> = {
  person: { color: "#2b6fd4", dashed: false },
  object: { color: "#d43b2b", dashed: false },
  static: { color: "#caa53d", dashed: true },
};

/** Map a frame response to drawable overlay boxes, one per entity. */
export function overlayBoxes(frame: FrameResponse): OverlayBox[] {
  return frame.entities.map((entity) => {
    const style = TYPE_STYLES[entity.type];
    return {
      id: String(entity.id),
      label: `${entity.type} ${entity.id}`,
      x: entity.box.x - entity.box.w / 2,
      y: entity.box.y - entity.box.h / 2,
      w: entity.box.w,
      h: entity.box.h,
      color: style.color,
      dashed: style.dashed,
    };
  });
}

/**
 * Latest-wins overlay state: playback and polling timers may interleave, so
 * a fetch result is only accepted if it answers the most recent request.
 */
export class OverlayState {
  private latestRequested = -1;
  private current: { frame: number; boxes: OverlayBox[] } | null = null;

  /** Tag a fetch about to be issued for the given frame. */
  request(frame: number): number {
    this.latestRequested = frame;
    return frame;
  }

  /** Accept a fetch result; stale answers are dropped. Returns acceptance. */
  accept(frame: number, boxes: OverlayBox[]): boolean {
    if (frame !== this.latestRequested) return false;
    this.current = { frame, boxes };
    return true;
  }

  visible(): { frame: number; boxes: OverlayBox[] } | null {
    return this.current;
  }

  clear(): void {
    this.current = null;
    this.latestRequested = -1;
  }
}
