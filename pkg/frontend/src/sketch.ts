import type { Box, EntityType, SketchPayload } from "./types.js";

export interface SketchEntity {
  id: string;
  type: EntityType;
  box: Box;
  orient: number;
}

const MIN_SIZE = 2;

/**
 * The sketched keyframe: entities drawn on the canvas plus the not-exists
 * tray. Tray entities are remembered (so they can be dragged back) but are
 * never part of the canvas proper and never contribute spatial relations.
 */
export class SketchModel {
  readonly width: number;
  readonly height: number;
  private entities = new Map<string, SketchEntity>();
  private tray = new Map<string, SketchEntity>();
  private counters: Record<EntityType, number> = { person: 0, object: 0, static: 0 };
  selectedId: string | null = null;

  // default canvas matches the annotation streams' 384x288 frames
  constructor(width = 384, height = 288) {
    this.width = width;
    this.height = height;
  }

  addEntity(type: EntityType, box: Box, id?: string): SketchEntity {
    const entityId = id ?? this.nextId(type);
    if (this.entities.has(entityId) || this.tray.has(entityId)) {
      throw new Error(`duplicate entity id: ${entityId}`);
    }
    const entity: SketchEntity = { id: entityId, type, box: clampBox(box), orient: 0 };
    this.entities.set(entityId, entity);
    this.selectedId = entityId;
    return entity;
  }

  private nextId(type: EntityType): string {
    const prefix = type === "person" ? "p" : type === "object" ? "o" : "s";
    let candidate: string;
    do {
      this.counters[type] += 1;
      candidate = `${prefix}${this.counters[type]}`;
    } while (this.entities.has(candidate) || this.tray.has(candidate));
    return candidate;
  }

  /** Entities on the canvas proper; tray contents are never included. */
  drawnEntities(): SketchEntity[] {
    return [...this.entities.values()];
  }

  trayEntities(): SketchEntity[] {
    return [...this.tray.values()];
  }

  get(id: string): SketchEntity | undefined {
    return this.entities.get(id) ?? this.tray.get(id);
  }

  select(id: string | null): void {
    if (id !== null && !this.entities.has(id) && !this.tray.has(id)) {
      throw new Error(`unknown entity: ${id}`);
    }
    this.selectedId = id;
  }

  selected(): SketchEntity | null {
    return this.selectedId === null ? null : this.get(this.selectedId) ?? null;
  }

  moveEntity(id: string, dx: number, dy: number): void {
    const entity = this.requireDrawn(id);
    entity.box = clampBox({ ...entity.box, x: entity.box.x + dx, y: entity.box.y + dy });
  }

  resizeEntity(id: string, w: number, h: number): void {
    const entity = this.requireDrawn(id);
    entity.box = clampBox({ ...entity.box, w, h });
  }

  setOrientation(id: string, orient: number): void {
    const entity = this.requireDrawn(id);
    if (entity.type === "static") {
      throw new Error("orientation is not applicable to static regions");
    }
    entity.orient = ((orient % 360) + 360) % 360;
  }

  deleteEntity(id: string): void {
    if (!this.entities.delete(id) && !this.tray.delete(id)) {
      throw new Error(`unknown entity: ${id}`);
    }
    if (this.selectedId === id) this.selectedId = null;
  }

  /** Drag an entity into the Not Exists tray: off the canvas, into not_exists. */
  sendToTray(id: string): void {
    const entity = this.requireDrawn(id);
    this.entities.delete(id);
    this.tray.set(id, entity);
  }

  /** Drag a tray entity back onto the canvas. */
  restoreFromTray(id: string): void {
    const entity = this.tray.get(id);
    if (!entity) throw new Error(`entity ${id} is not in the tray`);
    this.tray.delete(id);
    this.entities.set(id, entity);
  }

  toPayload(templateId: string, nearThreshold?: number): SketchPayload {
    const payload: SketchPayload = {
      version: 1,
      template_id: templateId,
      entities: this.drawnEntities().map((e) => ({
        id: e.id,
        type: e.type,
        box: { ...e.box },
        orient: e.type === "static" ? 0 : e.orient,
      })),
      not_exists: [...this.tray.keys()],
    };
    if (nearThreshold !== undefined) payload.near_threshold = nearThreshold;
    return payload;
  }

  private requireDrawn(id: string): SketchEntity {
    const entity = this.entities.get(id);
    if (!entity) throw new Error(`entity ${id} is not on the canvas`);
    return entity;
  }
}

function clampBox(box: Box): Box {
  return { ...box, w: Math.max(MIN_SIZE, box.w), h: Math.max(MIN_SIZE, box.h) };
}
