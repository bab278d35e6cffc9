/** Wire types shared with the engine's HTTP API (version 1 bodies). */

export type EntityType = "person" | "object" | "static";

/** Center/size box in dataset pixel coordinates. */
export interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface SketchEntityPayload {
  id: string;
  type: EntityType;
  box: Box;
  orient: number;
}

export interface SketchPayload {
  version: number;
  template_id: string;
  entities: SketchEntityPayload[];
  not_exists: string[];
  near_threshold?: number;
}

export type RelationTriple = [string, string | number, string | number];

export interface FrameTemplateWire {
  version: number;
  id: string;
  types: [EntityType, string | number][];
  relations: RelationTriple[];
  not_exists: (string | number)[];
}

export interface EventStepWire {
  id: string;
  template: Omit<FrameTemplateWire, "version"> & { version?: number };
  mode?: "instant" | "interval";
  threshold?: number;
}

export type ConstraintTriple = [string, string, string];

export interface EventTemplateWire {
  version?: number;
  id: string;
  steps: EventStepWire[];
  constraints?: ConstraintTriple[];
}

export interface BarPayload {
  step_id: string;
  x0: number;
  x1: number;
}

export interface FrameEntityWire {
  id: string | number;
  type: EntityType;
  box: Box;
  bounds: [number, number, number, number];
  orient: number;
}

export interface FrameResponse {
  version: number;
  frame: number;
  entities: FrameEntityWire[];
}

export interface RangeResponse {
  version: number;
  min: number | null;
  max: number | null;
}

export interface UploadResponse {
  version: number;
  dataset_id: string;
  frames: number;
  high_water: number;
}

export interface DetectionWire {
  v: number;
  ts: number;
  dataset: string;
  event: string;
  bindings: Record<string, string | number>;
  steps: Record<string, [number, number]>;
}

export interface DetectionsResponse {
  version: number;
  next: number;
  detections: DetectionWire[];
}
