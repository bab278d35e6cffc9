import type {
  BarPayload,
  ConstraintTriple,
  DetectionsResponse,
  EventStepWire,
  EventTemplateWire,
  FrameResponse,
  FrameTemplateWire,
  RangeResponse,
  SketchPayload,
  UploadResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/**
 * Thin client over the engine's HTTP API. The UI never computes spatial
 * relations locally; everything displayed comes back from these calls
 * verbatim.
 */
export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) init.body = JSON.stringify(body);
    const response = await this.fetchFn(this.baseUrl + path, init);
    const text = await response.text();
    const payload = text ? JSON.parse(text) : {};
    if (!response.ok) {
      const message = payload.error ?? payload.detail ?? `HTTP ${response.status}`;
      throw new ApiError(String(message), response.status);
    }
    return payload as T;
  }

  health(): Promise<{ status: string; datasets: string[] }> {
    return this.request("GET", "/health");
  }

  uploadDataset(cvml: string, statics: unknown[] = []): Promise<UploadResponse> {
    return this.request("POST", "/datasets", { version: 1, cvml, statics });
  }

  getRange(datasetId: string): Promise<RangeResponse> {
    return this.request("GET", `/datasets/${encodeURIComponent(datasetId)}/range`);
  }

  getFrame(datasetId: string, frame: number): Promise<FrameResponse> {
    return this.request("GET", `/datasets/${encodeURIComponent(datasetId)}/frames/${frame}`);
  }

  deriveFrameTemplate(sketch: SketchPayload): Promise<FrameTemplateWire> {
    return this.request("POST", "/templates/frame", sketch);
  }

  deriveEventTemplate(
    id: string,
    steps: EventStepWire[],
    bars: BarPayload[],
    constraints: ConstraintTriple[] = [],
  ): Promise<EventTemplateWire & { constraints: ConstraintTriple[] }> {
    return this.request("POST", "/templates/event", { version: 1, id, steps, bars, constraints });
  }

  registerTemplate(datasetId: string, template: EventTemplateWire): Promise<unknown> {
    return this.request("POST", "/monitor/templates", {
      version: 1,
      dataset: datasetId,
      template,
    });
  }

  removeTemplate(eventId: string): Promise<unknown> {
    return this.request("DELETE", `/monitor/templates/${encodeURIComponent(eventId)}`);
  }

  listDetections(since = 0): Promise<DetectionsResponse> {
    return this.request("GET", `/monitor/detections?since=${since}`);
  }
}
