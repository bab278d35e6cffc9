import { describe, expect, it } from "vitest";

import { TimelineModel } from "../src/timeline.js";

describe("TimelineModel", () => {
  it("rejects non-positive widths and duplicate step ids", () => {
    const model = new TimelineModel();
    model.addBar("a", 0, 10);
    expect(() => model.addBar("a", 20, 30)).toThrow(/duplicate/);
    expect(() => model.addBar("b", 5, 5)).toThrow(/positive/);
    expect(() => model.addBar("b", 9, 3)).toThrow(/positive/);
  });

  it("keeps the minimum width while dragging edges", () => {
    const model = new TimelineModel();
    model.addBar("a", 10, 30);
    model.dragEdge("a", "left", 29.5);
    const bar = model.allBars()[0]!;
    expect(bar.x1 - bar.x0).toBeGreaterThanOrEqual(1);
    model.dragEdge("a", "right", 0);
    expect(bar.x1 - bar.x0).toBeGreaterThanOrEqual(1);
  });

  it("moves whole bars and serializes payloads", () => {
    const model = new TimelineModel();
    model.addBar("prior", 0, 10);
    model.addBar("anchor", 20, 30);
    model.moveBar("prior", 5);
    expect(model.toPayload()).toEqual([
      { step_id: "prior", x0: 5, x1: 15 },
      { step_id: "anchor", x0: 20, x1: 30 },
    ]);
    model.removeBar("prior");
    expect(model.allBars().map((b) => b.stepId)).toEqual(["anchor"]);
  });
});
