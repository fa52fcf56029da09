import { describe, expect, it } from "vitest";

import { buildPlot, curveCsv, parseCsv } from "../src/curves.js";
import { forwardTiltGesture } from "../src/edits.js";
import { initialState, onModelHash, paramsFromSliders,
         setSlider } from "../src/state.js";

describe("view state invariants", () => {
  it("slider values stay within configured bounds", () => {
    let s = initialState();
    s = setSlider(s, "bone.femur.elongate", 99);
    expect(s.sliders["bone.femur.elongate"]).toBe(2.5);
    s = setSlider(s, "bone.femur.elongate", -3);
    expect(s.sliders["bone.femur.elongate"]).toBe(0.5);
  });

  it("pending edit is discarded when the model hash changes", () => {
    let s = onModelHash(initialState(), "h1");
    s = { ...s, pendingEdit: { joint: "femur_l",
                               payload: forwardTiltGesture(30, 0.63) } };
    s = onModelHash(s, "h1");
    expect(s.pendingEdit).not.toBeNull();
    s = onModelHash(s, "h2");
    expect(s.pendingEdit).toBeNull();
  });

  it("identity sliders produce an empty params document", () => {
    const s = initialState();
    expect(paramsFromSliders(s.sliders)).toEqual({});
  });

  it("non-default sliders land in their config sections", () => {
    let s = initialState();
    s = setSlider(s, "bone.femur.elongate", 1.3);
    s = setSlider(s, "trunk.expand", 2.0);
    expect(paramsFromSliders(s.sliders)).toEqual({
      "bone.femur": { elongate: 1.3 },
      trunk: { expand: 2.0 },
    });
  });
});

describe("curve plotting", () => {
  it("normalizes series into the unit square with a shared range", () => {
    const plot = buildPlot([
      { label: "a", thetas: [0, 0.5, 1], values: [1, 2, 3] },
      { label: "b", thetas: [0, 0.5, 1], values: [3, 2, 1] },
    ]);
    expect(plot.yMin).toBe(1);
    expect(plot.yMax).toBe(3);
    expect(plot.series[0].points[0]).toEqual({ x: 0, y: 0 });
    expect(plot.series[1].points[0]).toEqual({ x: 0, y: 1 });
  });

  it("CSV download equals the plotted samples", () => {
    const series = [
      { label: "reference", thetas: [0, 0.5, 1], values: [0.3, 0.2, 0.25] },
      { label: "current", thetas: [0, 0.5, 1], values: [0.31, 0.21, 0.24] },
    ];
    const { header, rows } = parseCsv(curveCsv(series));
    expect(header).toEqual(["theta", "reference", "current"]);
    expect(rows).toHaveLength(3);
    rows.forEach((row, i) => {
      expect(row[0]).toBeCloseTo(series[0].thetas[i], 12);
      expect(row[1]).toBeCloseTo(series[0].values[i], 12);
      expect(row[2]).toBeCloseTo(series[1].values[i], 12);
    });
  });
});
