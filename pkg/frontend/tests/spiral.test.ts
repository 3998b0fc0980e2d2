import { describe, expect, it } from "vitest";
import { spiralOrder } from "../src/spiral.js";

describe("spiralOrder", () => {
  it("handles 1x1", () => {
    expect(spiralOrder(1, 1)).toEqual([[0, 0]]);
  });

  it("walks a 2x2 grid clockwise from the top-left center", () => {
    expect(spiralOrder(2, 2)).toEqual([[0, 0], [0, 1], [1, 1], [1, 0]]);
  });

  it("walks a 3x3 grid in the documented order", () => {
    expect(spiralOrder(3, 3)).toEqual([
      [1, 1], [1, 2], [2, 2], [2, 1], [2, 0], [1, 0], [0, 0], [0, 1], [0, 2],
    ]);
  });

  it("is a permutation for all grids up to 12x12", () => {
    for (let rows = 1; rows <= 12; rows++) {
      for (let cols = 1; cols <= 12; cols++) {
        const walk = spiralOrder(rows, cols);
        expect(walk.length).toBe(rows * cols);
        const seen = new Set(walk.map(([r, c]) => `${r},${c}`));
        expect(seen.size).toBe(rows * cols);
      }
    }
  });

  it("starts at the center cell", () => {
    expect(spiralOrder(5, 9)[0]).toEqual([2, 4]);
    expect(spiralOrder(4, 4)[0]).toEqual([1, 1]);
  });
});
