// Sketch canvas state: a 4x4 grid of palette indices (null = blank). The
// state serializes 1:1 into the /api/sketch payload, so what the user paints
// is exactly what the engine matches.

import { SKETCH_GRID } from "./palette.js";

export type CanvasCells = (number | null)[]; // row-major, length 16

export function emptyCanvas(): CanvasCells {
  return new Array(SKETCH_GRID * SKETCH_GRID).fill(null);
}

export function paint(cells: CanvasCells, row: number, col: number,
                      color: number | null): CanvasCells {
  const out = [...cells];
  out[row * SKETCH_GRID + col] = color;
  return out;
}

export function paintedCount(cells: CanvasCells): number {
  return cells.filter((c) => c !== null).length;
}

export function serializeSketch(cells: CanvasCells, k: number, method?: string) {
  const payload: { cells: CanvasCells; k: number; method?: string } = {
    cells: [...cells], k,
  };
  if (method) payload.method = method;
  return payload;
}

export function deserializeSketch(payload: { cells: CanvasCells }): CanvasCells {
  if (payload.cells.length !== SKETCH_GRID * SKETCH_GRID) {
    throw new Error(`sketch payload must have ${SKETCH_GRID * SKETCH_GRID} cells`);
  }
  return [...payload.cells];
}
