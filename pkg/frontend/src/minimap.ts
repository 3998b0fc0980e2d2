// Minimap math: position marker, zoom-level bars and click-to-jump mapping.
// The marker uses level-relative unit coordinates (cell center / level dims),
// identical at every level, so it stays put across zooms of the same region.

export interface LevelBar {
  index: number;
  active: boolean;
}

export function levelBars(levels: number, currentLevel: number): LevelBar[] {
  return Array.from({ length: levels }, (_, i) => ({
    index: i,
    active: i === currentLevel,
  }));
}

export function locateCell(
  row: number, col: number, rows: number, cols: number
): { x: number; y: number } {
  return { x: (col + 0.5) / cols, y: (row + 0.5) / rows };
}

/** Inverse of locateCell up to cell resolution: unit coords to the cell under
 * them, clamped to the grid. */
export function cellAt(
  x: number, y: number, rows: number, cols: number
): { row: number; col: number } {
  const clamp = (v: number, hi: number) => Math.max(0, Math.min(hi, v));
  return {
    row: clamp(Math.floor(y * rows), rows - 1),
    col: clamp(Math.floor(x * cols), cols - 1),
  };
}

/** Viewport origin that centers the given cell, clamped to the level. */
export function centeredOrigin(
  row: number, col: number, rows: number, cols: number,
  viewRows: number, viewCols: number
): { row0: number; col0: number } {
  const clamp = (v: number, hi: number) => Math.max(0, Math.min(hi, v));
  return {
    row0: clamp(row - Math.floor(viewRows / 2), Math.max(0, rows - viewRows)),
    col0: clamp(col - Math.floor(viewCols / 2), Math.max(0, cols - viewCols)),
  };
}

/** The level-l cell containing the same map region when zooming. */
export function zoomCell(
  row: number, col: number, fromLevel: number, toLevel: number
): { row: number; col: number } {
  const shift = toLevel - fromLevel;
  if (shift >= 0) {
    return { row: row >> shift, col: col >> shift };
  }
  return { row: row << -shift, col: col << -shift };
}
