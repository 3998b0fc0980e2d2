// Spiral walk used by the autopilot: start at the center cell, expand
// outward in run lengths 1,1,2,2,3,3,... turning right, down, left, up;
// coordinates outside the grid are skipped, so the walk is a permutation of
// the grid for any rows x cols.

export type Cell = readonly [row: number, col: number];

export function spiralOrder(rows: number, cols: number): Cell[] {
  if (rows < 1 || cols < 1) throw new Error("grid must be at least 1x1");
  let r = Math.floor((rows - 1) / 2);
  let c = Math.floor((cols - 1) / 2);
  const out: Cell[] = [[r, c]];
  const total = rows * cols;
  const dirs: Cell[] = [[0, 1], [1, 0], [0, -1], [-1, 0]];
  let run = 1;
  let d = 0;
  while (out.length < total) {
    for (let leg = 0; leg < 2; leg++) {
      const [dr, dc] = dirs[d];
      for (let step = 0; step < run; step++) {
        r += dr;
        c += dc;
        if (r >= 0 && r < rows && c >= 0 && c < cols) out.push([r, c]);
      }
      d = (d + 1) % 4;
    }
    run += 1;
  }
  return out;
}
