// Autopilot stepping logic, kept free of timers and DOM so it can be tested
// against the spiral oracle; the map view owns the interval.

import { Cell, spiralOrder } from "./spiral.js";

export type AutopilotState = "idle" | "running" | "paused" | "done";

export class Autopilot {
  readonly path: Cell[];
  private pos = -1;
  state: AutopilotState = "idle";

  constructor(rows: number, cols: number) {
    this.path = spiralOrder(rows, cols);
  }

  start(): Cell {
    this.pos = 0;
    this.state = "running";
    return this.path[0];
  }

  /** Next unvisited cell, or null once the walk is complete. */
  advance(): Cell | null {
    if (this.state !== "running") return null;
    if (this.pos + 1 >= this.path.length) {
      this.state = "done";
      return null;
    }
    this.pos += 1;
    return this.path[this.pos];
  }

  pause(): void {
    if (this.state === "running") this.state = "paused";
  }

  /** Resume continues from the next unvisited cell. */
  resume(): Cell | null {
    if (this.state !== "paused") return null;
    this.state = "running";
    return this.advance();
  }

  stop(): void {
    this.state = "idle";
    this.pos = -1;
  }

  get current(): Cell | null {
    return this.pos >= 0 && this.pos < this.path.length ? this.path[this.pos] : null;
  }

  get visited(): number {
    return this.pos + 1;
  }
}
