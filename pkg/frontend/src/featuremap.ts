// Feature-map browser: zoomable keyframe grid with minimap, level bars and
// the spiral autopilot.

import { Autopilot } from "./autopilot.js";
import { AppBus } from "./bus.js";
import { cellAt, centeredOrigin, levelBars, locateCell, zoomCell } from "./minimap.js";
import { el, showMenu } from "./ui.js";
import { Tile, TileCell } from "./types.js";

const AUTOPILOT_INTERVAL_MS = 800;
const MINIMAP_W = 160;
const MINIMAP_H = 120;

export class FeatureMapView {
  root: HTMLElement;
  private criterion = "color";
  private method: string;
  private level = 0;
  private row0 = 0;
  private col0 = 0;
  private viewRows = 8;
  private viewCols = 8;
  private tile: Tile | null = null;
  private grid: HTMLElement;
  private minimap: HTMLCanvasElement;
  private barsBox: HTMLElement;
  private statusBox: HTMLElement;
  private zoomInBtn: HTMLButtonElement;
  private zoomOutBtn: HTMLButtonElement;
  private pilot: Autopilot | null = null;
  private pilotTimer: number | null = null;
  private pilotCell: [number, number] | null = null;
  private focus: [number, number] | null = null;

  constructor(private bus: AppBus) {
    this.method = bus.health.default_method;
    this.viewRows = 8;
    this.viewCols = 8;

    const criterionSel = el("select", { class: "criterion" });
    const methodSel = el("select", {});
    for (const m of ["shot", "uniform"]) {
      methodSel.append(el("option", { value: m }, m));
    }
    methodSel.value = this.method;
    this.zoomInBtn = el("button", {}, "zoom in");
    this.zoomOutBtn = el("button", {}, "zoom out");
    const pilotStart = el("button", {}, "autopilot");
    const pilotPause = el("button", {}, "pause");
    const pilotStop = el("button", {}, "stop");
    this.statusBox = el("span", { class: "map-status" });
    this.grid = el("div", { class: "map-grid" });
    this.minimap = el("canvas", {
      class: "minimap", width: String(MINIMAP_W), height: String(MINIMAP_H),
    });
    this.barsBox = el("div", { class: "level-bars" });

    this.root = el("div", { class: "view map-view" },
      el("div", { class: "toolbar" },
        el("label", {}, "criterion "), criterionSel,
        el("label", {}, " method "), methodSel,
        this.zoomInBtn, this.zoomOutBtn,
        pilotStart, pilotPause, pilotStop, this.statusBox),
      this.grid,
      el("div", { class: "minimap-box" }, this.minimap, this.barsBox),
    );

    this.populateCriteria(criterionSel);
    criterionSel.addEventListener("change", () => {
      this.criterion = criterionSel.value;
      this.resetToTop();
    });
    methodSel.addEventListener("change", () => {
      this.method = methodSel.value;
      this.resetToTop();
    });
    this.zoomInBtn.addEventListener("click", () => this.zoom(-1));
    this.zoomOutBtn.addEventListener("click", () => this.zoom(1));
    pilotStart.addEventListener("click", () => this.startAutopilot());
    pilotPause.addEventListener("click", () => this.togglePause(pilotPause));
    pilotStop.addEventListener("click", () => this.stopAutopilot());
    this.minimap.addEventListener("click", (ev) => this.minimapJump(ev));
  }

  private async populateCriteria(sel: HTMLSelectElement): Promise<void> {
    try {
      const maps = await this.bus.api.maps();
      for (const c of maps.criteria) sel.append(el("option", { value: c }, c));
      for (const c of maps.concept_criteria.slice(0, 50)) {
        sel.append(el("option", { value: c }, c));
      }
      this.viewRows = maps.viewport;
      this.viewCols = maps.viewport;
      sel.value = this.criterion;
      await this.resetToTop();
    } catch (err) {
      this.bus.banner(String(err));
    }
  }

  /** Open the coarsest level (the whole map fits the viewport there). */
  private async resetToTop(): Promise<void> {
    this.stopAutopilot();
    try {
      const probe = await this.bus.api.tile(this.criterion, this.method, 0, 0, 0, 1, 1);
      this.level = probe.levels - 1;
      this.row0 = 0;
      this.col0 = 0;
      await this.refresh();
    } catch (err) {
      this.bus.banner(String(err));
    }
  }

  private async refresh(): Promise<void> {
    try {
      this.tile = await this.bus.api.tile(
        this.criterion, this.method, this.level,
        this.row0, this.col0, this.viewRows, this.viewCols);
      this.row0 = this.tile.row0;
      this.col0 = this.tile.col0;
      this.renderGrid();
      this.renderMinimap();
    } catch (err) {
      this.bus.banner(String(err));
    }
  }

  private renderGrid(): void {
    const tile = this.tile;
    if (!tile) return;
    this.grid.replaceChildren();
    this.grid.style.gridTemplateColumns = `repeat(${tile.cols}, 72px)`;
    for (const cell of tile.cells) {
      this.grid.append(this.renderCell(cell));
    }
    this.statusBox.textContent =
      `level ${tile.level + 1}/${tile.levels}, ` +
      `${tile.level_rows}x${tile.level_cols} cells, window @ (${tile.row0}, ${tile.col0})`;
    this.zoomInBtn.disabled = tile.level === 0;
    this.zoomOutBtn.disabled = tile.level >= tile.levels - 1;
  }

  private renderCell(cell: TileCell): HTMLElement {
    const box = el("div", { class: "map-cell" });
    if (this.pilotCell && cell.row === this.pilotCell[0] && cell.col === this.pilotCell[1]) {
      box.classList.add("pilot");
    }
    if (this.focus && cell.row === this.focus[0] && cell.col === this.focus[1]) {
      box.classList.add("focus");
    }
    if (cell.empty || cell.segment_id === null) {
      box.classList.add("empty");
      return box;
    }
    const canvas = el("canvas", { width: "64", height: "48" });
    box.append(canvas, el("div", { class: "cell-label" },
      `#${cell.segment_id} ${cell.score?.toFixed(3) ?? ""}`));
    if (cell.day_id != null && cell.keyframe != null) {
      const dayId = cell.day_id;
      const keyframe = cell.keyframe;
      this.bus.thumbs.paint(canvas, dayId, keyframe).catch(() => undefined);
      box.addEventListener("contextmenu", (ev) => {
        ev.preventDefault();
        showMenu(ev.clientX, ev.clientY, [
          { label: "Similar shots", action: () => this.bus.showSimilar(cell.segment_id!) },
          { label: "Open day", action: () => this.bus.openDay(dayId, keyframe) },
          { label: "Submit keyframe", action: () => this.bus.submitFrame(dayId, keyframe) },
        ]);
      });
      box.addEventListener("click", () => {
        this.focus = [cell.row, cell.col];
        this.renderGrid();
        this.renderMinimap();
      });
      box.title = `${dayId} frames around ${keyframe}`;
    }
    return box;
  }

  private renderMinimap(): void {
    const tile = this.tile;
    const ctx = this.minimap.getContext("2d");
    if (!tile || !ctx) return;
    ctx.fillStyle = "#20242c";
    ctx.fillRect(0, 0, MINIMAP_W, MINIMAP_H);
    // viewport rectangle
    ctx.strokeStyle = "#7fd0ff";
    ctx.strokeRect(
      (tile.col0 / tile.level_cols) * MINIMAP_W,
      (tile.row0 / tile.level_rows) * MINIMAP_H,
      (tile.cols / tile.level_cols) * MINIMAP_W,
      (tile.rows / tile.level_rows) * MINIMAP_H);
    // position marker: center of the focused cell, or of the window
    const mark = this.focus
      ? locateCell(this.focus[0], this.focus[1], tile.level_rows, tile.level_cols)
      : locateCell(tile.row0 + tile.rows / 2 - 0.5, tile.col0 + tile.cols / 2 - 0.5,
                   tile.level_rows, tile.level_cols);
    ctx.fillStyle = "#ffd166";
    ctx.beginPath();
    ctx.arc(mark.x * MINIMAP_W, mark.y * MINIMAP_H, 3, 0, Math.PI * 2);
    ctx.fill();
    // zoom-level bars, one per pyramid level (current one highlighted)
    this.barsBox.replaceChildren();
    for (const bar of levelBars(tile.levels, tile.level)) {
      this.barsBox.append(el("div", {
        class: bar.active ? "level-bar active" : "level-bar",
        title: `level ${bar.index + 1}`,
      }));
    }
  }

  private minimapJump(ev: MouseEvent): void {
    const tile = this.tile;
    if (!tile) return;
    const rect = this.minimap.getBoundingClientRect();
    const x = (ev.clientX - rect.left) / rect.width;
    const y = (ev.clientY - rect.top) / rect.height;
    const cell = cellAt(x, y, tile.level_rows, tile.level_cols);
    const origin = centeredOrigin(cell.row, cell.col, tile.level_rows, tile.level_cols,
                                  this.viewRows, this.viewCols);
    this.row0 = origin.row0;
    this.col0 = origin.col0;
    this.focus = [cell.row, cell.col];
    void this.refresh();
  }

  /** Zoom keeping the focused (or window-center) cell's region on screen. */
  private zoom(delta: number): void {
    const tile = this.tile;
    if (!tile) return;
    const target = this.level + delta;
    if (target < 0 || target >= tile.levels) return;
    const anchor = this.focus
      ?? [this.row0 + Math.floor(tile.rows / 2), this.col0 + Math.floor(tile.cols / 2)];
    const mapped = zoomCell(anchor[0], anchor[1], this.level, target);
    this.level = target;
    const probeRows = Math.max(1, Math.ceil(tile.level_rows / Math.pow(2, delta)));
    const probeCols = Math.max(1, Math.ceil(tile.level_cols / Math.pow(2, delta)));
    const origin = centeredOrigin(mapped.row, mapped.col, probeRows, probeCols,
                                  this.viewRows, this.viewCols);
    this.row0 = origin.row0;
    this.col0 = origin.col0;
    this.focus = [mapped.row, mapped.col];
    this.stopAutopilot();
    void this.refresh();
  }

  // --- autopilot -----------------------------------------------------------

  private startAutopilot(): void {
    const tile = this.tile;
    if (!tile) return;
    this.stopAutopilot();
    this.pilot = new Autopilot(tile.level_rows, tile.level_cols);
    const first = this.pilot.start();
    void this.moveCursor(first);
    this.pilotTimer = window.setInterval(() => {
      const next = this.pilot?.advance() ?? null;
      if (next === null) {
        this.stopAutopilot(false);
        return;
      }
      void this.moveCursor(next);
    }, AUTOPILOT_INTERVAL_MS);
  }

  private async moveCursor(cell: readonly [number, number]): Promise<void> {
    this.pilotCell = [cell[0], cell[1]];
    const tile = this.tile;
    if (tile) {
      const [r, c] = cell;
      const inside = r >= this.row0 && r < this.row0 + tile.rows
        && c >= this.col0 && c < this.col0 + tile.cols;
      if (!inside) {
        const origin = centeredOrigin(r, c, tile.level_rows, tile.level_cols,
                                      this.viewRows, this.viewCols);
        this.row0 = origin.row0;
        this.col0 = origin.col0;
        await this.refresh();
        return;
      }
    }
    this.renderGrid();
  }

  private togglePause(btn: HTMLButtonElement): void {
    if (!this.pilot) return;
    if (this.pilot.state === "running") {
      this.pilot.pause();
      if (this.pilotTimer !== null) window.clearInterval(this.pilotTimer);
      this.pilotTimer = null;
      btn.textContent = "resume";
    } else if (this.pilot.state === "paused") {
      const next = this.pilot.resume();
      if (next) void this.moveCursor(next);
      this.pilotTimer = window.setInterval(() => {
        const cell = this.pilot?.advance() ?? null;
        if (cell === null) {
          this.stopAutopilot(false);
          return;
        }
        void this.moveCursor(cell);
      }, AUTOPILOT_INTERVAL_MS);
      btn.textContent = "pause";
    }
  }

  private stopAutopilot(clearCursor = true): void {
    if (this.pilotTimer !== null) window.clearInterval(this.pilotTimer);
    this.pilotTimer = null;
    this.pilot?.stop();
    this.pilot = null;
    if (clearCursor) {
      this.pilotCell = null;
      this.renderGrid();
    }
  }
}
