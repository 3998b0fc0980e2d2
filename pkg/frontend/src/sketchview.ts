// Sketch search: a 4x4 cell-snapped canvas painted from the fixed palette.
// The canvas IS the descriptor grid, so blank cells are exactly the cells
// the engine ignores.

import { AppBus } from "./bus.js";
import { PALETTE, SKETCH_GRID, cssColor } from "./palette.js";
import { CanvasCells, emptyCanvas, paint, paintedCount, serializeSketch } from "./sketchmodel.js";
import { el, showMenu } from "./ui.js";
import { NeighborsResponse } from "./types.js";

export class SketchView {
  root: HTMLElement;
  private cells: CanvasCells = emptyCanvas();
  private selected: number | null = 4; // red, a sensible default brush
  private gridBox: HTMLElement;
  private paletteBox: HTMLElement;
  private resultsBox: HTMLElement;
  private kInput: HTMLInputElement;
  private methodSel: HTMLSelectElement;
  private searchTimer: number | null = null;
  private ticket = 0;

  constructor(private bus: AppBus) {
    this.gridBox = el("div", { class: "sketch-grid" });
    this.paletteBox = el("div", { class: "palette" });
    this.resultsBox = el("div", { class: "results" });
    this.kInput = el("input", { type: "number", min: "1", value: "12", class: "k-input" });
    this.methodSel = el("select", {});
    for (const m of ["shot", "uniform"]) this.methodSel.append(el("option", { value: m }, m));
    this.methodSel.value = bus.health.default_method;
    const clearBtn = el("button", {}, "clear");

    this.root = el("div", { class: "view sketch-view" },
      el("div", { class: "toolbar" },
        el("label", {}, "k "), this.kInput,
        el("label", {}, " segments "), this.methodSel, clearBtn),
      el("div", { class: "sketch-columns" },
        el("div", {}, this.paletteBox, this.gridBox,
          el("div", { class: "hint" }, "left click paints, right click blanks; blank cells are ignored")),
        this.resultsBox),
    );

    clearBtn.addEventListener("click", () => {
      this.cells = emptyCanvas();
      this.renderGrid();
      this.scheduleSearch();
    });
    this.kInput.addEventListener("change", () => this.scheduleSearch());
    this.methodSel.addEventListener("change", () => this.scheduleSearch());
    this.renderPalette();
    this.renderGrid();
  }

  private renderPalette(): void {
    this.paletteBox.replaceChildren();
    for (const color of PALETTE) {
      const swatch = el("div", {
        class: color.index === this.selected ? "swatch active" : "swatch",
        title: color.name,
      });
      swatch.style.background = cssColor(color.index);
      swatch.addEventListener("click", () => {
        this.selected = color.index;
        this.renderPalette();
      });
      this.paletteBox.append(swatch);
    }
    const eraser = el("div", {
      class: this.selected === null ? "swatch eraser active" : "swatch eraser",
      title: "blank (ignored)",
    }, "∅");
    eraser.addEventListener("click", () => {
      this.selected = null;
      this.renderPalette();
    });
    this.paletteBox.append(eraser);
  }

  private renderGrid(): void {
    this.gridBox.replaceChildren();
    for (let r = 0; r < SKETCH_GRID; r++) {
      for (let c = 0; c < SKETCH_GRID; c++) {
        const v = this.cells[r * SKETCH_GRID + c];
        const cell = el("div", { class: v === null ? "scell blank" : "scell" });
        if (v !== null) cell.style.background = cssColor(v);
        cell.addEventListener("click", () => {
          this.cells = paint(this.cells, r, c, this.selected);
          this.renderGrid();
          this.scheduleSearch();
        });
        cell.addEventListener("contextmenu", (ev) => {
          ev.preventDefault();
          this.cells = paint(this.cells, r, c, null);
          this.renderGrid();
          this.scheduleSearch();
        });
        this.gridBox.append(cell);
      }
    }
  }

  private scheduleSearch(): void {
    if (this.searchTimer !== null) window.clearTimeout(this.searchTimer);
    this.searchTimer = window.setTimeout(() => void this.search(), 250);
  }

  private async search(): Promise<void> {
    if (paintedCount(this.cells) === 0) {
      this.resultsBox.replaceChildren(
        el("div", { class: "hint" }, "paint at least one cell to search"));
      return;
    }
    const payload = serializeSketch(this.cells, Number(this.kInput.value) || 12,
                                    this.methodSel.value);
    const ticket = ++this.ticket;
    try {
      const resp = await this.bus.api.sketch(payload.cells, payload.k, payload.method);
      if (ticket === this.ticket) this.renderResults(resp);
    } catch (err) {
      if (ticket === this.ticket) this.bus.banner(String(err));
    }
  }

  private renderResults(resp: NeighborsResponse): void {
    this.resultsBox.replaceChildren(
      el("div", { class: "hint" }, `${resp.results.length} matches (${resp.metric})`));
    const box = el("div", { class: "result-day" });
    for (const n of resp.results) {
      const canvas = el("canvas", { width: "64", height: "48" });
      const cell = el("div", { class: "map-cell" }, canvas,
        el("div", { class: "cell-label" }, `#${n.rank} d=${n.score.toFixed(4)}`));
      this.bus.thumbs.paint(canvas, n.day_id, n.keyframe).catch(() => undefined);
      cell.addEventListener("click", () => this.bus.openDay(n.day_id, n.keyframe));
      cell.addEventListener("contextmenu", (ev) => {
        ev.preventDefault();
        showMenu(ev.clientX, ev.clientY, [
          { label: "Similar shots", action: () => this.bus.showSimilar(n.segment_id) },
          { label: "Open day", action: () => this.bus.openDay(n.day_id, n.keyframe) },
          { label: "Submit keyframe",
            action: () => this.bus.submitFrame(n.day_id, n.keyframe) },
        ]);
      });
      box.append(cell);
    }
    this.resultsBox.append(box);
  }
}
