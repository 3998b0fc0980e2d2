// Filter board: draggable predicate chips grouped into AND containers that
// are OR-ed together, kept in two-way sync with a DSL text box. Every board
// change issues the query immediately; parse errors never clear the last
// good results.

import { AppBus } from "./bus.js";
import { DslParseError, parseQuery, printQuery } from "./dsl.js";
import {
  BoardState,
  ChipState,
  CmpOp,
  KEY_FIELDS,
  Predicate,
  WEEKDAY_NAMES,
  boardFromPredicates,
  compileBoard,
  describePredicate,
  emptyBoard,
  moveChip,
} from "./querymodel.js";
import { tokenizeText } from "./dsl.js";
import { el, showMenu } from "./ui.js";
import { NeighborsResponse, QueryResponse } from "./types.js";

export class BoardView {
  root: HTMLElement;
  private board: BoardState = emptyBoard();
  private boardBox: HTMLElement;
  private dslBox: HTMLTextAreaElement;
  private dslError: HTMLElement;
  private resultsBox: HTMLElement;
  private methodSel: HTMLSelectElement;
  private queryCounter = 0;
  private syncingText = false;

  constructor(private bus: AppBus) {
    this.boardBox = el("div", { class: "board" });
    this.dslBox = el("textarea", { class: "dsl-box", rows: "2", spellcheck: "false" });
    this.dslError = el("div", { class: "dsl-error" });
    this.resultsBox = el("div", { class: "results" });
    this.methodSel = el("select", {});
    for (const m of ["shot", "uniform"]) this.methodSel.append(el("option", { value: m }, m));
    this.methodSel.value = bus.health.default_method;
    const addContainer = el("button", {}, "add OR container");

    this.root = el("div", { class: "view board-view" },
      el("div", { class: "toolbar" },
        el("label", {}, "segments "), this.methodSel, addContainer),
      this.boardBox,
      el("h3", {}, "query text"),
      this.dslBox, this.dslError,
      el("h3", {}, "results"),
      this.resultsBox,
    );

    addContainer.addEventListener("click", () => {
      this.board = {
        ...this.board,
        containers: [...this.board.containers,
          { containerId: this.board.nextId, chips: [] }],
        nextId: this.board.nextId + 1,
      };
      this.boardChanged();
    });
    this.methodSel.addEventListener("change", () => this.runQuery());
    this.dslBox.addEventListener("input", () => this.textChanged());
    this.renderBoard();
  }

  /** Called by the shell when another view requests a similarity search. */
  async showSimilar(segmentId: number): Promise<void> {
    const metric = this.bus.health.vectors_available ? "cosine_deep" : "histmap_l1";
    try {
      const resp = await this.bus.api.similar(segmentId, metric, 12);
      this.renderNeighbors(resp, `shots similar to #${segmentId} (${metric})`);
    } catch (err) {
      this.bus.banner(String(err));
    }
  }

  // --- board edits ------------------------------------------------------------

  private boardChanged(): void {
    this.renderBoard();
    this.syncTextFromBoard();
    this.runQuery();
  }

  private syncTextFromBoard(): void {
    const groups = this.board.containers
      .filter((c) => c.chips.length > 0)
      .map((c) => c.chips.map((ch) => ch.predicate));
    this.syncingText = true;
    this.dslBox.value = groups.length ? printQuery({ containers: groups }) : "";
    this.syncingText = false;
    this.dslError.textContent = "";
  }

  private textChanged(): void {
    if (this.syncingText) return;
    const text = this.dslBox.value;
    if (!text.trim()) {
      this.dslError.textContent = "";
      return;
    }
    try {
      const parsed = parseQuery(text);
      this.dslError.textContent = "";
      this.board = boardFromPredicates(parsed.containers);
      this.renderBoard();
      this.runQuery();
    } catch (err) {
      if (err instanceof DslParseError) {
        const caret = " ".repeat(Math.max(0, err.charPos)) + "^";
        this.dslError.textContent =
          `parse error at ${err.line}:${err.column}: ${err.message}` +
          (err.expected.length ? ` (expected ${err.expected.join(", ")})` : "") +
          `\n${text.split("\n")[err.line - 1] ?? ""}\n${caret}`;
        // board and results stay as they were
      } else {
        this.bus.banner(String(err));
      }
    }
  }

  private renderBoard(): void {
    this.boardBox.replaceChildren();
    for (const container of this.board.containers) {
      const card = el("div", { class: "container-card" },
        el("div", { class: "container-title" }, "ALL of (AND)"));
      card.addEventListener("dragover", (ev) => ev.preventDefault());
      card.addEventListener("drop", (ev) => {
        ev.preventDefault();
        const chipId = Number(ev.dataTransfer?.getData("text/chip"));
        if (!Number.isNaN(chipId)) {
          this.board = moveChip(this.board, chipId, container.containerId);
          this.boardChanged();
        }
      });
      for (const chip of container.chips) {
        card.append(this.renderChip(chip));
      }
      card.append(this.renderAddForm(container.containerId));
      this.boardBox.append(card);
      this.boardBox.append(el("div", { class: "or-sep" }, "OR"));
    }
    this.boardBox.lastChild?.remove(); // trailing OR separator
  }

  private renderChip(chip: ChipState): HTMLElement {
    const node = el("div", { class: "chip", draggable: "true" },
      el("span", {}, describePredicate(chip.predicate)),
      el("button", { class: "chip-x" }, "x"));
    node.addEventListener("dragstart", (ev) => {
      ev.dataTransfer?.setData("text/chip", String(chip.chipId));
    });
    node.querySelector("button")!.addEventListener("click", () => {
      this.board = {
        ...this.board,
        containers: this.board.containers.map((c) => ({
          ...c, chips: c.chips.filter((ch) => ch.chipId !== chip.chipId),
        })),
      };
      this.boardChanged();
    });
    return node;
  }

  private renderAddForm(containerId: number): HTMLElement {
    const kind = el("select", { class: "add-kind" });
    for (const k of ["weekday", "time", "loc", "geo", "speed", "hr", "steps",
                     "cal", "activity", "concept", "ocr"]) {
      kind.append(el("option", { value: k }, k));
    }
    const value = el("input", { type: "text", class: "add-value",
                                placeholder: "mon,tue / 10:00-14:30 / >30 / text" });
    const addBtn = el("button", {}, "+");
    const form = el("div", { class: "add-form" }, kind, value, addBtn);
    const submit = () => {
      const pred = this.predicateFromInput(kind.value, value.value.trim());
      if (!pred) {
        this.bus.banner(`cannot read ${kind.value} filter from "${value.value}"`);
        return;
      }
      this.board = {
        ...this.board,
        containers: this.board.containers.map((c) =>
          c.containerId === containerId
            ? { ...c, chips: [...c.chips, { chipId: this.board.nextId, predicate: pred }] }
            : c),
        nextId: this.board.nextId + 1,
      };
      value.value = "";
      this.boardChanged();
    };
    addBtn.addEventListener("click", submit);
    value.addEventListener("keydown", (ev) => {
      if (ev.key === "Enter") submit();
    });
    return form;
  }

  /** Lenient chip input: each kind takes the obvious textual form. */
  private predicateFromInput(kind: string, text: string): Predicate | null {
    try {
      switch (kind) {
        case "weekday": {
          const days = text.toLowerCase().split(",").map((d) =>
            WEEKDAY_NAMES.indexOf(d.trim() as typeof WEEKDAY_NAMES[number]));
          if (days.some((d) => d < 0) || days.length === 0) return null;
          return { kind: "weekday", days: [...new Set(days)].sort((a, b) => a - b) };
        }
        case "time": {
          const m = text.match(/^(\d{1,2}):(\d{2})\s*-\s*(\d{1,2}):(\d{2})$/);
          if (!m) return null;
          return { kind: "time", start: Number(m[1]) * 60 + Number(m[2]),
                   end: Number(m[3]) * 60 + Number(m[4]) };
        }
        case "loc":
          return text ? { kind: "loc", name: text } : null;
        case "geo": {
          const nums = text.replace(/[[\]]/g, "").split(",").map(Number);
          if (nums.length !== 4 || nums.some(Number.isNaN)) return null;
          return { kind: "geo", latMin: nums[0], latMax: nums[1],
                   lonMin: nums[2], lonMax: nums[3] };
        }
        case "speed": case "hr": case "steps": case "cal": {
          const field = KEY_FIELDS[kind];
          let m = text.match(/^(<=|>=|<|>|=)\s*(-?[\d.]+)$/);
          if (m) {
            return { kind: "range", field, op: m[1] as CmpOp, value: Number(m[2]) };
          }
          m = text.match(/^([\d.]+)\s*-\s*([\d.]+)$/);
          if (m) return { kind: "between", field, lo: Number(m[1]), hi: Number(m[2]) };
          return null;
        }
        case "activity":
          return text ? { kind: "activity", name: text } : null;
        case "concept": {
          const m = text.match(/^(\S+?)(?:@([\d.]+))?$/);
          if (!m) return null;
          return { kind: "concept", id: m[1], minConf: m[2] ? Number(m[2]) : 0 };
        }
        case "ocr":
          return { kind: "ocr", tokens: tokenizeText(text) };
        default:
          return null;
      }
    } catch {
      return null;
    }
  }

  // --- querying -----------------------------------------------------------------

  private runQuery(): void {
    const wire = compileBoard(this.board, this.methodSel.value);
    if (!wire) {
      this.resultsBox.replaceChildren(
        el("div", { class: "hint" }, "add filters to a container to search"));
      return;
    }
    const ticket = ++this.queryCounter;
    this.bus.api.queryStructured(wire).then((resp) => {
      if (ticket === this.queryCounter) this.renderResults(resp);
    }).catch((err) => {
      if (ticket === this.queryCounter) this.bus.banner(String(err));
    });
  }

  private renderResults(resp: QueryResponse): void {
    this.resultsBox.replaceChildren(
      el("div", { class: "hint" },
        `${resp.total} segments (${resp.method} segmentation), ordered by day`));
    let currentDay = "";
    let dayBox: HTMLElement | null = null;
    for (const entry of resp.results) {
      if (entry.day_id !== currentDay) {
        currentDay = entry.day_id;
        dayBox = el("div", { class: "result-day" },
          el("h4", {}, entry.day_id));
        this.resultsBox.append(dayBox);
      }
      const canvas = el("canvas", { width: "64", height: "48" });
      const cell = el("div", { class: "map-cell" }, canvas,
        el("div", { class: "cell-label" },
          `${entry.start}..${entry.end} (${entry.frames.length} hits)`));
      this.bus.thumbs.paint(canvas, entry.day_id, entry.keyframe).catch(() => undefined);
      cell.addEventListener("contextmenu", (ev) => {
        ev.preventDefault();
        showMenu(ev.clientX, ev.clientY, [
          { label: "Similar shots", action: () => this.bus.showSimilar(entry.segment_id) },
          { label: "Open day", action: () => this.bus.openDay(entry.day_id, entry.keyframe) },
          { label: "Submit keyframe",
            action: () => this.bus.submitFrame(entry.day_id, entry.keyframe) },
        ]);
      });
      cell.addEventListener("click", () => this.bus.openDay(entry.day_id, entry.keyframe));
      dayBox?.append(cell);
    }
  }

  private renderNeighbors(resp: NeighborsResponse, title: string): void {
    this.resultsBox.replaceChildren(el("div", { class: "hint" }, title));
    const box = el("div", { class: "result-day" });
    for (const n of resp.results) {
      const canvas = el("canvas", { width: "64", height: "48" });
      const cell = el("div", { class: "map-cell" }, canvas,
        el("div", { class: "cell-label" }, `#${n.rank} ${n.score.toFixed(4)}`));
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
