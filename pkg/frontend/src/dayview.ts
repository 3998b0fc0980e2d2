// Day summary (all segments of one day) and day inspector (frame playback at
// the 5 fps base rate with speed multipliers, metadata and submission).

import { AppBus } from "./bus.js";
import { el, showMenu } from "./ui.js";
import { DayMeta, DaySummary } from "./types.js";

const SPEEDS = [0.5, 1, 2, 4];

export class DayView {
  root: HTMLElement;
  private daySel: HTMLSelectElement;
  private prevBtn: HTMLButtonElement;
  private nextBtn: HTMLButtonElement;
  private methodSel: HTMLSelectElement;
  private summaryGrid: HTMLElement;
  private player: HTMLCanvasElement;
  private slider: HTMLInputElement;
  private timeline: HTMLElement;
  private metaBox: HTMLElement;
  private frameLabel: HTMLElement;
  private playBtn: HTMLButtonElement;
  private summary: DaySummary | null = null;
  private meta: DayMeta | null = null;
  private frame = 0;
  private playing = false;
  private speed = 1;
  private timer: number | null = null;

  constructor(private bus: AppBus) {
    this.daySel = el("select", {});
    this.prevBtn = el("button", {}, "prev day");
    this.nextBtn = el("button", {}, "next day");
    this.methodSel = el("select", {});
    for (const m of ["shot", "uniform"]) this.methodSel.append(el("option", { value: m }, m));
    this.methodSel.value = bus.health.default_method;
    this.summaryGrid = el("div", { class: "summary-grid" });
    this.player = el("canvas", { class: "player", width: "384", height: "288" });
    this.slider = el("input", { type: "range", min: "0", value: "0", class: "seek" });
    this.timeline = el("div", { class: "timeline" });
    this.metaBox = el("div", { class: "meta-box" });
    this.frameLabel = el("span", { class: "frame-label" });
    this.playBtn = el("button", {}, "play");
    const speedBox = el("span", {});
    for (const s of SPEEDS) {
      const b = el("button", { class: s === 1 ? "speed active" : "speed" }, `${s}x`);
      b.addEventListener("click", () => {
        this.speed = s;
        speedBox.querySelectorAll("button").forEach((x) => x.classList.remove("active"));
        b.classList.add("active");
        if (this.playing) this.startTimer();
      });
      speedBox.append(b);
    }
    const submitBtn = el("button", { class: "submit-btn" }, "submit current frame");

    this.root = el("div", { class: "view day-view" },
      el("div", { class: "toolbar" },
        this.prevBtn, this.daySel, this.nextBtn,
        el("label", {}, " segments "), this.methodSel),
      el("div", { class: "day-columns" },
        el("div", { class: "day-summary" },
          el("h3", {}, "day summary"), this.summaryGrid),
        el("div", { class: "day-inspector" },
          el("h3", {}, "day inspector"),
          this.player,
          el("div", {}, this.slider),
          this.timeline,
          el("div", { class: "transport" },
            this.playBtn, speedBox, this.frameLabel, submitBtn),
          this.metaBox)),
    );

    this.daySel.addEventListener("change", () => void this.open(this.daySel.value));
    this.prevBtn.addEventListener("click", () => {
      if (this.summary?.prev_day) void this.open(this.summary.prev_day);
    });
    this.nextBtn.addEventListener("click", () => {
      if (this.summary?.next_day) void this.open(this.summary.next_day);
    });
    this.methodSel.addEventListener("change", () => {
      if (this.summary) void this.open(this.summary.day_id);
    });
    this.playBtn.addEventListener("click", () => this.togglePlay());
    this.slider.addEventListener("input", () => {
      this.seek(Number(this.slider.value));
    });
    submitBtn.addEventListener("click", () => {
      if (this.summary) this.bus.submitFrame(this.summary.day_id, this.frame);
    });

    void this.init();
  }

  private async init(): Promise<void> {
    try {
      const days = await this.bus.api.days();
      for (const d of days) this.daySel.append(el("option", { value: d }, d));
      if (days.length) await this.open(days[0]);
    } catch (err) {
      this.bus.banner(String(err));
    }
  }

  async open(dayId: string, frame?: number): Promise<void> {
    this.stopTimer();
    this.playing = false;
    this.playBtn.textContent = "play";
    try {
      this.summary = await this.bus.api.daySummary(dayId, this.methodSel.value);
      this.meta = await this.bus.api.dayMeta(dayId);
    } catch (err) {
      this.bus.banner(String(err));
      return;
    }
    this.daySel.value = dayId;
    this.prevBtn.disabled = this.summary.prev_day === null;
    this.nextBtn.disabled = this.summary.next_day === null;
    this.slider.max = String(this.summary.frame_count - 1);
    this.renderSummary();
    this.renderTimeline();
    this.seek(frame ?? 0);
  }

  private renderSummary(): void {
    const summary = this.summary;
    if (!summary) return;
    this.summaryGrid.replaceChildren();
    for (const seg of summary.segments) {
      const canvas = el("canvas", { width: "64", height: "48" });
      const box = el("div", { class: "map-cell" }, canvas,
        el("div", { class: "cell-label" }, `${seg.start}..${seg.end}`));
      this.bus.thumbs.paint(canvas, seg.day_id, seg.keyframe).catch(() => undefined);
      box.addEventListener("click", () => this.seek(seg.keyframe));
      box.addEventListener("contextmenu", (ev) => {
        ev.preventDefault();
        showMenu(ev.clientX, ev.clientY, [
          { label: "Similar shots", action: () => this.bus.showSimilar(seg.segment_id) },
          { label: "Submit keyframe", action: () => this.bus.submitFrame(seg.day_id, seg.keyframe) },
        ]);
      });
      this.summaryGrid.append(box);
    }
  }

  private renderTimeline(): void {
    const summary = this.summary;
    if (!summary) return;
    this.timeline.replaceChildren();
    const n = summary.frame_count;
    for (const seg of summary.segments) {
      const block = el("div", { class: "tl-seg" });
      block.style.width = `${(seg.end - seg.start + 1) / n * 100}%`;
      block.title = `segment ${seg.segment_id}: ${seg.start}..${seg.end}`;
      block.addEventListener("click", () => this.seek(seg.keyframe));
      this.timeline.append(block);
    }
  }

  private seek(frame: number): void {
    const summary = this.summary;
    if (!summary) return;
    this.frame = Math.max(0, Math.min(summary.frame_count - 1, frame));
    this.slider.value = String(this.frame);
    this.frameLabel.textContent = `frame ${this.frame}/${summary.frame_count - 1}`;
    this.bus.thumbs.paint(this.player, summary.day_id, this.frame).catch(() => undefined);
    this.renderMeta();
  }

  private renderMeta(): void {
    const meta = this.meta;
    if (!meta) return;
    const fm = meta.frames[this.frame];
    this.metaBox.replaceChildren();
    if (!fm) return;
    const rows: [string, string][] = [
      ["local time", `${String(Math.floor(fm.local_minutes / 60)).padStart(2, "0")}:` +
        `${String(fm.local_minutes % 60).padStart(2, "0")}`],
      ["weekday", ["mon", "tue", "wed", "thu", "fri", "sat", "sun"][fm.weekday]],
    ];
    if (fm.sensor) {
      for (const [k, v] of Object.entries(fm.sensor)) {
        if (k !== "timestamp_utc") rows.push([k, String(v)]);
      }
    }
    if (fm.concepts.length) {
      rows.push(["concepts", fm.concepts.map((c) => `${c.id}@${c.confidence.toFixed(2)}`).join(", ")]);
    }
    if (fm.ocr.length) rows.push(["ocr", fm.ocr.join(" | ")]);
    const table = el("table", { class: "meta-table" });
    for (const [k, v] of rows) {
      table.append(el("tr", {}, el("th", {}, k), el("td", {}, v)));
    }
    this.metaBox.append(table);
  }

  private togglePlay(): void {
    this.playing = !this.playing;
    this.playBtn.textContent = this.playing ? "pause" : "play";
    if (this.playing) this.startTimer();
    else this.stopTimer();
  }

  private startTimer(): void {
    this.stopTimer();
    // base rate 5 fps -> 200 ms per frame at 1x
    const interval = 200 / this.speed;
    this.timer = window.setInterval(() => {
      const summary = this.summary;
      if (!summary) return;
      if (this.frame + 1 >= summary.frame_count) {
        this.togglePlay();
        return;
      }
      this.seek(this.frame + 1);
    }, interval);
  }

  private stopTimer(): void {
    if (this.timer !== null) window.clearInterval(this.timer);
    this.timer = null;
  }
}
