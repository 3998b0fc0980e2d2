// Timed task panel: start a session, watch the countdown, poll hints once a
// second (the release schedule is coarse), submit answers and show the score.

import { AppBus } from "./bus.js";
import { formatCountdown, formatScore, submitFeedback } from "./taskmodel.js";
import { el } from "./ui.js";

const HINT_POLL_MS = 1000;

export class TaskView {
  root: HTMLElement;
  private taskSel: HTMLSelectElement;
  private startBtn: HTMLButtonElement;
  private countdown: HTMLElement;
  private hintsBox: HTMLElement;
  private feedback: HTMLElement;
  private wrongBox: HTMLElement;
  private scoreBox: HTMLElement;
  private dayInput: HTMLInputElement;
  private frameInput: HTMLInputElement;
  private submitBtn: HTMLButtonElement;
  private activeTask: string | null = null;
  private durationS = 180;
  private elapsedS = 0;
  private expired = false;
  private solved = false;
  private pollTimer: number | null = null;
  private tickTimer: number | null = null;

  constructor(private bus: AppBus) {
    this.taskSel = el("select", {});
    for (const t of bus.health.tasks) {
      this.taskSel.append(el("option", { value: t.task_id },
        `${t.task_id} (${t.duration_s}s, ${t.hint_count} hints)`));
    }
    this.startBtn = el("button", {}, "start task");
    this.countdown = el("span", { class: "countdown" }, "-");
    this.hintsBox = el("ol", { class: "hints" });
    this.feedback = el("div", { class: "feedback" });
    this.wrongBox = el("span", { class: "wrong-count" }, "wrong: 0");
    this.scoreBox = el("span", { class: "score" }, "score: -");
    this.dayInput = el("input", { type: "text", placeholder: "day id" });
    this.frameInput = el("input", { type: "number", min: "0", placeholder: "frame" });
    this.submitBtn = el("button", {}, "submit");
    this.submitBtn.disabled = true;

    this.root = el("div", { class: "view task-view" },
      el("div", { class: "toolbar" },
        this.taskSel, this.startBtn,
        el("label", {}, " time left "), this.countdown,
        this.wrongBox, this.scoreBox),
      el("h3", {}, "hints"),
      this.hintsBox,
      el("h3", {}, "submit an answer"),
      el("div", { class: "submit-row" },
        this.dayInput, this.frameInput, this.submitBtn,
        el("span", { class: "hint" },
          " or use 'Submit keyframe' / 'submit current frame' in any view")),
      this.feedback,
    );

    this.startBtn.addEventListener("click", () => void this.start());
    this.submitBtn.addEventListener("click", () => {
      void this.submit(this.dayInput.value.trim(), Number(this.frameInput.value));
    });
  }

  private async start(): Promise<void> {
    const taskId = this.taskSel.value;
    if (!taskId) {
      this.bus.banner("no tasks in this dataset");
      return;
    }
    try {
      const resp = await this.bus.api.taskStart(taskId);
      this.activeTask = taskId;
      this.durationS = resp.duration_s;
      this.elapsedS = 0;
      this.expired = false;
      this.solved = false;
      this.feedback.textContent = "";
      this.wrongBox.textContent = "wrong: 0";
      this.scoreBox.textContent = "score: -";
      this.submitBtn.disabled = false;
      this.hintsBox.replaceChildren();
      this.startPolling();
    } catch (err) {
      this.bus.banner(String(err));
    }
  }

  private startPolling(): void {
    this.stopPolling();
    this.pollTimer = window.setInterval(() => void this.poll(), HINT_POLL_MS);
    this.tickTimer = window.setInterval(() => {
      if (!this.expired && !this.solved) this.elapsedS += 0.25;
      this.countdown.textContent = formatCountdown(this.durationS, this.elapsedS);
    }, 250);
    void this.poll();
  }

  private stopPolling(): void {
    if (this.pollTimer !== null) window.clearInterval(this.pollTimer);
    if (this.tickTimer !== null) window.clearInterval(this.tickTimer);
    this.pollTimer = null;
    this.tickTimer = null;
  }

  private async poll(): Promise<void> {
    if (!this.activeTask) return;
    try {
      const hints = await this.bus.api.taskHints(this.activeTask);
      this.elapsedS = hints.elapsed_s; // server clock is authoritative
      this.expired = hints.expired;
      this.hintsBox.replaceChildren();
      for (const h of hints.hints) {
        this.hintsBox.append(el("li", {}, `[t=${h.t}] ${h.text}`));
      }
      if (this.expired) {
        this.submitBtn.disabled = true;
        if (!this.solved) this.feedback.textContent = "session expired";
        this.stopPolling();
      }
    } catch (err) {
      this.bus.banner(String(err));
      this.stopPolling();
    }
  }

  /** Entry point for submissions from any view. */
  async submit(dayId: string, frameIndex: number): Promise<void> {
    if (!this.activeTask) {
      this.bus.banner("start a task before submitting");
      return;
    }
    if (!dayId || Number.isNaN(frameIndex)) {
      this.bus.banner("submission needs a day id and frame index");
      return;
    }
    try {
      const resp = await this.bus.api.taskSubmit(this.activeTask, dayId, frameIndex);
      const fb = submitFeedback(resp);
      this.feedback.textContent = fb.text;
      this.feedback.className = `feedback ${fb.cssClass}`;
      this.wrongBox.textContent = `wrong: ${resp.wrong_count}`;
      if (resp.solved) {
        this.solved = true;
        this.scoreBox.textContent = `score: ${formatScore(resp.score)}`;
        this.submitBtn.disabled = true;
        this.stopPolling();
      }
    } catch (err) {
      this.bus.banner(String(err));
    }
  }
}
