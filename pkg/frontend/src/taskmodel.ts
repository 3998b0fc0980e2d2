// Task panel display model, separated from the DOM for testability.

import { SubmitResponse } from "./types.js";

export function formatScore(score: number | null): string {
  if (score === null) return "-";
  const rounded = Math.round(score * 10) / 10;
  return Number.isInteger(rounded) ? String(rounded) : rounded.toFixed(1);
}

export function formatCountdown(durationS: number, elapsedS: number): string {
  const left = Math.max(0, Math.ceil(durationS - elapsedS));
  const m = Math.floor(left / 60);
  const s = left % 60;
  return `${m}:${String(s).padStart(2, "0")}`;
}

export interface SubmitFeedback {
  cssClass: "ok" | "wrong" | "info";
  text: string;
}

export function submitFeedback(resp: SubmitResponse): SubmitFeedback {
  if (resp.correct) {
    return { cssClass: "ok", text: `Correct! Score ${formatScore(resp.score)}` };
  }
  return {
    cssClass: "wrong",
    text: `Wrong (${resp.wrong_count} wrong so far)`,
  };
}
