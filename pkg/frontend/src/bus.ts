// Cross-view wiring: views call into the bus, the shell routes the calls.

import { ApiClient } from "./api.js";
import { ThumbCache } from "./thumbs.js";
import { Health } from "./types.js";

export interface AppBus {
  api: ApiClient;
  thumbs: ThumbCache;
  health: Health;
  /** Switch to the day views, optionally seeking the inspector to a frame. */
  openDay(dayId: string, frame?: number): void;
  /** Switch to the search view and show neighbors of a segment. */
  showSimilar(segmentId: number): void;
  /** Submit a frame to the active task session. */
  submitFrame(dayId: string, frameIndex: number): void;
  banner(message: string): void;
}
