// Thumbnail rendering from the raw-RGB JSON payloads, with a small LRU so
// repeated tiles do not refetch or redecode.

import { ApiClient } from "./api.js";
import { Lru } from "./lru.js";
import { FramePayload } from "./types.js";

const CACHE_CAPACITY = 256;

export function decodeRgb(payload: FramePayload): ImageData {
  const raw = atob(payload.rgb_base64);
  const rgba = new Uint8ClampedArray(payload.width * payload.height * 4);
  for (let i = 0, j = 0; i < raw.length; i += 3, j += 4) {
    rgba[j] = raw.charCodeAt(i);
    rgba[j + 1] = raw.charCodeAt(i + 1);
    rgba[j + 2] = raw.charCodeAt(i + 2);
    rgba[j + 3] = 255;
  }
  return new ImageData(rgba, payload.width, payload.height);
}

export class ThumbCache {
  private cache = new Lru<string, ImageData>(CACHE_CAPACITY);
  private pending = new Map<string, Promise<ImageData>>();

  constructor(private api: ApiClient) {}

  async get(dayId: string, index: number): Promise<ImageData> {
    const key = `${dayId}/${index}`;
    const hit = this.cache.get(key);
    if (hit) return hit;
    let inflight = this.pending.get(key);
    if (!inflight) {
      inflight = this.api.frame(dayId, index).then((payload) => {
        const img = decodeRgb(payload);
        this.cache.set(key, img);
        this.pending.delete(key);
        return img;
      });
      this.pending.set(key, inflight);
    }
    return inflight;
  }

  /** Paint a frame into a canvas, scaled with nearest-neighbor blockiness. */
  async paint(canvas: HTMLCanvasElement, dayId: string, index: number): Promise<void> {
    const img = await this.get(dayId, index);
    const ctx = canvas.getContext("2d");
    if (!ctx) return;
    const off = document.createElement("canvas");
    off.width = img.width;
    off.height = img.height;
    off.getContext("2d")?.putImageData(img, 0, 0);
    ctx.imageSmoothingEnabled = false;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    ctx.drawImage(off, 0, 0, canvas.width, canvas.height);
  }
}
