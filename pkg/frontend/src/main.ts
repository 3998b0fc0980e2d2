// Application shell: tabbed views over one shared API client.

import { ApiClient } from "./api.js";
import { AppBus } from "./bus.js";
import { BoardView } from "./boardview.js";
import { DayView } from "./dayview.js";
import { FeatureMapView } from "./featuremap.js";
import { SketchView } from "./sketchview.js";
import { TaskView } from "./taskview.js";
import { ThumbCache } from "./thumbs.js";
import { el, installBanner, showBanner } from "./ui.js";

const TABS = ["maps", "days", "search", "sketch", "tasks"] as const;
type Tab = typeof TABS[number];

async function boot(): Promise<void> {
  const api = new ApiClient("");
  const appRoot = document.getElementById("app")!;
  const bannerHost = el("div", { class: "banner-host" });
  installBanner(bannerHost);

  let health;
  try {
    health = await api.health();
  } catch (err) {
    appRoot.append(el("div", { class: "banner" },
      `cannot reach the lifegrid service: ${String(err)}`));
    return;
  }

  const thumbs = new ThumbCache(api);
  let dayView: DayView;
  let boardView: BoardView;
  let taskView: TaskView;
  let switchTab: (t: Tab) => void = () => undefined;

  const bus: AppBus = {
    api,
    thumbs,
    health,
    openDay(dayId, frame) {
      switchTab("days");
      void dayView.open(dayId, frame);
    },
    showSimilar(segmentId) {
      switchTab("search");
      void boardView.showSimilar(segmentId);
    },
    submitFrame(dayId, frameIndex) {
      void taskView.submit(dayId, frameIndex);
    },
    banner: showBanner,
  };

  const mapView = new FeatureMapView(bus);
  dayView = new DayView(bus);
  boardView = new BoardView(bus);
  const sketchView = new SketchView(bus);
  taskView = new TaskView(bus);

  const views: Record<Tab, HTMLElement> = {
    maps: mapView.root,
    days: dayView.root,
    search: boardView.root,
    sketch: sketchView.root,
    tasks: taskView.root,
  };

  const nav = el("nav", { class: "tabs" });
  const buttons = new Map<Tab, HTMLButtonElement>();
  for (const tab of TABS) {
    const btn = el("button", { class: "tab" }, tab);
    btn.addEventListener("click", () => switchTab(tab));
    buttons.set(tab, btn);
    nav.append(btn);
  }
  const stage = el("main", { class: "stage" });

  switchTab = (tab: Tab) => {
    stage.replaceChildren(views[tab]);
    for (const [t, b] of buttons) b.classList.toggle("active", t === tab);
  };

  appRoot.append(
    el("header", { class: "topbar" },
      el("span", { class: "brand" }, "lifegrid"),
      el("span", { class: "summary" },
        `${health.days} days, ${health.frames} frames, ` +
        `${health.segments.shot} shots / ${health.segments.uniform} uniform segments`),
      nav),
    bannerHost,
    stage,
  );
  switchTab("maps");
}

void boot();
