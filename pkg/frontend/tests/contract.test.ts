// Contract suite against live services on synthetic datasets. Two servers:
//  A: 1 day x 90 frames  -> 9 uniform segments, a 3x3 level-0 grid (autopilot)
//  B: 8 days x 1280 frames -> 1024 uniform segments, a 32x32 grid, 3 levels
// Server A runs with the manual test clock so timed-task scenarios are exact.

import { ChildProcess, spawn, spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { Autopilot } from "../src/autopilot.js";
import { levelBars } from "../src/minimap.js";
import { parseQuery, printQuery } from "../src/dsl.js";
import { boardFromPredicates, compileBoard } from "../src/querymodel.js";
import { deserializeSketch, emptyCanvas, paint, serializeSketch } from "../src/sketchmodel.js";
import { formatScore, submitFeedback } from "../src/taskmodel.js";

const basePort = 18000 + (process.pid % 2000);
const urlA = `http://127.0.0.1:${basePort}`;
const urlB = `http://127.0.0.1:${basePort + 1}`;

let workdir: string;
let datasetA: string;
const servers: ChildProcess[] = [];
const apiA = new ApiClient(urlA);
const apiB = new ApiClient(urlB);

function synth(out: string, args: string[]): void {
  const result = spawnSync("python3",
    ["-m", "lifegrid.cli", "synth", "--out", out, ...args],
    { stdio: ["ignore", "ignore", "pipe"] });
  if (result.status !== 0) {
    throw new Error(`synth failed: ${result.stderr}`);
  }
}

function serve(dataset: string, port: number, extra: string[] = []): ChildProcess {
  const child = spawn("python3",
    ["-m", "lifegrid.cli", "serve", "--dataset", dataset,
     "--port", String(port), "--method", "uniform", ...extra],
    { stdio: ["ignore", "ignore", "inherit"] });
  servers.push(child);
  return child;
}

async function waitHealthy(url: string, timeoutMs = 90_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      const resp = await fetch(`${url}/api/health`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error(`server at ${url} never became healthy`);
    await new Promise((r) => setTimeout(r, 300));
  }
}

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "lifegrid-ui-"));
  datasetA = join(workdir, "a");
  const datasetB = join(workdir, "b");
  synth(datasetA, ["--seed", "901", "--days", "1", "--frames-per-day", "90"]);
  synth(datasetB, ["--seed", "902", "--days", "8", "--frames-per-day", "1280",
                   "--width", "12", "--height", "9"]);
  serve(datasetA, basePort, ["--test-clock"]);
  serve(datasetB, basePort + 1);
  await Promise.all([waitHealthy(urlA), waitHealthy(urlB)]);
}, 180_000);

afterAll(() => {
  for (const child of servers) child.kill("SIGTERM");
  if (workdir) rmSync(workdir, { recursive: true, force: true });
});

describe("live service contract", () => {
  it("serves dataset summaries", async () => {
    const a = await apiA.health();
    expect(a.days).toBe(1);
    expect(a.segments.uniform).toBe(9);
    const b = await apiB.health();
    expect(b.days).toBe(8);
    expect(b.segments.uniform).toBe(1024);
  });

  it("minimap shows 3 level bars on the 32x32 map", async () => {
    const tile = await apiB.tile("color", "uniform", 0, 0, 0, 8, 8);
    expect(tile.level_rows).toBe(32);
    expect(tile.level_cols).toBe(32);
    expect(tile.levels).toBe(3);
    expect(levelBars(tile.levels, 0)).toHaveLength(3);
  });

  it("autopilot visits the 3x3 level in exact spiral order", async () => {
    const tile = await apiA.tile("color", "uniform", 0, 0, 0, 9, 9);
    expect(tile.levels).toBe(1);
    expect(tile.level_rows).toBe(3);
    expect(tile.level_cols).toBe(3);
    const pilot = new Autopilot(tile.level_rows, tile.level_cols);
    const visited: [number, number][] = [[...pilot.start()] as [number, number]];
    for (;;) {
      const next = pilot.advance();
      if (next === null) break;
      visited.push([next[0], next[1]]);
    }
    expect(visited).toEqual([
      [1, 1], [1, 2], [2, 2], [2, 1], [2, 0], [1, 0], [0, 0], [0, 1], [0, 2],
    ]);
    // every visited cell is addressable on the live level
    const full = await apiB.tile("color", "uniform", 0, 0, 0, 32, 32);
    expect(full.cells.filter((c) => !c.empty).length).toBe(1024);
  });

  it("the worked filter query built from chips equals the DSL equivalent", async () => {
    const board = boardFromPredicates([[
      { kind: "weekday", days: [0, 1, 2, 3, 4] },
      { kind: "time", start: 600, end: 870 },
      { kind: "loc", name: "The Helix" },
    ]]);
    const wire = compileBoard(board, "uniform");
    expect(wire).not.toBeNull();
    const viaChips = await apiB.queryStructured(wire!);
    const viaDsl = await apiB.queryDsl(
      'weekday:mon,tue,wed,thu,fri AND time:10:00-14:30 AND loc:"The Helix"',
      "uniform");
    expect(viaChips.results).toEqual(viaDsl.results);
    // the board's canonical text parses back to the same structured query
    const text = printQuery({
      containers: board.containers.map((c) => c.chips.map((ch) => ch.predicate)),
    });
    const reboard = boardFromPredicates(parseQuery(text).containers);
    expect(compileBoard(reboard, "uniform")).toEqual(wire);
  });

  it("sketch canvas round-trips its serialization and the service accepts it", async () => {
    let cells = emptyCanvas();
    cells = paint(cells, 2, 1, 4); // the classic red dot
    const payload = serializeSketch(cells, 5, "uniform");
    expect(deserializeSketch(payload)).toEqual(cells);
    const resp = await apiA.sketch(payload.cells, payload.k, payload.method);
    expect(resp.results).toHaveLength(5);
    expect(resp.results.map((r) => r.rank)).toEqual([1, 2, 3, 4, 5]);
    const scores = resp.results.map((r) => r.score);
    expect([...scores].sort((x, y) => x - y)).toEqual(scores);
  });

  it("task panel shows score 55 for two wrong submissions and a correct one at half time", async () => {
    // ground truth comes from the generated tasks.csv
    const rows = readFileSync(join(datasetA, "tasks.csv"), "utf-8")
      .trim().split("\n").slice(1).map((l) => l.split(","));
    const taskId = rows[0][0];
    const truthDay = rows[0][3];
    const truthStart = Number(rows[0][4]);
    const duration = Number(rows[0][6]);
    expect(duration).toBe(180);

    await apiA.taskStart(taskId);
    const wrong1 = await apiA.taskSubmit(taskId, "no-such-day", 0);
    expect(wrong1.correct).toBe(false);
    const wrong2 = await apiA.taskSubmit(taskId, truthDay, truthStart === 0 ? 89 : 0);
    expect(wrong2.wrong_count).toBe(2);

    // advance the server's manual clock to exactly half time
    const adv = await fetch(`${urlA}/api/_test/advance`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ seconds: duration / 2 }),
    });
    expect(adv.ok).toBe(true);

    const hints = await apiA.taskHints(taskId);
    expect(hints.elapsed_s).toBe(90);
    expect(hints.hints.map((h) => h.t)).toEqual([0, 30, 60, 90]);

    const result = await apiA.taskSubmit(taskId, truthDay, truthStart);
    expect(result.correct).toBe(true);
    expect(result.score).toBe(55);
    // what the panel renders
    expect(formatScore(result.score)).toBe("55");
    expect(submitFeedback(result).text).toBe("Correct! Score 55");
  });

  it("machine-readable errors surface through the client", async () => {
    await expect(apiA.daySummary("nope")).rejects.toMatchObject({
      status: 404,
      body: { code: "unknown_day" },
    });
  });
});
