import { describe, expect, it } from "vitest";
import {
  boardFromPredicates,
  compileBoard,
  emptyBoard,
  moveChip,
  sortCanonical,
  toWire,
} from "../src/querymodel.js";

describe("board compilation", () => {
  it("compiles chips into the structured wire query in canonical order", () => {
    const board = boardFromPredicates([[
      { kind: "loc", name: "The Helix" },
      { kind: "weekday", days: [0, 4] },
      { kind: "time", start: 600, end: 870 },
    ]]);
    const wire = compileBoard(board, "uniform");
    expect(wire).toEqual({
      method: "uniform",
      containers: [{
        predicates: [
          { kind: "weekday", days: ["mon", "fri"] },
          { kind: "time", start: "10:00", end: "14:30" },
          { kind: "loc", name: "The Helix" },
        ],
      }],
    });
  });

  it("an all-empty board is incomplete (null), not an empty query", () => {
    expect(compileBoard(emptyBoard())).toBeNull();
  });

  it("empty containers are dropped from the compiled query", () => {
    const board = boardFromPredicates([[{ kind: "activity", name: "walking" }], []]);
    expect(compileBoard(board)?.containers).toHaveLength(1);
  });

  it("moveChip relocates a chip between containers", () => {
    const board = boardFromPredicates([
      [{ kind: "activity", name: "walking" }, { kind: "concept", id: "dog", minConf: 0 }],
      [{ kind: "ocr", tokens: ["gate"] }],
    ]);
    const chipId = board.containers[0].chips[1].chipId;
    const moved = moveChip(board, chipId, board.containers[1].containerId);
    expect(moved.containers[0].chips).toHaveLength(1);
    expect(moved.containers[1].chips.map((c) => c.predicate.kind))
      .toEqual(["ocr", "concept"]);
    // moving to a bogus container drops nothing
    expect(moveChip(board, 10 ** 6, 0)).toEqual(board);
  });

  it("wire conversion of the remaining kinds", () => {
    expect(toWire({ kind: "geo", latMin: 53, latMax: 53.5, lonMin: -6.5, lonMax: -6 }))
      .toEqual({ kind: "geo", lat_min: 53, lat_max: 53.5, lon_min: -6.5, lon_max: -6 });
    expect(toWire({ kind: "range", field: "speed_kmh", op: ">", value: 30 }))
      .toEqual({ kind: "range", field: "speed_kmh", op: ">", value: 30 });
    expect(toWire({ kind: "between", field: "steps", lo: 0, hi: 100 }))
      .toEqual({ kind: "between", field: "steps", lo: 0, hi: 100 });
    expect(toWire({ kind: "concept", id: "beer", minConf: 0.5 }))
      .toEqual({ kind: "concept", id: "beer", min_conf: 0.5 });
    expect(toWire({ kind: "ocr", tokens: ["flight", "123"] }))
      .toEqual({ kind: "ocr", text: "flight 123" });
  });

  it("canonical ordering matches the server printer", () => {
    const sorted = sortCanonical([
      { kind: "ocr", tokens: ["x"] },
      { kind: "concept", id: "dog", minConf: 0 },
      { kind: "activity", name: "walking" },
      { kind: "between", field: "calories", lo: 0, hi: 5 },
      { kind: "range", field: "speed_kmh", op: "<", value: 3 },
      { kind: "geo", latMin: 0, latMax: 1, lonMin: 0, lonMax: 1 },
      { kind: "loc", name: "Home" },
      { kind: "time", start: 0, end: 10 },
      { kind: "weekday", days: [6] },
    ]);
    expect(sorted.map((p) => p.kind)).toEqual([
      "weekday", "time", "loc", "geo", "range", "between", "activity",
      "concept", "ocr",
    ]);
  });
});
