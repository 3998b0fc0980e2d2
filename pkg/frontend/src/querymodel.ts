// Client-side predicate model, the structured-query wire format and the
// filter board state that compiles into it.

export type RangeField = "speed_kmh" | "heart_rate_bpm" | "steps" | "calories";
export type CmpOp = "<" | "<=" | "=" | ">=" | ">";

export type Predicate =
  | { kind: "weekday"; days: number[] } // 0 = mon .. 6 = sun, sorted unique
  | { kind: "time"; start: number; end: number } // minutes since midnight
  | { kind: "loc"; name: string }
  | { kind: "geo"; latMin: number; latMax: number; lonMin: number; lonMax: number }
  | { kind: "range"; field: RangeField; op: CmpOp; value: number }
  | { kind: "between"; field: RangeField; lo: number; hi: number }
  | { kind: "activity"; name: string }
  | { kind: "concept"; id: string; minConf: number }
  | { kind: "ocr"; tokens: string[] };

export const WEEKDAY_NAMES = ["mon", "tue", "wed", "thu", "fri", "sat", "sun"] as const;
export const FIELD_KEYS: Record<RangeField, string> = {
  speed_kmh: "speed",
  heart_rate_bpm: "hr",
  steps: "steps",
  calories: "cal",
};
export const KEY_FIELDS: Record<string, RangeField> = {
  speed: "speed_kmh",
  hr: "heart_rate_bpm",
  steps: "steps",
  cal: "calories",
};

// canonical in-container ordering (weekday, time, loc, geo, ranges, activity,
// concept, ocr), matching the server's printer
export function predicateRank(p: Predicate): number {
  switch (p.kind) {
    case "weekday": return 0;
    case "time": return 1;
    case "loc": return 2;
    case "geo": return 3;
    case "range":
    case "between":
      return { speed_kmh: 4, heart_rate_bpm: 5, steps: 6, calories: 7 }[p.field];
    case "activity": return 8;
    case "concept": return 9;
    case "ocr": return 10;
  }
}

export function sortCanonical(preds: Predicate[]): Predicate[] {
  return [...preds].sort((a, b) => predicateRank(a) - predicateRank(b));
}

export function minutesToHhmm(m: number): string {
  const h = Math.floor(m / 60);
  const mm = m % 60;
  return `${String(h).padStart(2, "0")}:${String(mm).padStart(2, "0")}`;
}

// --- wire format (mirrors the service's pydantic models one-to-one) ----------

export type WirePredicate =
  | { kind: "weekday"; days: string[] }
  | { kind: "time"; start: string; end: string }
  | { kind: "loc"; name: string }
  | { kind: "geo"; lat_min: number; lat_max: number; lon_min: number; lon_max: number }
  | { kind: "range"; field: RangeField; op: CmpOp; value: number }
  | { kind: "between"; field: RangeField; lo: number; hi: number }
  | { kind: "activity"; name: string }
  | { kind: "concept"; id: string; min_conf: number }
  | { kind: "ocr"; text: string };

export interface WireQuery {
  containers: { predicates: WirePredicate[] }[];
  method?: string;
}

export function toWire(p: Predicate): WirePredicate {
  switch (p.kind) {
    case "weekday":
      return { kind: "weekday", days: p.days.map((d) => WEEKDAY_NAMES[d]) };
    case "time":
      return { kind: "time", start: minutesToHhmm(p.start), end: minutesToHhmm(p.end) };
    case "loc":
      return { kind: "loc", name: p.name };
    case "geo":
      return { kind: "geo", lat_min: p.latMin, lat_max: p.latMax, lon_min: p.lonMin, lon_max: p.lonMax };
    case "range":
      return { kind: "range", field: p.field, op: p.op, value: p.value };
    case "between":
      return { kind: "between", field: p.field, lo: p.lo, hi: p.hi };
    case "activity":
      return { kind: "activity", name: p.name };
    case "concept":
      return { kind: "concept", id: p.id, min_conf: p.minConf };
    case "ocr":
      return { kind: "ocr", text: p.tokens.join(" ") };
  }
}

// --- filter board --------------------------------------------------------------

export interface ChipState {
  chipId: number;
  predicate: Predicate;
}

export interface ContainerState {
  containerId: number;
  chips: ChipState[];
}

export interface BoardState {
  containers: ContainerState[];
  nextId: number;
}

export function emptyBoard(): BoardState {
  return { containers: [{ containerId: 0, chips: [] }], nextId: 1 };
}

export function boardFromPredicates(groups: Predicate[][]): BoardState {
  let nextId = 0;
  const containers = groups.map((preds) => ({
    containerId: nextId++,
    chips: preds.map((p) => ({ chipId: nextId++, predicate: p })),
  }));
  return { containers, nextId };
}

/** Structured query for the /api/query endpoint, or null while the board has
 * no complete container (every container empty). */
export function compileBoard(board: BoardState, method?: string): WireQuery | null {
  const containers = board.containers
    .filter((c) => c.chips.length > 0)
    .map((c) => ({
      predicates: sortCanonical(c.chips.map((ch) => ch.predicate)).map(toWire),
    }));
  if (containers.length === 0) return null;
  const q: WireQuery = { containers };
  if (method) q.method = method;
  return q;
}

export function moveChip(
  board: BoardState, chipId: number, targetContainerId: number
): BoardState {
  let moved: ChipState | null = null;
  const containers = board.containers.map((c) => {
    const keep = c.chips.filter((ch) => {
      if (ch.chipId === chipId) {
        moved = ch;
        return false;
      }
      return true;
    });
    return { ...c, chips: keep };
  });
  if (!moved) return board;
  const out = containers.map((c) =>
    c.containerId === targetContainerId ? { ...c, chips: [...c.chips, moved!] } : c
  );
  return { ...board, containers: out };
}

export function describePredicate(p: Predicate): string {
  switch (p.kind) {
    case "weekday":
      return "weekday: " + p.days.map((d) => WEEKDAY_NAMES[d]).join(",");
    case "time":
      return `time ${minutesToHhmm(p.start)}-${minutesToHhmm(p.end)}`;
    case "loc":
      return `loc "${p.name}"`;
    case "geo":
      return `geo [${p.latMin}, ${p.latMax}] x [${p.lonMin}, ${p.lonMax}]`;
    case "range":
      return `${FIELD_KEYS[p.field]} ${p.op} ${p.value}`;
    case "between":
      return `${FIELD_KEYS[p.field]} ${p.lo}..${p.hi}`;
    case "activity":
      return `activity ${p.name}`;
    case "concept":
      return p.minConf > 0 ? `concept ${p.id}@${p.minConf}` : `concept ${p.id}`;
    case "ocr":
      return `ocr "${p.tokens.join(" ")}"`;
  }
}
