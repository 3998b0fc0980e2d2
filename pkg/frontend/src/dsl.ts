// Client-side parser/printer for the textual query language, mirroring the
// server grammar so the DSL box can validate at the caret and round-trip
// with the filter board without a network round trip.

import {
  CmpOp,
  FIELD_KEYS,
  KEY_FIELDS,
  Predicate,
  RangeField,
  WEEKDAY_NAMES,
  minutesToHhmm,
  sortCanonical,
} from "./querymodel.js";

export interface ParsedQuery {
  containers: Predicate[][];
}

export class DslParseError extends Error {
  /** byte offset into the UTF-8 encoding of the input */
  offset: number;
  charPos: number;
  line: number;
  column: number;
  expected: string[];

  constructor(text: string, charPos: number, message: string, expected: string[] = []) {
    super(message);
    this.charPos = charPos;
    this.offset = new TextEncoder().encode(text.slice(0, charPos)).length;
    const nl = text.lastIndexOf("\n", charPos - 1);
    this.line = (text.slice(0, charPos).match(/\n/g) ?? []).length + 1;
    this.column = charPos - nl;
    this.expected = expected;
  }
}

type TokKind =
  | "ident" | "number" | "quoted" | "eof"
  | ":" | "," | "-" | "@" | "(" | ")" | "[" | "]"
  | "<" | "<=" | "=" | ">=" | ">";

interface Tok {
  kind: TokKind;
  text: string;
  pos: number;
  end: number;
}

const IDENT_START = /[\p{L}_]/u;
const IDENT_CONT = /[\p{L}\p{N}_]/u;

function lex(text: string): Tok[] {
  const toks: Tok[] = [];
  let i = 0;
  const n = text.length;
  while (i < n) {
    const ch = text[i];
    if (/\s/.test(ch)) {
      i += 1;
      continue;
    }
    const start = i;
    if (IDENT_START.test(ch)) {
      while (i < n && IDENT_CONT.test(text[i])) i += 1;
      toks.push({ kind: "ident", text: text.slice(start, i), pos: start, end: i });
    } else if (ch >= "0" && ch <= "9") {
      while (i < n && text[i] >= "0" && text[i] <= "9") i += 1;
      if (i + 1 < n && text[i] === "." && text[i + 1] >= "0" && text[i + 1] <= "9") {
        i += 1;
        while (i < n && text[i] >= "0" && text[i] <= "9") i += 1;
      }
      toks.push({ kind: "number", text: text.slice(start, i), pos: start, end: i });
    } else if (ch === '"') {
      i += 1;
      let value = "";
      for (;;) {
        if (i >= n) throw new DslParseError(text, start, "unterminated string", ['"']);
        if (text[i] === '"') {
          if (text[i + 1] === '"') {
            value += '"';
            i += 2;
            continue;
          }
          i += 1;
          break;
        }
        value += text[i];
        i += 1;
      }
      toks.push({ kind: "quoted", text: value, pos: start, end: i });
    } else if (ch === "<" || ch === ">") {
      const op = text[i + 1] === "=" ? ch + "=" : ch;
      i += op.length;
      toks.push({ kind: op as TokKind, text: op, pos: start, end: i });
    } else if (":,-@()[]=".includes(ch)) {
      i += 1;
      toks.push({ kind: ch as TokKind, text: ch, pos: start, end: i });
    } else {
      throw new DslParseError(text, i, `unexpected character ${JSON.stringify(ch)}`);
    }
  }
  toks.push({ kind: "eof", text: "", pos: n, end: n });
  return toks;
}

const KEYS = ["weekday", "time", "loc", "geo", "speed", "hr", "steps", "cal",
  "activity", "concept", "ocr"];

export function tokenizeText(text: string): string[] {
  // lowercase, split on non-alphanumeric codepoints, drop empties
  return text.toLowerCase().split(/[^\p{L}\p{N}]+/u).filter((t) => t.length > 0);
}

class Parser {
  private toks: Tok[];
  private i = 0;

  constructor(private text: string) {
    this.toks = lex(text);
  }

  private peek(): Tok {
    return this.toks[this.i];
  }

  private next(): Tok {
    return this.toks[this.i++];
  }

  private fail(tok: Tok, message: string, expected: string[] = []): never {
    throw new DslParseError(this.text, tok.pos, message, expected);
  }

  private expect(kind: TokKind, what: string): Tok {
    const tok = this.peek();
    if (tok.kind !== kind) this.fail(tok, `expected ${what}`, [what]);
    return this.next();
  }

  private atKeyword(word: string): boolean {
    const tok = this.peek();
    return tok.kind === "ident" && tok.text.toLowerCase() === word;
  }

  parseQuery(): ParsedQuery {
    const containers = [this.parseContainer()];
    while (this.atKeyword("or")) {
      this.next();
      containers.push(this.parseContainer());
    }
    const tok = this.peek();
    if (tok.kind !== "eof") {
      this.fail(tok, "unexpected input after query", ["AND", "OR", "end of input"]);
    }
    return { containers };
  }

  private parseContainer(): Predicate[] {
    if (this.peek().kind === "(") {
      this.next();
      const inner = this.parseContainer();
      this.expect(")", "')'");
      return inner;
    }
    const preds = [this.parsePredicate()];
    while (this.atKeyword("and")) {
      this.next();
      preds.push(this.parsePredicate());
    }
    return sortCanonical(preds);
  }

  private parsePredicate(): Predicate {
    const tok = this.peek();
    if (tok.kind !== "ident") this.fail(tok, "expected a filter", KEYS);
    const key = tok.text.toLowerCase();
    if (!KEYS.includes(key)) this.fail(tok, `unknown filter key '${tok.text}'`, KEYS);
    this.next();
    this.expect(":", "':'");
    switch (key) {
      case "weekday": return { kind: "weekday", days: this.dayList() };
      case "time": {
        const start = this.hhmm();
        this.expect("-", "'-'");
        return { kind: "time", start, end: this.hhmm() };
      }
      case "loc": return { kind: "loc", name: this.expect("quoted", "quoted string").text };
      case "geo": {
        const open = this.expect("[", "'['");
        const nums = [this.signedNumber()];
        for (let k = 0; k < 3; k++) {
          this.expect(",", "','");
          nums.push(this.signedNumber());
        }
        this.expect("]", "']'");
        if (nums[0] > nums[1] || nums[2] > nums[3]) {
          this.fail(open, "geo box bounds out of order");
        }
        return { kind: "geo", latMin: nums[0], latMax: nums[1], lonMin: nums[2], lonMax: nums[3] };
      }
      case "activity": return { kind: "activity", name: this.expect("ident", "word").text };
      case "concept": {
        const id = this.expect("ident", "word").text;
        let minConf = 0;
        if (this.peek().kind === "@") {
          this.next();
          const num = this.expect("number", "number");
          minConf = Number(num.text);
          if (minConf > 1) this.fail(num, `confidence ${num.text} outside [0,1]`);
        }
        return { kind: "concept", id, minConf };
      }
      case "ocr":
        return { kind: "ocr", tokens: tokenizeText(this.expect("quoted", "quoted string").text) };
      default: {
        const field = KEY_FIELDS[key] as RangeField;
        const op = this.peek();
        if (["<", "<=", "=", ">=", ">"].includes(op.kind)) {
          this.next();
          return { kind: "range", field, op: op.kind as CmpOp, value: this.signedNumber() };
        }
        if (op.kind === "number") {
          const lo = Number(this.next().text);
          this.expect("-", "'-'");
          const hi = Number(this.expect("number", "number").text);
          return { kind: "between", field, lo, hi };
        }
        this.fail(op, "expected a comparison or an interval",
          ["<", "<=", "=", ">=", ">", "number"]);
      }
    }
  }

  private dayList(): number[] {
    const days = new Set<number>([this.day()]);
    while (this.peek().kind === ",") {
      this.next();
      days.add(this.day());
    }
    return [...days].sort((a, b) => a - b);
  }

  private day(): number {
    const tok = this.expect("ident", "weekday name");
    const idx = WEEKDAY_NAMES.indexOf(tok.text.toLowerCase() as typeof WEEKDAY_NAMES[number]);
    if (idx < 0) {
      throw new DslParseError(this.text, tok.pos, `unknown weekday '${tok.text}'`,
        [...WEEKDAY_NAMES]);
    }
    return idx;
  }

  private hhmm(): number {
    const h = this.expect("number", "hour");
    if (h.text.includes(".") || Number(h.text) > 23) this.fail(h, `bad hour '${h.text}'`);
    this.expect(":", "':'");
    const m = this.expect("number", "minute");
    if (m.text.includes(".") || Number(m.text) > 59) this.fail(m, `bad minute '${m.text}'`);
    return Number(h.text) * 60 + Number(m.text);
  }

  private signedNumber(): number {
    let neg = false;
    if (this.peek().kind === "-") {
      this.next();
      neg = true;
    }
    const tok = this.expect("number", "number");
    const v = Number(tok.text);
    return neg ? -v : v;
  }
}

export function parseQuery(text: string): ParsedQuery {
  return new Parser(text).parseQuery();
}

// --- printer ----------------------------------------------------------------

function fmtNum(v: number): string {
  return Number.isInteger(v) ? String(v) : String(v);
}

function quote(s: string): string {
  return '"' + s.replaceAll('"', '""') + '"';
}

export function printPredicate(p: Predicate): string {
  switch (p.kind) {
    case "weekday":
      return "weekday:" + [...p.days].sort((a, b) => a - b).map((d) => WEEKDAY_NAMES[d]).join(",");
    case "time":
      return `time:${minutesToHhmm(p.start)}-${minutesToHhmm(p.end)}`;
    case "loc":
      return "loc:" + quote(p.name);
    case "geo":
      return `geo:[${fmtNum(p.latMin)},${fmtNum(p.latMax)},${fmtNum(p.lonMin)},${fmtNum(p.lonMax)}]`;
    case "range":
      return `${FIELD_KEYS[p.field]}:${p.op}${fmtNum(p.value)}`;
    case "between":
      return `${FIELD_KEYS[p.field]}:${fmtNum(p.lo)}-${fmtNum(p.hi)}`;
    case "activity":
      return "activity:" + p.name;
    case "concept":
      return p.minConf === 0 ? `concept:${p.id}` : `concept:${p.id}@${fmtNum(p.minConf)}`;
    case "ocr":
      return "ocr:" + quote(p.tokens.join(" "));
  }
}

export function printQuery(q: ParsedQuery): string {
  return q.containers
    .map((preds) => sortCanonical(preds).map(printPredicate).join(" AND "))
    .join(" OR ");
}
