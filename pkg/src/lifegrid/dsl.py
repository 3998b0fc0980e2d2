"""Textual query language compiled to the query module's AST.

Grammar (whitespace between tokens is insignificant, keywords are
case-insensitive, quoted strings escape the quote by doubling it):

    query      := container { "OR" container }
    container  := predicate { "AND" predicate } | "(" container ")"
    predicate  := "weekday:" day {"," day}          day := mon..sun
                | "time:" hh:mm "-" hh:mm
                | "loc:" quoted
                | "geo:" "[" num "," num "," num "," num "]"
                  (lat_min, lat_max, lon_min, lon_max; minus sign allowed)
                | rangefield (":<"|":<="|":="|":>="|":>") num
                | rangefield ":" num "-" num        (bounds non-negative)
                | "activity:" word
                | "concept:" word [ "@" num ]
                | "ocr:" quoted
    rangefield := "speed" | "hr" | "steps" | "cal"

``parse`` canonicalizes predicate order inside each container (stable sort
by filter key), so parse -> print -> parse is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import InvalidQuery, LifegridError
from .query import (
    Activity,
    Concept,
    FilterContainer,
    GeoBox,
    NamedLocation,
    OcrText,
    Predicate,
    Query,
    Range,
    RangeBetween,
    TimeRange,
    Weekday,
    WEEKDAY_NAMES,
    tokenize,
)
from .segment import Method

FIELD_BY_KEY = {
    "speed": "speed_kmh",
    "hr": "heart_rate_bpm",
    "steps": "steps",
    "cal": "calories",
}
KEY_BY_FIELD = {v: k for k, v in FIELD_BY_KEY.items()}

_DAY_INDEX = {name: i for i, name in enumerate(WEEKDAY_NAMES)}

_KEYS = ("weekday", "time", "loc", "geo", "speed", "hr", "steps", "cal",
         "activity", "concept", "ocr")


class ParseError(LifegridError):
    """Syntax or range error with position info and an expected-token hint."""

    code = "parse_error"

    def __init__(self, text: str, pos: int, message: str,
                 expected: Optional[list[str]] = None):
        self.offset = len(text[:pos].encode("utf-8"))  # byte offset
        self.char_pos = pos
        nl = text.rfind("\n", 0, pos)
        self.line = text.count("\n", 0, pos) + 1
        self.column = pos - nl  # 1-based within the line
        self.expected = expected or []
        self.message = message
        hint = f" (expected {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{self.line}:{self.column}: {message}{hint}")


# --- lexer ---------------------------------------------------------------------

@dataclass(frozen=True)
class _Tok:
    kind: str  # ident | number | quoted | one of : , - @ ( ) [ ] < <= = >= > | eof
    text: str
    pos: int
    end: int


def _lex(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        start = i
        if ch.isalpha() or ch == "_":
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            toks.append(_Tok("ident", text[start:i], start, i))
        elif ch.isdigit():
            while i < n and text[i].isdigit():
                i += 1
            if i + 1 < n and text[i] == "." and text[i + 1].isdigit():
                i += 1
                while i < n and text[i].isdigit():
                    i += 1
            toks.append(_Tok("number", text[start:i], start, i))
        elif ch == '"':
            i += 1
            parts: list[str] = []
            while True:
                if i >= n:
                    raise ParseError(text, start, "unterminated string",
                                     expected=['"'])
                if text[i] == '"':
                    if i + 1 < n and text[i + 1] == '"':
                        parts.append('"')
                        i += 2
                        continue
                    i += 1
                    break
                parts.append(text[i])
                i += 1
            toks.append(_Tok("quoted", "".join(parts), start, i))
        elif ch in "<>":
            if i + 1 < n and text[i + 1] == "=":
                i += 2
            else:
                i += 1
            toks.append(_Tok(text[start:i], text[start:i], start, i))
        elif ch in ":,-@()[]=":
            i += 1
            toks.append(_Tok(ch, ch, start, i))
        else:
            raise ParseError(text, i, f"unexpected character {ch!r}")
    toks.append(_Tok("eof", "", n, n))
    return toks


# --- parser --------------------------------------------------------------------

_RANK = {
    Weekday: 0, TimeRange: 1, NamedLocation: 2, GeoBox: 3,
    Activity: 8, Concept: 9, OcrText: 10,
}
_FIELD_RANK = {"speed_kmh": 4, "heart_rate_bpm": 5, "steps": 6, "calories": 7}


def _rank(pred: Predicate) -> int:
    if isinstance(pred, (Range, RangeBetween)):
        return _FIELD_RANK[pred.field]
    return _RANK[type(pred)]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _lex(text)
        self.i = 0
        # source spans for explain(): parallel to construction order
        self.pred_spans: list[tuple[Predicate, tuple[int, int]]] = []
        self.container_spans: list[tuple[int, int]] = []

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, tok: _Tok, message: str, expected: Optional[list[str]] = None):
        raise ParseError(self.text, tok.pos, message, expected=expected)

    def expect(self, kind: str, what: str) -> _Tok:
        tok = self.peek()
        if tok.kind != kind:
            self.error(tok, f"expected {what}", expected=[what])
        return self.next()

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text.lower() == word

    def parse_query(self, method: Method) -> Query:
        containers = [self.parse_container()]
        while self.at_keyword("or"):
            self.next()
            containers.append(self.parse_container())
        tok = self.peek()
        if tok.kind != "eof":
            self.error(tok, "unexpected input after query",
                       expected=["AND", "OR", "end of input"])
        return Query(containers=tuple(containers), method=method)

    def parse_container(self) -> FilterContainer:
        start = self.peek().pos
        if self.peek().kind == "(":
            self.next()
            inner = self.parse_container()
            self.expect(")", "')'")
            return inner
        preds = [self.parse_predicate()]
        while self.at_keyword("and"):
            self.next()
            preds.append(self.parse_predicate())
        self.container_spans.append((start, self.toks[self.i - 1].end))
        preds.sort(key=_rank)  # canonical key order; stable
        return FilterContainer(predicates=tuple(preds))

    def parse_predicate(self) -> Predicate:
        tok = self.peek()
        if tok.kind != "ident":
            self.error(tok, "expected a filter", expected=list(_KEYS))
        key = tok.text.lower()
        if key not in _KEYS:
            self.error(tok, f"unknown filter key {tok.text!r}", expected=list(_KEYS))
        self.next()
        pred = self._parse_value(key, tok)
        self.pred_spans.append((pred, (tok.pos, self.toks[self.i - 1].end)))
        return pred

    def _parse_value(self, key: str, key_tok: _Tok) -> Predicate:
        self.expect(":", "':'")
        if key == "weekday":
            return Weekday(days=frozenset(self._daylist()))
        if key == "time":
            start = self._hhmm()
            self.expect("-", "'-'")
            end = self._hhmm()
            return TimeRange(start_min=start, end_min=end)
        if key == "loc":
            return NamedLocation(name=self.expect("quoted", "quoted string").text)
        if key == "geo":
            open_tok = self.expect("[", "'['")
            nums = [self._signed_number()]
            for _ in range(3):
                self.expect(",", "','")
                nums.append(self._signed_number())
            self.expect("]", "']'")
            try:
                return GeoBox(lat_min=nums[0], lat_max=nums[1],
                              lon_min=nums[2], lon_max=nums[3])
            except InvalidQuery as exc:
                raise ParseError(self.text, open_tok.pos, str(exc)) from exc
        if key in FIELD_BY_KEY:
            field = FIELD_BY_KEY[key]
            tok = self.peek()
            if tok.kind in ("<", "<=", "=", ">=", ">"):
                self.next()
                return Range(field=field, op=tok.kind, value=self._signed_number())
            if tok.kind == "number":
                lo = float(self.next().text)
                self.expect("-", "'-'")
                hi = float(self.expect("number", "number").text)
                return RangeBetween(field=field, lo=lo, hi=hi)
            self.error(tok, "expected a comparison or an interval",
                       expected=["<", "<=", "=", ">=", ">", "number"])
        if key == "activity":
            return Activity(name=self.expect("ident", "word").text)
        if key == "concept":
            cid = self.expect("ident", "word").text
            conf = 0.0
            if self.peek().kind == "@":
                self.next()
                tok = self.expect("number", "number")
                conf = float(tok.text)
                if conf > 1.0:
                    self.error(tok, f"confidence {tok.text} outside [0,1]")
            return Concept(concept_id=cid, min_conf=conf)
        if key == "ocr":
            return OcrText(tokens=tuple(tokenize(self.expect("quoted", "quoted string").text)))
        raise AssertionError(key)

    def _daylist(self) -> list[int]:
        days = [self._day()]
        while self.peek().kind == ",":
            self.next()
            days.append(self._day())
        return days

    def _day(self) -> int:
        tok = self.expect("ident", "weekday name")
        idx = _DAY_INDEX.get(tok.text.lower())
        if idx is None:
            raise ParseError(self.text, tok.pos, f"unknown weekday {tok.text!r}",
                             expected=list(WEEKDAY_NAMES))
        return idx

    def _hhmm(self) -> int:
        h_tok = self.expect("number", "hour")
        if "." in h_tok.text or int(h_tok.text) > 23:
            self.error(h_tok, f"bad hour {h_tok.text!r}")
        self.expect(":", "':'")
        m_tok = self.expect("number", "minute")
        if "." in m_tok.text or int(m_tok.text) > 59:
            self.error(m_tok, f"bad minute {m_tok.text!r}")
        return int(h_tok.text) * 60 + int(m_tok.text)

    def _signed_number(self) -> float:
        neg = False
        if self.peek().kind == "-":
            self.next()
            neg = True
        tok = self.expect("number", "number")
        v = float(tok.text)
        return -v if neg else v


def parse(text: str, method: Method = "shot") -> Query:
    """Parse query text; raises ParseError with position and expected set."""
    return _Parser(text).parse_query(method)


# --- printer -------------------------------------------------------------------

def _fmt_num(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _fmt_time(minutes: int) -> str:
    return f"{minutes // 60:02d}:{minutes % 60:02d}"


def _quote(s: str) -> str:
    return '"' + s.replace('"', '""') + '"'


def _fmt_pred(pred: Predicate) -> str:
    if isinstance(pred, Weekday):
        return "weekday:" + ",".join(WEEKDAY_NAMES[d] for d in sorted(pred.days))
    if isinstance(pred, TimeRange):
        return f"time:{_fmt_time(pred.start_min)}-{_fmt_time(pred.end_min)}"
    if isinstance(pred, NamedLocation):
        return "loc:" + _quote(pred.name)
    if isinstance(pred, GeoBox):
        return ("geo:[" + ",".join(_fmt_num(v) for v in
                (pred.lat_min, pred.lat_max, pred.lon_min, pred.lon_max)) + "]")
    if isinstance(pred, Range):
        return f"{KEY_BY_FIELD[pred.field]}:{pred.op}{_fmt_num(pred.value)}"
    if isinstance(pred, RangeBetween):
        return f"{KEY_BY_FIELD[pred.field]}:{_fmt_num(pred.lo)}-{_fmt_num(pred.hi)}"
    if isinstance(pred, Activity):
        return "activity:" + pred.name
    if isinstance(pred, Concept):
        if pred.min_conf == 0.0:
            return "concept:" + pred.concept_id
        return f"concept:{pred.concept_id}@{_fmt_num(pred.min_conf)}"
    if isinstance(pred, OcrText):
        return "ocr:" + _quote(" ".join(pred.tokens))
    raise TypeError(f"unknown predicate {type(pred).__name__}")


def print_query(q: Query) -> str:
    """Canonical text: uppercase connectives, lowercase keys, predicates in
    fixed key order inside each container, minimal quoting.

    Word-valued fields (activity names, concept ids) must be identifier-
    shaped to stay parseable; all engine vocabularies are.
    """
    parts = []
    for container in q.containers:
        preds = sorted(container.predicates, key=_rank)
        parts.append(" AND ".join(_fmt_pred(p) for p in preds))
    return " OR ".join(parts)


# --- explain -------------------------------------------------------------------

def _describe(pred: Predicate) -> str:
    if isinstance(pred, TimeRange) and pred.wraps:
        return _fmt_pred(pred) + " (wraps midnight)"
    if isinstance(pred, Range):
        return f"{KEY_BY_FIELD[pred.field]}:{pred.op}{_fmt_num(pred.value)} ({pred.field} {pred.op} {_fmt_num(pred.value)})"
    if isinstance(pred, GeoBox):
        return (_fmt_pred(pred) + f" (lat {_fmt_num(pred.lat_min)}..{_fmt_num(pred.lat_max)},"
                f" lon {_fmt_num(pred.lon_min)}..{_fmt_num(pred.lon_max)})")
    return _fmt_pred(pred)


def explain(text: str, method: Method = "shot") -> str:
    """Indented container/predicate tree with source spans; propagates
    ParseError for invalid input."""
    parser = _Parser(text)
    q = parser.parse_query(method)
    spans = dict((id(p), span) for p, span in parser.pred_spans)
    lines = [f"query ({len(q.containers)} container{'s' if len(q.containers) != 1 else ''}, method={q.method})"]
    for ci, (container, cspan) in enumerate(zip(q.containers, parser.container_spans), 1):
        lines.append(f"  container {ci} [{cspan[0]}..{cspan[1]})")
        for pred in container.predicates:
            span = spans.get(id(pred))
            at = f" [{span[0]}..{span[1]})" if span else ""
            lines.append(f"    {_describe(pred)}{at}")
    return "\n".join(lines)
