"""Semi-structured tables and cell normalization.

Cells in open-domain wiki tables mix dates, numbers, and free text
("37,100,000", "january 2 , 1975", "l 4 - 2").  Every cell is parsed once
into a CellValue carrying the facets needed for comparison; all downstream
filtering/aggregation works on CellValues, never on raw strings.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Optional, Sequence


class TableError(Exception):
    """Base class for table construction errors."""


class RaggedRows(TableError):
    """A row's cell count does not match the header."""


class EmptyTable(TableError):
    """A table with no data rows."""


MONTHS = {
    "january": 1, "february": 2, "march": 3, "april": 4, "may": 5,
    "june": 6, "july": 7, "august": 8, "september": 9, "october": 10,
    "november": 11, "december": 12,
    "jan": 1, "feb": 2, "mar": 3, "apr": 4, "jun": 6, "jul": 7,
    "aug": 8, "sep": 9, "sept": 9, "oct": 10, "nov": 11, "dec": 12,
}


@dataclass(frozen=True, order=True)
class ApproxDate:
    """A calendar date with optional month/day (year always known)."""

    year: int
    month: Optional[int] = None
    day: Optional[int] = None

    def sort_key(self) -> tuple:
        return (self.year, self.month or 1, self.day or 1)

    def __str__(self) -> str:
        if self.month is None:
            return str(self.year)
        if self.day is None:
            return f"{self.year}-{self.month:02d}"
        return f"{self.year}-{self.month:02d}-{self.day:02d}"


class Kind(Enum):
    NUMBER = "number"
    DATE = "date"
    TEXT = "text"


@dataclass(frozen=True)
class CellValue:
    """Normalized view of one cell: classified kind plus parsed facets."""

    kind: Kind
    text: str
    number: Optional[float] = None
    date: Optional[ApproxDate] = None
    first_number: Optional[float] = None
    result_number: Optional[float] = None  # the N of "a - b = N" style cells

    @property
    def numeric(self) -> Optional[float]:
        """Best-effort numeric facet: the number itself, the stated result
        of "a - b = N" cells, else the first embedded number."""
        if self.kind is Kind.NUMBER:
            return self.number
        if self.result_number is not None:
            return self.result_number
        return self.first_number


class Comparison(Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    FUZZY_EQUAL = "fuzzy_equal"
    INCOMPARABLE = "incomparable"


_WS_RE = re.compile(r"\s+")
_PUNCT_RE = re.compile(r"[^\w\s]")
_NUM_RE = re.compile(r"[-+]?\d+(?:\.\d+)?(?:e[-+]?\d+)?")
# Digit groups joined by a comma collapse into one numeral ("1 , 000"
# and year lists like "1997 , 2001" both glue); spaced groups without a
# comma ("1815 1827") stay separate numbers.
_SEP_RE = re.compile(r"(?<=\d)\s*,\s*(?=\d)")
_PURE_NUM_RE = re.compile(r"[-+]?(?:\d+(?:\.\d+)?|\.\d+)(?:e[-+]?\d+)?")
_CURRENCY = "$€£¥"


def _norm_text(raw: str) -> str:
    return _WS_RE.sub(" ", raw.strip().lower())


def _try_number(text: str) -> Optional[float]:
    """Parse a whole cell as one number, tolerating thousands separators,
    a leading currency symbol, and a trailing percent sign."""
    s = text.strip()
    if s and s[0] in _CURRENCY:
        s = s[1:].strip()
    if s.endswith("%"):
        s = s[:-1].strip()
    s = re.sub(r"^([-+])\s+", r"\1", s)
    s = _SEP_RE.sub("", s)
    if not s or not _PURE_NUM_RE.fullmatch(s):
        return None
    try:
        return float(s)
    except ValueError:  # pragma: no cover - fullmatch should prevent this
        return None


def _valid_md(month: int, day: int) -> bool:
    return 1 <= month <= 12 and 1 <= day <= 31


def _try_date(text: str) -> Optional[ApproxDate]:
    """Recognize the date shapes that occur in tokenized wiki tables.

    Accepted: "january 2 , 1975", "january 1975", "2 january 1975",
    "1975 - 01 - 02", "01 / 02 / 1975", "1975 / 76" style is NOT a date.
    A bare 4-digit integer stays a Number (years compare numerically).
    """
    toks = text.replace(",", " , ").split()
    toks = [t for t in toks if t != ","]
    # month day year  /  month year
    if toks and toks[0] in MONTHS:
        m = MONTHS[toks[0]]
        if len(toks) == 2 and toks[1].isdigit() and len(toks[1]) == 4:
            return ApproxDate(int(toks[1]), m)
        if len(toks) == 3 and toks[1].isdigit() and toks[2].isdigit() and len(toks[2]) == 4:
            d, y = int(toks[1]), int(toks[2])
            if 1 <= d <= 31:
                return ApproxDate(y, m, d)
    # day month year  /  day month
    if len(toks) >= 2 and toks[0].isdigit() and toks[1] in MONTHS:
        d, m = int(toks[0]), MONTHS[toks[1]]
        if 1 <= d <= 31:
            if len(toks) == 3 and toks[2].isdigit() and len(toks[2]) == 4:
                return ApproxDate(int(toks[2]), m, d)
    # yyyy - mm - dd
    if len(toks) == 5 and toks[1] == "-" and toks[3] == "-":
        a, b, c = toks[0], toks[2], toks[4]
        if a.isdigit() and b.isdigit() and c.isdigit() and len(a) == 4:
            if _valid_md(int(b), int(c)):
                return ApproxDate(int(a), int(b), int(c))
    flat = text.replace(" ", "")
    m_iso = re.fullmatch(r"(\d{4})-(\d{1,2})-(\d{1,2})", flat)
    if m_iso and _valid_md(int(m_iso.group(2)), int(m_iso.group(3))):
        return ApproxDate(int(m_iso.group(1)), int(m_iso.group(2)), int(m_iso.group(3)))
    m_us = re.fullmatch(r"(\d{1,2})/(\d{1,2})/(\d{4})", flat)
    if m_us and _valid_md(int(m_us.group(1)), int(m_us.group(2))):
        return ApproxDate(int(m_us.group(3)), int(m_us.group(1)), int(m_us.group(2)))
    return None


_HMS_TIME_RE = re.compile(r"\b(\d+):([0-5]\d):(\d\d(?:\.\d+)?)\b")
_COLON_TIME_RE = re.compile(r"\b(\d+):([0-5]\d(?:\.\d+)?)\b")


def _expand_times(text: str) -> str:
    """Rewrite clock-style marks as a seconds count ("1:15.9" -> 75.9,
    "1:04:22" -> 3862) so they order correctly against plain seconds."""
    text = _HMS_TIME_RE.sub(
        lambda m: str(3600 * int(m.group(1)) + 60 * int(m.group(2))
                      + float(m.group(3))), text)
    return _COLON_TIME_RE.sub(
        lambda m: str(60 * int(m.group(1)) + float(m.group(2))), text)


def all_numbers(text: str) -> list[float]:
    """Every digit run in the text, separators stripped, in order."""
    s = _SEP_RE.sub("", _expand_times(text))
    return [float(m.group(0)) for m in _NUM_RE.finditer(s)]


_YEAR_IN_TEXT_RE = re.compile(r"\b(1[0-9]{3}|20[0-9]{2})\b")
_MONTH_IN_TEXT_RE = re.compile(
    r"\b(january|february|march|april|may|june|july|august|september|"
    r"october|november|december|jan|feb|mar|apr|jun|jul|aug|sept|sep|"
    r"oct|nov|dec)\b")
_DAY_IN_TEXT_RE = re.compile(r"\b([0-9]|[12][0-9]|3[01])\b")


def date_text_key(text: str) -> Optional[tuple[float, ...]]:
    """Chronological key for free text with an embedded year or month.

    A year yields (year, month, day); month-only text like "january" or
    "august - september" yields (month, day). Zero fills gaps.
    """
    ym = _YEAR_IN_TEXT_RE.search(text)
    if ym:
        year = float(ym.group(1))
        rest = text[:ym.start()] + text[ym.end():]
        mm = _MONTH_IN_TEXT_RE.search(rest)
        month = float(MONTHS[mm.group(1)]) if mm else 0.0
        dm = _DAY_IN_TEXT_RE.search(rest)
        return (year, month, float(dm.group(1)) if dm else 0.0)
    mm = _MONTH_IN_TEXT_RE.search(text)
    if mm:
        rest = text[:mm.start()] + text[mm.end():]
        dm = _DAY_IN_TEXT_RE.search(rest)
        return (float(MONTHS[mm.group(1)]),
                float(dm.group(1)) if dm else 0.0)
    return None


def _first_number(text: str) -> Optional[float]:
    """First maximal digit run (with optional decimal point/sign) after
    thousands-separator stripping."""
    s = _SEP_RE.sub("", _expand_times(text))
    m = _NUM_RE.search(s)
    if not m:
        return None
    try:
        return float(m.group(0))
    except ValueError:  # pragma: no cover
        return None


_RESULT_RE = re.compile(r"=\s*([-+]?\d+(?:\.\d+)?)")
_WEEKDAYS = ("monday", "tuesday", "wednesday", "thursday", "friday",
             "saturday", "sunday")


def parse_cell(raw: str) -> CellValue:
    """Classify one raw cell string: Date, then Number, then Text.

    Total and deterministic; unparseable content degrades to Text with a
    first_number facet when any digit run is present.
    """
    text = _norm_text(raw)
    datable = text
    for wd in _WEEKDAYS:
        if datable.startswith(wd):
            datable = datable[len(wd):].lstrip(" ,")
            break
    d = _try_date(datable)
    if d is not None:
        return CellValue(Kind.DATE, text, date=d, first_number=_first_number(text))
    n = _try_number(text)
    if n is not None:
        return CellValue(Kind.NUMBER, text, number=n, first_number=n)
    m = _RESULT_RE.search(text)
    result = float(m.group(1)) if m else None
    return CellValue(Kind.TEXT, text, first_number=_first_number(text),
                     result_number=result)


@dataclass(frozen=True)
class Cell:
    raw: str
    value: CellValue


@dataclass(frozen=True)
class Table:
    """An immutable captioned grid of parsed cells."""

    table_id: str
    caption: str
    columns: tuple[str, ...]
    rows: tuple[tuple[Cell, ...], ...]

    @property
    def row_count(self) -> int:
        return len(self.rows)

    @property
    def col_count(self) -> int:
        return len(self.columns)

    def column_index(self, name: str) -> Optional[int]:
        """Resolve a column by exact, then fuzzy, name match."""
        want = _norm_text(name)
        for i, c in enumerate(self.columns):
            if _norm_text(c) == want:
                return i
        for i, c in enumerate(self.columns):
            if fuzzy_eq_text(_norm_text(c), want):
                return i
        return None

    def cell(self, row: int, col: int) -> CellValue:
        return self.rows[row][col].value

    @cached_property
    def summary_rows(self) -> frozenset[int]:
        """Rows that look like footer totals rather than data."""
        found = set()
        for r, row in enumerate(self.rows):
            if any(_is_summary_label(cell.value.text) for cell in row):
                found.add(r)
        return frozenset(found)


_SUMMARY_LABELS = frozenset({
    "total", "totals", "grand total", "combined total", "sum",
    "career total", "career totals", "overall", "overall total",
})


def _is_summary_label(text: str) -> bool:
    s = text.strip(" :")
    if s in _SUMMARY_LABELS or s.replace(" ", "") in _SUMMARY_LABELS:
        return True
    return s.startswith("subtotal")


@dataclass(frozen=True)
class View:
    """An ordered subset of a table's rows (indices strictly ascending)."""

    table: Table
    row_indices: tuple[int, ...]

    def __post_init__(self) -> None:
        idx = self.row_indices
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("view indices must be strictly ascending")
        if idx and not (0 <= idx[0] and idx[-1] < self.table.row_count):
            raise ValueError("view index out of range")

    def __len__(self) -> int:
        return len(self.row_indices)


def all_rows(table: Table) -> View:
    return View(table, tuple(range(table.row_count)))


def load_table(source) -> Table:
    """Build a Table from a structured record or delimited text.

    Record form: {"table_id", "caption", "columns": [...], "rows": [[...]]}.
    Text form: caption on the first line, then a CSV header and data rows.
    """
    if isinstance(source, str):
        lines = source.splitlines()
        if not lines:
            raise EmptyTable("no content")
        caption = lines[0].strip()
        reader = csv.reader(io.StringIO("\n".join(lines[1:])))
        grid = [row for row in reader if row]
        if not grid:
            raise EmptyTable("no header row")
        source = {"table_id": "", "caption": caption,
                  "columns": grid[0], "rows": grid[1:]}
    columns = [str(c).strip() for c in source["columns"]]
    if not columns:
        raise TableError("table has no columns")
    raw_rows = source["rows"]
    if not raw_rows:
        raise EmptyTable(f"table {source.get('table_id', '')!r} has no data rows")
    for i, row in enumerate(raw_rows):
        if len(row) != len(columns):
            raise RaggedRows(
                f"row {i} has {len(row)} cells, expected {len(columns)}")
    rows = tuple(
        tuple(Cell(str(raw), parse_cell(str(raw))) for raw in row)
        for row in raw_rows)
    return Table(table_id=str(source.get("table_id", "")),
                 caption=_norm_text(str(source.get("caption", ""))),
                 columns=tuple(columns), rows=rows)


def load_table_file(path) -> Table:
    with open(path, encoding="utf-8") as f:
        text = f.read()
    if str(path).endswith(".json"):
        return load_table(json.loads(text))
    return load_table(text)


def _fuzzy_tokens(text: str) -> list[str]:
    return _WS_RE.sub(" ", _PUNCT_RE.sub(" ", text.lower())).split()


def fuzzy_eq_text(a: str, b: str) -> bool:
    """Symmetric token-containment equality: the shorter side's token
    sequence occurs contiguously in the longer's (used for header lookup)."""
    ta, tb = _fuzzy_tokens(a), _fuzzy_tokens(b)
    if not ta or not tb:
        return ta == tb
    short, long = (ta, tb) if len(ta) <= len(tb) else (tb, ta)
    return _contains(long, short)


def fuzzy_contains(cell_text: str, value_text: str) -> bool:
    """Directional fuzzy match: the sought value's tokens occur
    contiguously inside the cell.  Direction matters: a "forward" cell
    must not match the value "power forward"."""
    tc, tv = _fuzzy_tokens(cell_text), _fuzzy_tokens(value_text)
    if not tc or not tv:
        return tc == tv
    return len(tv) <= len(tc) and _contains(tc, tv)


def _contains(haystack: list[str], needle: list[str]) -> bool:
    return any(haystack[i:i + len(needle)] == needle
               for i in range(len(haystack) - len(needle) + 1))


def compare_cells(a: CellValue, b: CellValue,
                  ordering: bool = False) -> Comparison:
    """Deterministic three-way-plus-fuzzy comparison of two cell values.

    Numbers compare numerically, dates chronologically, text by the fuzzy
    containment rule.  A Number against mixed text compares through the
    text's first_number facet.  Text never orders lexicographically.

    With ordering=True the containment shortcuts are skipped: "3" sits
    inside "3.275 msnm" which is fine for equality tests but would make
    a greater/less check report a tie instead of 3.275 > 3.
    """
    if a.kind is Kind.DATE and b.kind is Kind.DATE:
        ka, kb = a.date.sort_key(), b.date.sort_key()
        if a.date == b.date:
            return Comparison.EQUAL
        if a.date.year == b.date.year and (
                a.date.month is None or b.date.month is None
                or (a.date.month == b.date.month
                    and (a.date.day is None or b.date.day is None))):
            return Comparison.FUZZY_EQUAL
        return Comparison.LESS if ka < kb else Comparison.GREATER
    if a.kind is not Kind.TEXT and b.kind is not Kind.TEXT:
        # number vs number, or number vs date: compare numerically where
        # possible (a bare year parses as Number; year order is numeric)
        na = a.number if a.kind is Kind.NUMBER else float(a.date.year)
        nb = b.number if b.kind is Kind.NUMBER else float(b.date.year)
        if math.isclose(na, nb, rel_tol=1e-9, abs_tol=1e-9):
            return Comparison.EQUAL if a.kind == b.kind else Comparison.FUZZY_EQUAL
        return Comparison.LESS if na < nb else Comparison.GREATER
    if a.kind is Kind.TEXT and b.kind is Kind.TEXT:
        if a.text == b.text:
            return Comparison.EQUAL
        if not ordering and fuzzy_contains(a.text, b.text):
            return Comparison.FUZZY_EQUAL
        da, db = date_text_key(a.text), date_text_key(b.text)
        if da is not None and db is not None and len(da) == len(db):
            if da < db:
                return Comparison.LESS
            if da > db:
                return Comparison.GREATER
        # mixed cells like scores ("15.14 ( 104 )") or times ("1:09.12.98")
        # order by their embedded number sequences, position by position
        na, nb = all_numbers(a.text), all_numbers(b.text)
        for x, y in zip(na, nb):
            if x < y:
                return Comparison.LESS
            if x > y:
                return Comparison.GREATER
        return Comparison.INCOMPARABLE
    # text vs number/date: try the numeric facet of the text side
    txt, other = (a, b) if a.kind is Kind.TEXT else (b, a)
    if not ordering and fuzzy_contains(a.text, b.text):
        return Comparison.FUZZY_EQUAL
    if a.text.replace(" ", "") == b.text.replace(" ", ""):
        return Comparison.FUZZY_EQUAL
    n_txt = txt.numeric
    n_other = other.number if other.kind is Kind.NUMBER else float(other.date.year)
    if n_txt is None or n_other is None:
        return Comparison.INCOMPARABLE
    if n_txt == n_other:
        return Comparison.FUZZY_EQUAL
    flipped = txt is a
    if n_txt < n_other:
        return Comparison.LESS if flipped else Comparison.GREATER
    return Comparison.GREATER if flipped else Comparison.LESS
