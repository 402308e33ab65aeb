import json

import pytest

from tablelogic.tables import (ApproxDate, Comparison, EmptyTable, Kind,
                               RaggedRows, all_numbers, all_rows,
                               compare_cells, date_text_key, fuzzy_contains,
                               fuzzy_eq_text, load_table, parse_cell)

from conftest import FIXTURE


# -- cell parsing -----------------------------------------------------------

@pytest.mark.parametrize("raw,number", [
    ("4", 4.0),
    ("37,100,000", 37100000.0),
    ("1 , 246 , 700", 1246700.0),
    ("- 3.5", -3.5),
    ("$ 1,200", 1200.0),
    ("45 %", 45.0),
    ("1969", 1969.0),           # bare years stay numbers
    ("2.381", 2.381),
])
def test_number_cells(raw, number):
    v = parse_cell(raw)
    assert v.kind is Kind.NUMBER
    assert v.number == number


@pytest.mark.parametrize("raw,date", [
    ("january 2 , 1975", ApproxDate(1975, 1, 2)),
    ("2 january 1975", ApproxDate(1975, 1, 2)),
    ("january 1975", ApproxDate(1975, 1)),
    ("1975 - 01 - 02", ApproxDate(1975, 1, 2)),
    ("1975-01-02", ApproxDate(1975, 1, 2)),
    ("01 / 02 / 1975", ApproxDate(1975, 1, 2)),
    ("aug 1997", ApproxDate(1997, 8)),
    ("monday , january 2 , 1975", ApproxDate(1975, 1, 2)),  # weekday prefix
])
def test_date_cells(raw, date):
    v = parse_cell(raw)
    assert v.kind is Kind.DATE
    assert v.date == date


@pytest.mark.parametrize("raw", [
    "1975 / 76",          # season span, not a date
    "32 january 1975",    # day out of range
    "13 / 32 / 1975",     # no valid month/day reading
    "january",            # month alone stays text
])
def test_non_dates_stay_text(raw):
    assert parse_cell(raw).kind is not Kind.DATE


def test_text_cell_facets():
    v = parse_cell("L 4 - 2")
    assert v.kind is Kind.TEXT
    assert v.text == "l 4 - 2"
    assert v.first_number == 4.0


def test_result_cell():
    v = parse_cell("4 - 2 = 2")
    assert v.result_number == 2.0
    assert v.numeric == 2.0


def test_time_cells_expand_to_seconds():
    assert parse_cell("1:15.9").numeric == pytest.approx(75.9)
    assert parse_cell("1:04:22").numeric == 3862.0
    assert all_numbers("1:30 , then 2:00") == [90.0, 120.0]


def test_all_numbers_separator_rules():
    # commas glue digit groups; bare spaces never do
    assert all_numbers("1 , 000") == [1000.0]
    assert all_numbers("1815 1827") == [1815.0, 1827.0]


def test_date_text_key():
    assert date_text_key("week of january 5 , 1997") == (1997.0, 1.0, 5.0)
    assert date_text_key("august - september") == (8.0, 0.0)
    assert date_text_key("no dates here") is None


# -- fuzzy matching ---------------------------------------------------------

def test_fuzzy_contains_is_directional():
    assert fuzzy_contains("power forward", "forward")
    assert not fuzzy_contains("forward", "power forward")
    assert fuzzy_contains("detroit , michigan", "detroit")


def test_fuzzy_eq_text_is_symmetric():
    assert fuzzy_eq_text("score", "final score")
    assert fuzzy_eq_text("final score", "score")
    assert not fuzzy_eq_text("score", "scorer")


# -- comparison -------------------------------------------------------------

def _cmp(a, b, **kw):
    return compare_cells(parse_cell(a), parse_cell(b), **kw)


def test_compare_numbers():
    assert _cmp("4", "4.0") is Comparison.EQUAL
    assert _cmp("3", "4") is Comparison.LESS
    assert _cmp("2,000", "1999") is Comparison.GREATER


def test_compare_dates():
    assert _cmp("january 2 , 1975", "march 1975") is Comparison.LESS
    assert _cmp("january 1975", "january 2 , 1975") is Comparison.FUZZY_EQUAL
    assert _cmp("1975 - 01 - 02", "2 january 1975") is Comparison.EQUAL


def test_compare_year_number_vs_date():
    assert _cmp("1975", "january 1976") is Comparison.LESS


def test_compare_text_containment():
    assert _cmp("detroit , michigan", "detroit") is Comparison.FUZZY_EQUAL
    assert _cmp("liverpool", "everton") is Comparison.INCOMPARABLE


def test_compare_mixed_text_by_numbers():
    assert _cmp("l 4 - 2", "w 3 - 0") is Comparison.GREATER
    assert _cmp("15.14 ( 104 )", "15.20 ( 110 )") is Comparison.LESS


def test_ordering_flag_skips_containment():
    # containment says "3" matches "3.275 msnm"; an order comparison
    # must fall through to the numbers instead
    assert _cmp("3.275 msnm", "3") is Comparison.FUZZY_EQUAL
    assert _cmp("3.275 msnm", "3", ordering=True) is Comparison.GREATER


# -- tables -----------------------------------------------------------------

def test_load_table_record(f1):
    assert f1.table_id == "opec_2012"
    assert f1.row_count == 7
    assert f1.col_count == 5
    assert f1.cell(0, 3).number == 37100000.0


def test_load_table_delimited_text():
    t = load_table("caption line\na,b\n1,x\n2,y\n")
    assert t.caption == "caption line"
    assert t.columns == ("a", "b")
    assert t.row_count == 2


def test_column_index_fuzzy(f1):
    assert f1.column_index("region") == 1
    assert f1.column_index("Region") == 1
    assert f1.column_index("no such column") is None


def test_ragged_rows_rejected():
    with pytest.raises(RaggedRows):
        load_table({"table_id": "t", "caption": "", "columns": ["a", "b"],
                    "rows": [["1"]]})


def test_empty_table_rejected():
    with pytest.raises(EmptyTable):
        load_table({"table_id": "t", "caption": "", "columns": ["a"],
                    "rows": []})


def test_summary_rows_detected():
    t = load_table({"table_id": "t", "caption": "", "columns": ["name", "pts"],
                    "rows": [["ann", "3"], ["bob", "4"], ["total", "7"]]})
    assert t.summary_rows == frozenset({2})
    with open(FIXTURE, encoding="utf-8") as f:
        assert load_table(json.load(f)).summary_rows == frozenset()


def test_view_invariants(f1):
    v = all_rows(f1)
    assert len(v) == 7
    from tablelogic.tables import View
    with pytest.raises(ValueError):
        View(f1, (2, 1))
    with pytest.raises(ValueError):
        View(f1, (0, 99))
