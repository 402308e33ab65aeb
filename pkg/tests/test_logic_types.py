import pytest

from tablelogic.lf import parse_logic_str, print_logic_str
from tablelogic.logic_types import (AnswerRecord, Criterion, IncompleteAnswers,
                                    LogicType, UnbuildableCriterion,
                                    Unclassifiable, build_from_answers,
                                    classify, question_set, validate_answers)
from tablelogic.semantics import evaluate


def test_question_set_sizes():
    # scope follow-ups are conditional, so the headline counts ignore them
    def visible(lt):
        return [q for q in question_set(lt) if q.depends_on is None]
    assert len(visible(LogicType.COUNT)) == 5
    assert len(visible(LogicType.SUPERLATIVE)) == 6
    assert len(visible(LogicType.ORDINAL)) == 7
    assert len(visible(LogicType.COMPARATIVE)) == 6
    assert len(visible(LogicType.AGGREGATION)) == 4
    assert len(visible(LogicType.MAJORITY)) == 5
    assert len(visible(LogicType.UNIQUE)) == 6


def test_scope_followups_depend_on_subset():
    qs = {q.id: q for q in question_set(LogicType.COUNT)}
    assert qs["scope_column"].depends_on == ("scope", "subset")
    assert qs["scope_value"].depends_on == ("scope", "subset")


def test_missing_respects_dependencies():
    rec = AnswerRecord(LogicType.COUNT, {"scope": "all"})
    assert "scope_column" not in rec.missing()
    rec.answers["scope"] = "subset"
    assert "scope_column" in rec.missing()


def test_build_count(f1):
    rec = AnswerRecord(LogicType.COUNT, {
        "scope": "all", "column": "region", "criterion": "equal",
        "value": "africa", "result": "4"})
    ast = build_from_answers(rec, f1)
    assert print_logic_str(ast) == \
        "eq { count { filter_eq { all_rows ; region ; africa } } ; 4 }"
    assert evaluate(ast, f1) is True


def test_build_superlative_with_other_columns(f1):
    rec = AnswerRecord(LogicType.SUPERLATIVE, {
        "scope": "all", "column": "joined", "kind": "maximum",
        "row": "angola", "other_columns": ["region"],
        "value_mentioned": False})
    ast = build_from_answers(rec, f1)
    assert print_logic_str(ast) == (
        "and { eq { hop { argmax { all_rows ; joined } ; country } ; "
        "angola } ; eq { hop { argmax { all_rows ; joined } ; region } ; "
        "africa } }")
    assert evaluate(ast, f1) is True


def test_build_superlative_value_mentioned(f1):
    rec = AnswerRecord(LogicType.SUPERLATIVE, {
        "scope": "all", "column": "joined", "kind": "maximum",
        "row": "angola", "other_columns": [], "value_mentioned": True})
    ast = build_from_answers(rec, f1)
    assert "max { all_rows ; joined }" in print_logic_str(ast)
    assert evaluate(ast, f1) is True


def test_build_ordinal_with_subset_scope(f1):
    rec = AnswerRecord(LogicType.ORDINAL, {
        "scope": "subset", "scope_column": "region",
        "scope_criterion": "equal", "scope_value": "africa",
        "column": "joined", "ranking": "min_to_max", "order": "2",
        "row": "algeria", "other_columns": [], "value_mentioned": False})
    ast = build_from_answers(rec, f1)
    assert print_logic_str(ast) == (
        "eq { hop { nth_argmin { filter_eq { all_rows ; region ; africa } "
        "; joined ; 2 } ; country } ; algeria }")
    assert evaluate(ast, f1) is True


def test_build_comparative(f1):
    rec = AnswerRecord(LogicType.COMPARATIVE, {
        "column": "joined", "row1": "libya", "row2": "kuwait",
        "relation": "difference_value", "diff_value": "2",
        "values_mentioned": False, "other_columns": []})
    ast = build_from_answers(rec, f1)
    assert ast.name == "eq" and ast.children[0].name == "diff"
    assert evaluate(ast, f1) is True


def test_build_comparative_other_relation_unbuildable(f1):
    rec = AnswerRecord(LogicType.COMPARATIVE, {
        "column": "joined", "row1": "libya", "row2": "kuwait",
        "relation": "other", "values_mentioned": False,
        "other_columns": []})
    with pytest.raises(UnbuildableCriterion):
        build_from_answers(rec, f1)


def test_build_aggregation(f1):
    rec = AnswerRecord(LogicType.AGGREGATION, {
        "scope": "subset", "scope_column": "region",
        "scope_criterion": "equal", "scope_value": "africa",
        "column": "population", "kind": "average", "result": "58550000"})
    ast = build_from_answers(rec, f1)
    assert ast.name == "round_eq"
    assert evaluate(ast, f1) is True


def test_build_majority(f1):
    rec = AnswerRecord(LogicType.MAJORITY, {
        "scope": "all", "column": "joined", "kind": "most",
        "criterion": "less", "value": "2000"})
    ast = build_from_answers(rec, f1)
    assert print_logic_str(ast) == "most_less { all_rows ; joined ; 2000 }"
    assert evaluate(ast, f1) is True


def test_build_unique(f1):
    rec = AnswerRecord(LogicType.UNIQUE, {
        "scope": "all", "row": "angola", "column": "joined",
        "criterion": "greater", "value": "2000", "other_columns": []})
    ast = build_from_answers(rec, f1)
    assert print_logic_str(ast) == \
        "only { filter_greater { all_rows ; joined ; 2000 } }"
    assert evaluate(ast, f1) is True


def test_build_incomplete_raises(f1):
    with pytest.raises(IncompleteAnswers) as err:
        build_from_answers(AnswerRecord(LogicType.COUNT, {"scope": "all"}), f1)
    assert "criterion" in err.value.missing


def test_criterion_mapping():
    assert Criterion("equal").filter_name == "filter_eq"
    assert Criterion("fuzzy_match").filter_name == "filter_eq"
    assert Criterion("not_equal").filter_name == "filter_not_eq"
    assert Criterion("greater_eq").filter_name == "filter_greater_eq"
    assert Criterion("all").filter_name == "filter_all"


@pytest.mark.parametrize("logic,expected", [
    ("eq { count { filter_eq { all_rows ; region ; africa } } ; 4 }",
     LogicType.COUNT),
    ("eq { hop { argmax { all_rows ; joined } ; country } ; angola }",
     LogicType.SUPERLATIVE),
    ("eq { hop { nth_argmin { all_rows ; joined ; 2 } ; country } ; iraq }",
     LogicType.ORDINAL),
    ("greater { hop { filter_eq { all_rows ; country ; libya } ; joined } "
     "; hop { filter_eq { all_rows ; country ; kuwait } ; joined } }",
     LogicType.COMPARATIVE),
    ("round_eq { avg { all_rows ; population } ; 40000000 }",
     LogicType.AGGREGATION),
    ("most_less { all_rows ; joined ; 2000 }", LogicType.MAJORITY),
    ("only { filter_greater { all_rows ; joined ; 2000 } }",
     LogicType.UNIQUE),
])
def test_classify(logic, expected):
    assert classify(parse_logic_str(logic)) is expected


def test_classify_sees_through_and_wrappers():
    ast = parse_logic_str(
        "and { greater { hop { filter_eq { all_rows ; country ; libya } ; "
        "joined } ; hop { filter_eq { all_rows ; country ; kuwait } ; "
        "joined } } ; eq { hop { filter_eq { all_rows ; country ; libya } "
        "; region } ; africa } }")
    assert classify(ast) is LogicType.COMPARATIVE


def test_classify_priority_ordinal_beats_unique():
    ast = parse_logic_str(
        "and { only { filter_eq { all_rows ; a ; x } } ; eq { nth_max { "
        "all_rows ; b ; 2 } ; 5 } }")
    assert classify(ast) is LogicType.ORDINAL


def test_classify_unclassifiable():
    with pytest.raises(Unclassifiable):
        classify(parse_logic_str(
            "eq { hop { filter_eq { all_rows ; a ; x } ; b } ; y }"))


def test_validate_answers_flags_unknown_column(f1):
    rec = AnswerRecord(LogicType.COUNT, {
        "scope": "all", "column": "flag colour", "criterion": "equal",
        "value": "red", "result": "4"})
    issues = validate_answers(rec, f1)
    assert any("flag colour" in i for i in issues)


def test_validate_answers_execution_mismatch(f1):
    rec = AnswerRecord(LogicType.COUNT, {
        "scope": "all", "column": "region", "criterion": "equal",
        "value": "africa", "result": "5"})
    assert validate_answers(rec, f1) == \
        ["execution mismatch: program evaluates false"]


def test_validate_answers_clean(f1):
    rec = AnswerRecord(LogicType.COUNT, {
        "scope": "all", "column": "region", "criterion": "equal",
        "value": "africa", "result": "4"})
    assert validate_answers(rec, f1) == []
