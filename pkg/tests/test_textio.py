import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mwq.answers import AnswerSet
from mwq.errors import ParseError, ValidationError
from mwq.generator import random_instance
from mwq.intervals import POS_INF, DiamondOp, IntervalSet
from mwq.kb import CI, And, ConceptAssertion, Diam, Exists, Name, RoleAssertion
from mwq.queries import AndF, Box, Leaf, Not, render_full_query
from mwq.textio import ingest_csv, parse_kb, parse_query, serialize_kb, write_answers

HEADER = "kind,predicate,subject,object,time\n"


class TestParseKB:
    def test_equivalence_becomes_two_inclusions(self):
        kb = parse_kb("BreastCancer EQV Cancer AND some findingSite . BreastStructure\n")
        rhs = And(Name("Cancer"), Exists("findingSite", Name("BreastStructure")))
        assert set(kb.tbox) == {CI(Name("BreastCancer"), rhs), CI(rhs, Name("BreastCancer"))}
        assert not kb.temporal

    def test_convex_diamond_axiom(self):
        kb = parse_kb("conv[120] ChemotherapyPatient SUB ChemotherapyPatient\n")
        op = DiamondOp.convex_n(120)
        assert kb.tbox == (CI(Diam(op, Name("ChemotherapyPatient")), Name("ChemotherapyPatient")),)
        assert kb.temporal

    def test_timed_assertion(self):
        kb = parse_kb("ChemotherapyPatient(p1) @ 167\n")
        assert kb.abox == (ConceptAssertion("ChemotherapyPatient", "p1", 167),)
        assert kb.tem == [167]

    def test_diamond_on_right_rejected(self):
        with pytest.raises(ValidationError) as err:
            parse_kb("A SUB conv B\n", "f.txt")
        assert str(err.value.location) == "f.txt:1:7"

    def test_mixed_time_modes_rejected(self):
        with pytest.raises(ValidationError):
            parse_kb("A(a)\nB(b) @ 3\n")

    @pytest.mark.parametrize("text", ["A SUB\n", "A SUB B\n  C SUB @@\n", "r(a,b,c)\n"])
    def test_syntax_errors_carry_location(self, text):
        with pytest.raises(ParseError) as err:
            parse_kb(text, "f.txt")
        assert err.value.location.file == "f.txt"
        assert err.value.location.line >= 1

    def test_comments_and_blank_lines(self):
        kb = parse_kb("# note\n\nA SUB B  # trailing\n")
        assert kb.tbox == (CI(Name("A"), Name("B")),)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10_000), st.booleans())
    def test_round_trip(self, seed, temporal):
        kb = random_instance(seed, temporal=temporal).kb
        assert parse_kb(serialize_kb(kb)) == kb


class TestParseQuery:
    def test_chemotherapy_query(self):
        q = parse_query("q(x) := BOX[-90,0]{T(x)} AND NOT BOX[-180,0]{T(x)}")
        assert isinstance(q.formula, AndF)
        assert isinstance(q.formula.left, Box) and q.formula.left.interval.lo == -90
        assert isinstance(q.formula.right, Not)

    def test_negated_atom(self):
        q = parse_query("q(x) := {dW(x,y), Cancer(y), fS(y,z), BreastStructure(z), not SkinStructure(z)}")
        negated = [a for a in q.formula.query.atoms if not a.positive]
        assert [(a.pred, str(a.args[0])) for a in negated] == [("SkinStructure", "z")]

    def test_boolean_query(self):
        q = parse_query("q() := {A(x)}")
        assert q.answer == () and isinstance(q.formula, Leaf)

    def test_unguarded_negation_rejected(self):
        with pytest.raises(ValidationError):
            parse_query("q(x) := {not A(x)}")

    @pytest.mark.parametrize(
        "text",
        ["q(x) := DIA[3,1]{A(x)}", "q(x) := {A(x)} U[-1,2] {B(x)}", "q(x) := {A(x)", "q(x) := BOX[inf,2]{A(x)}"],
    )
    def test_malformed(self, text):
        with pytest.raises(ParseError):
            parse_query(text)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10_000))
    def test_rendered_queries_parse_back(self, seed):
        q = random_instance(seed, temporal=True).query
        assert parse_query(render_full_query(q)) == q


class TestCsv:
    def test_timed_concept_row(self):
        rows = ingest_csv(HEADER + "concept,ChemotherapyPatient,p1,,0\n")
        assert rows == [ConceptAssertion("ChemotherapyPatient", "p1", 0)]

    def test_role_row(self):
        assert ingest_csv(HEADER + "role,diagnosedWith,p3,c3,\n") == [RoleAssertion("diagnosedWith", "p3", "c3")]

    def test_header_only(self):
        assert ingest_csv(HEADER) == []

    @pytest.mark.parametrize(
        "row", ["thing,A,a,,\n", "concept,A,a,,x\n", "role,r,a,,\n", "concept,A,a,b,\n"]
    )
    def test_bad_rows(self, row):
        with pytest.raises(ParseError):
            ingest_csv(HEADER + row, "d.csv")


class TestWriteAnswers:
    def test_temporal_json(self):
        ans = AnswerSet(("x",), {("p1",): IntervalSet.of([(257, 258)])}, True)
        assert write_answers(ans) == '{"answers":[{"tuple":["p1"],"intervals":[[257,258]]}]}'

    def test_empty(self):
        assert write_answers(AnswerSet(("x",), {}, False)) == '{"answers":[]}'

    def test_unbounded(self):
        ans = AnswerSet(("x",), {("p1",): IntervalSet.everything()}, True)
        assert json.loads(write_answers(ans))["answers"][0]["intervals"] == [["-inf", "inf"]]

    def test_sorted_and_csv(self):
        ans = AnswerSet(("x",), {("p2",): None, ("p1",): None}, False)
        assert write_answers(ans) == '{"answers":[{"tuple":["p1"]},{"tuple":["p2"]}]}'
        assert write_answers(ans, "csv") == "x\np1\np2\n"

    def test_temporal_csv_one_row_per_interval(self):
        ans = AnswerSet(("x",), {("a",): IntervalSet.of([(0, 0), (5, POS_INF)])}, True)
        assert write_answers(ans, "csv") == "x,from,to\na,0,0\na,5,inf\n"
