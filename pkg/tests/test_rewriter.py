import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mwq.classifier import classify_kb
from mwq.generator import random_instance
from mwq.normalizer import normalize
from mwq.queries import Atom, FilteredQuery, Ind, Var
from mwq.rewriter import (
    RewriteChoice,
    all_rewritings,
    applicable_choices,
    canonical_key,
    depth_bound,
    rewrite_step,
    rewriting_to_json,
)
from mwq.textio import parse_kb, parse_query


@pytest.fixture
def kc(cancer):
    kb, q = cancer
    return classify_kb(normalize(kb)), FilteredQuery.from_ncq(q.formula.query)


def ncq(text):
    return parse_query(text).formula.query


def positive_names(fq, var):
    return {a.pred for a in fq.atoms if a.positive and not a.is_role and a.args == (var,)}


def negative_names(fq, var):
    return {a.pred for a in fq.atoms if not a.positive and not a.is_role and a.args == (var,)}


class TestChoices:
    def test_breast_cancer_choice_applies(self, kc):
        table, qb = kc
        assert RewriteChoice(Var("z"), "BreastCancer", "findingSite", "BreastStructure") in applicable_choices(qb, table)

    def test_skin_of_breast_choice_blocked(self, kc):
        table, qb = kc
        assert all(c.concept != "SkinOfBreastStructure" for c in applicable_choices(qb, table))

    def test_no_quantified_leaf(self, kc):
        table, _ = kc
        assert applicable_choices(FilteredQuery.from_ncq(ncq("q(x) := {CancerPatient(x)}")), table) == []


class TestSteps:
    def test_first_step(self, kc):
        table, qb = kc
        (choice,) = applicable_choices(qb, table)
        step = rewrite_step(qb, choice, table)
        assert step.nested_filter_depth() == 1
        (y,) = step.quantified()
        assert {"BreastCancer", "Cancer"} <= positive_names(step, y)
        assert negative_names(step, y) == {"SkinOfBreastCancer"}
        ((subject, flt),) = step.filters
        assert subject == y and (flt.role, flt.concept) == ("findingSite", "BreastStructure")
        assert flt.neg_concepts == frozenset({"SkinStructure"})

    def test_second_step_nests_the_filter(self, kc):
        table, qb = kc
        first = rewrite_step(qb, applicable_choices(qb, table)[0], table)
        choices = applicable_choices(first, table)
        assert [(c.m, c.role, c.concept) for c in choices] == [("BreastCancerPatient", "diagnosedWith", "BreastCancer")]
        second = rewrite_step(first, choices[0], table)
        assert second.nested_filter_depth() == 2
        assert second.quantified() == set()
        assert positive_names(second, Var("x")) == {"BreastCancerPatient"}

    def test_cyclic_first_step(self):
        table = classify_kb(normalize(parse_kb("A SUB some r . B\nB SUB some r . A\n")))
        start = FilteredQuery.from_ncq(ncq("q() := {A(x), not B(x)}"))
        (choice,) = applicable_choices(start, table)
        step = rewrite_step(start, choice, table)
        (y,) = step.quantified()
        assert positive_names(step, y) == {"B"}
        ((_, flt),) = step.filters
        assert (flt.role, flt.concept, flt.neg_concepts) == ("r", "A", frozenset({"B"}))


class TestAllRewritings:
    def test_running_example(self, kc):
        table, qb = kc
        rs = all_rewritings(qb, table)
        assert rs[0] == qb
        assert [r.nested_filter_depth() for r in rs] == [0, 1, 2]

    def test_plain_query_is_kept(self, kc):
        table, _ = kc
        q = ncq("q(x) := {CancerPatient(x)}")
        assert all_rewritings(q, table) == [FilteredQuery.from_ncq(q)]

    def test_cyclic_example_is_cut_by_the_bound(self):
        table = classify_kb(normalize(parse_kb("A SUB some r . B\nB SUB some r . A\n")))
        q = ncq("q() := {A(x), not B(x)}")
        assert depth_bound(1, table) == 1 + 4 * 4 * 1
        stats: dict = {}
        rs = all_rewritings(q, table, stats=stats)
        assert stats["pruned"] > 0
        assert max(r.nested_filter_depth() for r in rs) == stats["bound"] == 17

    def test_duplicates_removed_up_to_renaming(self, kc):
        table, qb = kc
        keys = [canonical_key(r) for r in all_rewritings(qb, table)]
        assert len(keys) == len(set(keys))

    def test_renamed_queries_share_a_key(self):
        a = FilteredQuery.from_ncq(ncq("q(x) := {r(x,y), A(y)}"))
        b = FilteredQuery.from_ncq(ncq("q(x) := {r(x,w), A(w)}"))
        assert canonical_key(a) == canonical_key(b)

    def test_json_shape(self, kc):
        table, qb = kc
        data = rewriting_to_json(all_rewritings(qb, table)[1])
        assert set(data) == {"answer", "atoms", "filters"}
        assert data["filters"][0]["role"] == "findingSite"


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 100_000))
def test_rooted_queries_stay_rooted_and_shrink(seed):
    inst = random_instance(seed)
    table = classify_kb(normalize(inst.kb))
    start = FilteredQuery.from_ncq(inst.query.as_ncq())
    frontier = [start]
    seen = 0
    while frontier and seen < 200:
        cur = frontier.pop()
        seen += 1
        for choice in applicable_choices(cur, table):
            nxt = rewrite_step(cur, choice, table)
            assert nxt.is_rooted()
            assert len(nxt.quantified()) < len(cur.quantified())
            frontier.append(nxt)
    stats: dict = {}
    all_rewritings(start, table, stats=stats)
    assert stats["pruned"] == 0


def test_constant_predecessor_absorbs_the_leaf(kc):
    table, _ = kc
    q = FilteredQuery.from_ncq(ncq("q() := {diagnosedWith('p1',y), Cancer(y)}"))
    choices = applicable_choices(q, table)
    assert choices
    for c in choices:
        step = rewrite_step(q, c, table)
        assert Atom(c.m, (Ind("p1"),)) in step.atoms
        assert step.quantified() == set()
