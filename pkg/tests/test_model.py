import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mwq.classifier import classify_kb, cyclic
from mwq.errors import InconsistentKBError
from mwq.generator import random_instance
from mwq.kb import KnowledgeBase
from mwq.model import ANON_PREFIX, build_named_part, expand_canonical
from mwq.normalizer import normalize
from mwq.queries import NCQ, Atom, Var
from mwq.evaluation import eval_ncq_direct
from mwq.textio import parse_kb


def user_labels(interp, d):
    return {a for a in interp.labels[d] if not a.startswith("_") and a != "top"}


@pytest.fixture
def kc(cancer):
    nkb = normalize(cancer[0])
    table = classify_kb(nkb)
    return nkb, table, build_named_part(nkb, table)


class TestNamedPart:
    def test_patient_memberships(self, kc):
        _, _, named = kc
        assert user_labels(named, "p1") == {"BreastCancerPatient", "CancerPatient"}
        assert named.edges.get("diagnosedWith") == frozenset({("p3", "c3")})

    def test_saturation_through_role(self, kc):
        _, _, named = kc
        assert user_labels(named, "c3") == {"SkinOfBreastCancer", "Cancer", "SkinCancer", "BreastCancer"}
        assert user_labels(named, "p3") == {"CancerPatient", "SkinCancerPatient", "BreastCancerPatient"}

    def test_empty_abox(self):
        nkb = normalize(parse_kb("A SUB B\n"))
        named = build_named_part(nkb, classify_kb(nkb))
        assert named.domain == [] and named.extension("B") == set()

    def test_role_hierarchy_closes_edges(self):
        nkb = normalize(parse_kb("role r SUB s\nr(a,b)\n"))
        named = build_named_part(nkb, classify_kb(nkb))
        assert named.has_edge("s", "a", "b")

    def test_inconsistent_rejected(self):
        nkb = normalize(parse_kb("A AND B SUB bot\nA(a)\nB(a)\n"))
        with pytest.raises(InconsistentKBError):
            build_named_part(nkb, classify_kb(nkb))


class TestExpansion:
    def test_one_successor_for_p1(self, kc):
        _, table, named = kc
        full = expand_canonical(named, table, 2)
        (c1,) = full.children("p1")
        assert user_labels(full, c1) == {"BreastCancer", "Cancer"}
        (f1,) = full.children(c1)
        assert user_labels(full, f1) == {"BreastStructure"}

    def test_two_successors_for_p2(self, kc):
        _, table, named = kc
        full = expand_canonical(named, table, 2)
        kinds = [frozenset(user_labels(full, c)) for c in full.children("p2")]
        assert len(kinds) == 2
        assert set(kinds) == {frozenset({"SkinCancer", "Cancer"}), frozenset({"BreastCancer", "Cancer"})}

    def test_named_witness_blocks_fresh_children(self, kc):
        _, table, named = kc
        full = expand_canonical(named, table, 2)
        assert full.children("p3") == []
        (f3,) = full.children("c3")
        assert user_labels(full, f3) == {"SkinOfBreastStructure", "SkinStructure", "BreastStructure"}

    def test_depth_zero_is_named_part(self, kc):
        _, table, named = kc
        assert expand_canonical(named, table, 0).domain == named.domain

    def test_anonymous_elements_are_tree_shaped(self, kc):
        _, table, named = kc
        full = expand_canonical(named, table, None)
        for r, pairs in full.edges.items():
            for d, e in pairs:
                if str(e).startswith(ANON_PREFIX):
                    assert full.parent[e] == d
                    assert full.depth[e] == full.depth[d] + 1
        anon = [d for d in full.domain if str(d).startswith(ANON_PREFIX)]
        for e in anon:
            incoming = [(r, d) for r, pairs in full.edges.items() for d, x in pairs if x == e]
            assert {d for _, d in incoming} == {full.parent[e]}

    def test_equivalent_restrictions_get_one_child(self):
        nkb = normalize(parse_kb("A SUB some r . B\nA SUB some r . C\nB SUB C\nC SUB B\nA(a)\n"))
        table = classify_kb(nkb)
        full = expand_canonical(build_named_part(nkb, table), table, 3)
        assert len(full.children("a")) == 1

    def test_cyclic_expansion_is_truncated(self):
        nkb = normalize(parse_kb("A SUB some r . B\nB SUB some r . A\nA(a)\n"))
        table = classify_kb(nkb)
        full = expand_canonical(build_named_part(nkb, table), table, 4)
        assert max(full.depth.values()) == 4


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_existentials_satisfied_up_to_frontier(seed):
    kb = random_instance(seed).kb
    nkb = normalize(kb)
    table = classify_kb(nkb)
    limit = None if not cyclic(table) else 3
    full = expand_canonical(build_named_part(nkb, table), table, limit)
    for d in full.domain:
        if limit is not None and full.depth[d] >= limit:
            continue
        for ax in table.told_existentials():
            if ax.a in full.labels[d]:
                assert any(
                    table.role_subsumed(s, ax.role) and ax.b in full.labels[e] for s, e in full.out_edges(d)
                ), (d, ax)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_positive_queries_stable_beyond_locality_bound(seed):
    inst = random_instance(seed)
    nkb = normalize(inst.kb)
    table = classify_kb(nkb)
    q = inst.query.as_ncq()
    positive = NCQ(q.answer, frozenset(a for a in q.atoms if a.positive))
    v = len(positive.variables())
    named = build_named_part(nkb, table)
    shallow = eval_ncq_direct(positive, expand_canonical(named, table, v + 1))
    deeper = eval_ncq_direct(positive, expand_canonical(named, table, v + 3))
    assert shallow == deeper


def test_empty_structure_answers_nothing():
    empty = build_named_part(normalize(KnowledgeBase()), classify_kb(normalize(KnowledgeBase())))
    q = NCQ((Var("x"),), frozenset({Atom("A", (Var("x"),))}))
    assert eval_ncq_direct(q, empty) == set()
