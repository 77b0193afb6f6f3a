import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mwq.classifier import classify_kb
from mwq.errors import ParseError, ValidationError
from mwq.generator import random_instance
from mwq.intervals import PAST
from mwq.kb import CI, TOP, ConceptAssertion, ConjCI, DiamCI, ExistsLHS, KnowledgeBase, Name
from mwq.normalizer import normalize
from mwq.oracle import oracle_subsumes
from mwq.textio import parse_kb


def test_diamond_under_existential_is_split():
    nkb = normalize(parse_kb("some r . diaP A SUB B\n"))
    (fresh,) = nkb.definitions
    assert set(nkb.axioms) == {DiamCI(PAST, "A", fresh), ExistsLHS("r", fresh, "B")}


def test_plain_inclusion_is_degenerate_conjunction():
    assert normalize(parse_kb("A SUB B\n")).axioms == (ConjCI("A", TOP, "B"),)


def test_ternary_conjunction_is_chained():
    nkb = normalize(parse_kb("A1 AND A2 AND A3 SUB B\n"))
    (x,) = nkb.definitions
    assert set(nkb.axioms) == {ConjCI("A1", "A2", x), ConjCI(x, "A3", "B")}


@pytest.mark.parametrize("subset", [s for k in range(4) for s in itertools.combinations(["A1", "A2", "A3"], k)])
def test_ternary_conjunction_entailment(subset):
    # a probe name below the chosen conjuncts reaches B only when all three are present
    nkb = normalize(parse_kb("A1 AND A2 AND A3 SUB B\n" + "".join(f"Probe SUB {a}\n" for a in subset)))
    assert oracle_subsumes(nkb.axioms, "Probe", "B") == (len(subset) == 3)


def test_complex_assertion_gets_definition():
    nkb = normalize(parse_kb("(A AND some r . B)(b) @ 2\n"))
    assert nkb.abox[0].individual == "b" and nkb.abox[0].time == 2
    name = nkb.abox[0].concept
    assert name in nkb.definitions
    assert ConjCI(name, TOP, "A") in nkb.axioms


def test_shared_subconcepts_reuse_fresh_names():
    nkb = normalize(parse_kb("A SUB some r . (B AND C)\nD SUB some r . (B AND C)\n"))
    assert len(nkb.definitions) == 1


def test_reserved_prefix_rejected():
    with pytest.raises(ParseError):
        parse_kb("_N1 SUB B\n")
    with pytest.raises(ValidationError):
        normalize(KnowledgeBase((CI(Name("_N1"), Name("B")),)))


def test_fresh_names_are_deterministic():
    text = "A AND B AND C SUB D\nsome r . (A AND B) SUB E\n"
    assert normalize(parse_kb(text)).axioms == normalize(parse_kb(text)).axioms


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10_000), st.booleans())
def test_idempotent(seed, temporal):
    nkb = normalize(random_instance(seed, temporal=temporal).kb)
    assert normalize(nkb).axioms == nkb.axioms


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10_000))
def test_conservative_over_original_names(seed):
    kb = random_instance(seed).kb
    nkb = normalize(kb)
    table = classify_kb(nkb)
    names = sorted(kb.concept_signature())
    for a, b in itertools.product(names, names):
        assert table.subsumed(a, b) == oracle_subsumes(nkb.axioms, a, b), (a, b)


def test_abox_is_carried_over():
    nkb = normalize(parse_kb("A SUB B\nA(a)\n"))
    assert nkb.abox == (ConceptAssertion("A", "a"),)
