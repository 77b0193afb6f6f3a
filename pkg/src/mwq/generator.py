"""Seeded random knowledge bases and queries for equivalence testing."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .classifier import classify_kb
from .errors import InconsistentKBError
from .intervals import POS_INF, DiamondOp
from .kb import CI, RI, And, Bot, ConceptAssertion, Diam, Exists, KnowledgeBase, Name, RoleAssertion, Top
from .model import build_named_part
from .normalizer import normalize
from .queries import (
    NCQ,
    AndF,
    Atom,
    Box,
    Dia,
    Ind,
    Leaf,
    Next,
    Not,
    OrF,
    Prev,
    Query,
    Since,
    TimeInterval,
    Until,
    Var,
    check_guarded,
    is_rooted,
)
from .saturation import saturate


@dataclass(frozen=True)
class Limits:
    concepts: int = 5
    roles: int = 3
    axioms: int = 10
    individuals: int = 6
    time_points: int = 4
    query_atoms: int = 4
    temporal_ops: int = 2


@dataclass(frozen=True)
class Instance:
    kb: KnowledgeBase
    query: Query
    seed: int
    attempts: int


MAX_ATTEMPTS = 50


def _tbox(rng: random.Random, lim: Limits, temporal: bool) -> tuple[list, tuple | None]:
    cs = [Name(c) for c in "ABCDE"[: lim.concepts]]
    rs = list("rst"[: lim.roles])
    out = []
    weights = {
        "sub": 25,
        "conj": 12,
        "exists_rhs": 30,
        "exists_lhs": 12,
        "role": 7,
        "complex": 10,
        "bot": 2,
        "diamond": 28 if temporal else 0,
    }
    kinds, ws = zip(*weights.items())
    motif = None
    if rng.random() < 0.3:
        # two existentials where one successor type is redundant next to the other
        a, b, c, d = rng.sample(cs, 4) if len(cs) >= 4 else [rng.choice(cs) for _ in range(4)]
        r = rng.choice(rs)
        out += [CI(a, Exists(r, b)), CI(c, Exists(r, And(b, d)))]
        motif = (a.name, c.name, r, b.name, d.name)
    for _ in range(rng.randint(1, lim.axioms)):
        kind = rng.choices(kinds, ws)[0]
        a, b, c, d = (rng.choice(cs) for _ in range(4))
        r, s = rng.choice(rs), rng.choice(rs)
        if kind == "sub":
            out.append(CI(a, b))
        elif kind == "conj":
            out.append(CI(And(a, b), c))
        elif kind == "exists_rhs":
            out.append(CI(a, Exists(r, b)))
        elif kind == "exists_lhs":
            out.append(CI(Exists(r, Top() if rng.random() < 0.2 else a), b))
        elif kind == "role":
            if r != s:
                out.append(RI(r, s))
        elif kind == "complex":
            shape = rng.randrange(3)
            if shape == 0:
                out.append(CI(And(And(a, b), c), d))
            elif shape == 1:
                out.append(CI(a, Exists(r, And(b, c))))
            else:
                out.append(CI(Exists(r, And(a, b)), c))
        elif kind == "bot":
            out.append(CI(And(a, b), Bot()))
        else:
            op = rng.choice(
                [DiamondOp("past"), DiamondOp("future"), DiamondOp("anytime"), DiamondOp("convex")]
                + [DiamondOp.convex_n(rng.randint(1, 6))] * 3
            )
            out.append(CI(Diam(op, a), b))
    return out, motif


def _abox(rng: random.Random, lim: Limits, temporal: bool) -> list:
    cs = list("ABCDE"[: lim.concepts])
    rs = list("rst"[: lim.roles])
    inds = [f"i{k}" for k in range(rng.randint(1, lim.individuals))]
    times = sorted(rng.sample(range(-6, 16), rng.randint(1, lim.time_points))) if temporal else [None]
    out = set()
    for _ in range(rng.randint(1, (4 if temporal else 2) * len(inds) + 2)):
        t = rng.choice(times)
        if rng.random() < 0.6:
            out.add(ConceptAssertion(rng.choice(cs), rng.choice(inds), t))
        else:
            out.add(RoleAssertion(rng.choice(rs), rng.choice(inds), rng.choice(inds), t))
    return sorted(out, key=str)


def _ncq(rng: random.Random, lim: Limits, anchors: list, individuals: list, hints: tuple = (), favoured: tuple = ()) -> NCQ:
    """A rooted guarded NCQ grown as a tree from its anchors.

    ``hints`` holds (role, concept, negated concept or None) triples from told
    existentials; role atoms sometimes follow one so that anonymous successors
    actually matter. Concept atoms lean towards ``favoured`` names.
    """
    cs = list("ABCDE"[: lim.concepts])
    rs = list("rst"[: lim.roles])

    def concept():
        return rng.choice(favoured) if favoured and rng.random() < 0.5 else rng.choice(cs)

    def edge(t):
        nonlocal fresh
        v = Var(f"v{fresh}")
        fresh += 1
        if hints and rng.random() < 0.5:
            r, c, neg = rng.choice(hints)
            atoms.append(Atom(r, (t, v)))
            atoms.append(Atom(c, (v,)))
            if neg and rng.random() < 0.5:
                atoms.append(Atom(neg, (v,), False))
        else:
            atoms.append(Atom(rng.choice(rs), (t, v)))
        terms.append(v)
        positive.update((t, v))

    terms = list(anchors)
    positive: set = set()
    atoms: list = []
    size = rng.randint(1, lim.query_atoms)
    fresh = 0
    # every anchor gets a positive atom first
    for t in anchors:
        if rng.random() < 0.5:
            atoms.append(Atom(concept(), (t,)))
            positive.add(t)
        else:
            edge(t)
    while len(atoms) < size:
        roll = rng.random()
        t = rng.choice(terms)
        if roll < 0.35:
            edge(t)
        elif roll < 0.6:
            atoms.append(Atom(concept(), (t,)))
            positive.add(t)
        elif roll < 0.9:
            # negations on quantified variables exercise the rewriting most
            inner = [u for u in terms if isinstance(u, Var) and u not in anchors] or terms
            u = rng.choice(inner)
            if u in positive:
                atoms.append(Atom(rng.choice(cs), (u,), False))
        else:
            pairs = [a.args for a in atoms if a.is_role and a.positive]
            if pairs:
                atoms.append(Atom(rng.choice(rs), rng.choice(pairs), False))
    answer = tuple(t for t in anchors if isinstance(t, Var))
    q = NCQ(answer, frozenset(atoms))
    check_guarded(q.atoms)
    assert is_rooted(q.answer, q.atoms)
    return q


def _anchors(rng: random.Random, head: list, individuals: list) -> list:
    if head:
        k = rng.randint(1, len(head))
        return sorted(rng.sample(head, k))
    return [Ind(rng.choice(individuals))]


def _interval(rng: random.Random, natural: bool) -> TimeInterval:
    if natural:
        lo = rng.randint(0, 4)
        hi = POS_INF if rng.random() < 0.2 else lo + rng.randint(0, 4)
    else:
        lo = rng.randint(-4, 3)
        hi = lo + rng.randint(0, 5)
    return TimeInterval(lo, hi)


def _formula(rng: random.Random, lim: Limits, head: list, individuals: list, ops: int, hints: tuple = (), favoured: tuple = ()):
    if ops == 0:
        leaf = _ncq(rng, lim, _anchors(rng, head, individuals), individuals, hints, favoured)
        return Leaf(leaf)
    kind = rng.choice(["U", "S", "BOX", "DIA", "NEXT", "PREV", "NOT", "AND", "OR"])
    if kind in ("U", "S"):
        split = rng.randint(0, ops - 1)
        left = _formula(rng, lim, head, individuals, split, hints, favoured)
        right = _formula(rng, lim, head, individuals, ops - 1 - split, hints, favoured)
        if rng.random() < 0.3:
            left = Not(left)
        cls = Until if kind == "U" else Since
        return cls(left, right, _interval(rng, True))
    if kind in ("BOX", "DIA"):
        cls = Box if kind == "BOX" else Dia
        return cls(_interval(rng, False), _formula(rng, lim, head, individuals, ops - 1, hints, favoured))
    if kind in ("NEXT", "PREV"):
        cls = Next if kind == "NEXT" else Prev
        return cls(_formula(rng, lim, head, individuals, ops - 1, hints, favoured))
    if kind == "NOT":
        return Not(_formula(rng, lim, head, individuals, ops, hints, favoured))
    cls = AndF if kind == "AND" else OrF
    split = rng.randint(0, ops)
    return cls(
        _formula(rng, lim, head, individuals, split, hints, favoured),
        _formula(rng, lim, head, individuals, ops - split, hints, favoured),
    )


def _hints(tbox: list, motif) -> tuple:
    out = {(motif[2], motif[3], motif[4])} if motif else set()
    for ax in tbox:
        if isinstance(ax, CI) and isinstance(ax.rhs, Exists):
            filler = ax.rhs.filler
            while isinstance(filler, And):
                filler = filler.left
            if isinstance(filler, Name):
                out.add((ax.rhs.role, filler.name, None))
    return tuple(sorted(out, key=str))


def _favoured(tbox: list, abox) -> tuple:
    """Concept names that are asserted or derived through a diamond."""
    out = {x.concept for x in abox if isinstance(x, ConceptAssertion)}
    out |= {ax.rhs.name for ax in tbox if isinstance(ax, CI) and isinstance(ax.lhs, Diam) and isinstance(ax.rhs, Name)}
    return tuple(sorted(out))


def _consistent(kb: KnowledgeBase) -> bool:
    try:
        nkb = normalize(kb)
        table = classify_kb(nkb)
        if kb.temporal:
            saturate(nkb, table)
        else:
            build_named_part(nkb, table)
    except InconsistentKBError:
        return False
    return True


def random_instance(seed: int, limits: Limits = Limits(), temporal: bool = False) -> Instance:
    """A consistent knowledge base with a rooted guarded query, determined by the seed."""
    rng = random.Random(f"{seed}:{'temporal' if temporal else 'atemporal'}")
    for attempt in range(1, MAX_ATTEMPTS + 1):
        tbox, motif = _tbox(rng, limits, temporal)
        abox = _abox(rng, limits, temporal)
        if motif and rng.random() < 0.7:
            # one individual triggers both existentials of the motif
            t = abox[0].time
            abox += [ConceptAssertion(motif[0], "i0", t), ConceptAssertion(motif[1], "i0", t)]
        kb = KnowledgeBase(tuple(tbox), tuple(abox), temporal)
        if _consistent(kb):
            break
    else:
        raise RuntimeError(f"seed {seed}: no consistent knowledge base in {MAX_ATTEMPTS} attempts")
    individuals = kb.individuals
    hints = _hints(tbox, motif)
    favoured = _favoured(tbox, kb.abox)
    head_size = rng.choices([0, 1, 2], [15, 65, 20])[0]
    head = [Var("x"), Var("y")][:head_size]
    if temporal:
        ops = rng.randint(1, limits.temporal_ops)
        formula = _formula(rng, limits, head, individuals, ops, hints, favoured)
    else:
        anchors = head if head else [Ind(rng.choice(individuals))]
        formula = Leaf(_ncq(rng, limits, anchors, individuals, hints, favoured))
    return Instance(kb, Query("q", tuple(head), formula), seed, attempt)
