"""Rewriting of NCQs into filtered queries that are evaluated over the named part only."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from .classifier import SubsumptionTable
from .errors import MwqError
from .kb import BOT, TOP
from .queries import NCQ, Atom, Filter, FilteredQuery, Ind, Var

MAX_REWRITINGS = 200_000


@dataclass(frozen=True, order=True)
class RewriteChoice:
    """Leaf variable to eliminate and the entailed axiom ``m SUB some role . concept`` explaining it."""

    leaf: Var
    m: str
    role: str
    concept: str


def leaf_variables(fq: FilteredQuery) -> list[Var]:
    """Quantified variables that never occur as the first argument of a role atom."""
    inner = {a.args[0] for a in fq.atoms if a.is_role}
    return sorted(v for v in fq.quantified() if v not in inner)


def _incoming(fq: FilteredQuery, x: Var):
    preds, pos_c, neg_c, pos_r, neg_r = set(), set(), set(), set(), set()
    for a in fq.atoms:
        if a.is_role and a.args[1] == x:
            preds.add(a.args[0])
            (pos_r if a.positive else neg_r).add(a.pred)
        elif not a.is_role and a.args[0] == x:
            (pos_c if a.positive else neg_c).add(a.pred)
    return preds, pos_c, neg_c, pos_r, neg_r


def applicable_choices(fq: FilteredQuery, table: SubsumptionTable) -> list[RewriteChoice]:
    out = set()
    told = [ax for ax in table.told_existentials() if not table.unsatisfiable(ax.a)]
    for x in leaf_variables(fq):
        preds, pos_c, neg_c, pos_r, neg_r = _incoming(fq, x)
        if len({p for p in preds if isinstance(p, Ind)}) > 1:
            continue
        for ax in told:
            s, n = ax.role, ax.b
            if not all(table.subsumed(n, a) for a in pos_c):
                continue
            if not all(table.role_subsumed(s, r) for r in pos_r):
                continue
            if any(table.subsumed(n, a) for a in neg_c):
                continue
            if any(table.role_subsumed(s, r) for r in neg_r):
                continue
            out.add(RewriteChoice(x, ax.a, s, n))
    return sorted(out)


def blocking_names(table: SubsumptionTable, role: str, concept: str, neg_c, neg_r) -> list[str]:
    """Names whose instances already have a successor refuting one of the negated atoms."""
    out = set()
    for ax in table.told_existentials():
        if table.unsatisfiable(ax.a):
            continue
        if not (table.role_subsumed(ax.role, role) and table.subsumed(ax.b, concept)):
            continue
        if any(table.subsumed(ax.b, a) for a in neg_c) or any(table.role_subsumed(ax.role, r) for r in neg_r):
            out.add(ax.a)
    return sorted(out)


def _fresh_var(used: set[Var]) -> Var:
    for i in itertools.count():
        v = Var(f"y{i}")
        if v not in used:
            return v


def rewrite_step(fq: FilteredQuery, choice: RewriteChoice, table: SubsumptionTable) -> FilteredQuery:
    x = choice.leaf
    preds, _, neg_c, _, neg_r = _incoming(fq, x)
    consts = {p for p in preds if isinstance(p, Ind)}
    if consts:
        y_hat = next(iter(consts))
    else:
        # keep an answer variable's name when one is merged, so the head reads naturally
        heads = sorted((p for p in preds if p in fq.answer), key=str)
        y_hat = heads[0] if heads else _fresh_var(fq.variables())
    mapping = {p: y_hat for p in preds}
    atoms = {a.substitute(mapping) for a in fq.atoms if x not in a.args}
    atoms.add(Atom(choice.m, (y_hat,)))
    for m2 in blocking_names(table, choice.role, choice.concept, neg_c, neg_r):
        atoms.add(Atom(m2, (y_hat,), False))
    moved = frozenset(f for t, f in fq.filters if t == x)
    kept = {(mapping.get(t, t), f) for t, f in fq.filters if t != x}
    kept.add((y_hat, Filter(choice.role, choice.concept, frozenset(neg_c), frozenset(neg_r), moved)))
    answer = tuple(mapping.get(t, t) for t in fq.answer)
    return FilteredQuery(answer, frozenset(atoms), frozenset(kept))


def _encode(fq: FilteredQuery, names: dict):
    def term(t):
        return ("i", t.name) if isinstance(t, Ind) else ("v", names[t])

    return (
        tuple(term(t) for t in fq.answer),
        tuple(sorted((a.positive, a.pred, tuple(term(t) for t in a.args)) for a in fq.atoms)),
        tuple(sorted((term(t), f.key()) for t, f in fq.filters)),
    )


def canonical_key(fq: FilteredQuery):
    """Key identifying a filtered query up to renaming of variables."""
    names: dict = {}
    for t in fq.answer:
        if isinstance(t, Var) and t not in names:
            names[t] = len(names)
    rest = sorted(fq.variables() - set(names))
    if len(rest) <= 6:
        best = None
        for perm in itertools.permutations(rest):
            trial = dict(names)
            for v in perm:
                trial[v] = len(trial)
            enc = _encode(fq, trial)
            if best is None or enc < best:
                best = enc
        return best
    for v in rest:
        names[v] = len(names)
    return _encode(fq, names)


def depth_bound(query_vars: int, table: SubsumptionTable) -> int:
    concepts = {TOP, BOT}
    roles = set()
    for ax in table.axioms:
        for field in ("a", "a1", "a2", "b"):
            if hasattr(ax, field):
                concepts.add(getattr(ax, field))
        for field in ("role", "sub", "sup"):
            if hasattr(ax, field):
                roles.add(getattr(ax, field))
    return query_vars + len(concepts) ** 2 * len(roles)


def all_rewritings(q: NCQ | FilteredQuery, table: SubsumptionTable, bound: int | None = None, stats: dict | None = None):
    """Every filtered query reachable by rewriting steps, up to renaming, breadth first."""
    start = q if isinstance(q, FilteredQuery) else FilteredQuery.from_ncq(q)
    if bound is None:
        bound = depth_bound(len(start.variables()), table)
    seen = {canonical_key(start): start}
    order = [start]
    frontier = deque([start])
    pruned = 0
    while frontier:
        cur = frontier.popleft()
        for choice in applicable_choices(cur, table):
            nxt = rewrite_step(cur, choice, table)
            if nxt.nested_filter_depth() > bound:
                pruned += 1
                continue
            key = canonical_key(nxt)
            if key in seen:
                continue
            seen[key] = nxt
            order.append(nxt)
            frontier.append(nxt)
            if len(order) > MAX_REWRITINGS:
                raise MwqError(f"more than {MAX_REWRITINGS} rewritings; query too large for this engine")
    if stats is not None:
        stats["pruned"] = pruned
        stats["bound"] = bound
    return order


def rewriting_to_json(fq: FilteredQuery) -> dict:
    def term(t):
        return {"individual": t.name} if isinstance(t, Ind) else {"var": t.name}

    return {
        "answer": [term(t) for t in fq.answer],
        "atoms": [
            {"pred": a.pred, "args": [term(t) for t in a.args], "negated": not a.positive}
            for a in sorted(fq.atoms, key=Atom.sort_key)
        ],
        "filters": [
            {"subject": term(t), **f.to_json()}
            for t, f in sorted(fq.filters, key=lambda tf: (str(tf[0]), tf[1].key()))
        ],
    }
