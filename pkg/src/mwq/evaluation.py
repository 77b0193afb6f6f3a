"""Evaluation of filtered queries and NCQs over finite interpretations."""

from __future__ import annotations

import itertools

from .classifier import classify_kb
from .errors import ValidationError
from .model import FiniteInterpretation, build_named_part
from .normalizer import normalize
from .queries import NCQ, Atom, Filter, FilteredQuery, Ind, Var
from .rewriter import all_rewritings


def filter_holds(f: Filter, d, interp: FiniteInterpretation) -> bool:
    """If some successor matches the premise, some successor also matches the conclusion."""
    premise = [e for e in interp.successors(f.role, d) if interp.has(f.concept, e)]
    if not premise:
        return True
    for e in premise:
        if any(interp.has(a, e) for a in f.neg_concepts):
            continue
        if any(interp.has_edge(r, d, e) for r in f.neg_roles):
            continue
        if all(filter_holds(g, e, interp) for g in f.nested):
            return True
    return False


def _atom_holds(a: Atom, values, interp: FiniteInterpretation) -> bool:
    if a.is_role:
        held = interp.has_edge(a.pred, values[0], values[1])
    else:
        held = interp.has(a.pred, values[0])
    return held if a.positive else not held


def eval_filtered(fq: FilteredQuery, interp: FiniteInterpretation) -> set[tuple[str, ...]]:
    """Answer tuples (named individuals only) of a filtered query."""
    atoms = list(fq.atoms)
    variables = sorted(fq.variables())
    answer_vars = {t for t in fq.answer if isinstance(t, Var)}
    named = sorted(interp.individuals & set(interp.labels))
    domain = sorted(interp.labels)

    def value(t, assign):
        return t.name if isinstance(t, Ind) else assign.get(t)

    # ground atoms and filters on constants do not depend on the assignment
    for a in atoms:
        if not a.variables() and not _atom_holds(a, [value(t, {}) for t in a.args], interp):
            return set()
    for t, f in fq.filters:
        if isinstance(t, Ind) and not filter_holds(f, t.name, interp):
            return set()

    filters_on = {}
    for t, f in fq.filters:
        if isinstance(t, Var):
            filters_on.setdefault(t, []).append(f)

    # connectivity-driven variable order: most constrained first
    order: list[Var] = []
    remaining = set(variables)
    while remaining:
        bound_terms = set(order)

        def score(v):
            connected = sum(
                1 for a in atoms if a.positive and v in a.args and any(u in bound_terms or isinstance(u, Ind) for u in a.args if u != v)
            )
            concept = sum(1 for a in atoms if a.positive and not a.is_role and a.args[0] == v)
            return (-connected, -concept, v not in answer_vars, v.name)

        nxt = min(remaining, key=score)
        order.append(nxt)
        remaining.discard(nxt)

    checks: dict = {v: [] for v in order}
    position = {v: i for i, v in enumerate(order)}
    for a in atoms:
        vs = a.variables()
        if vs:
            checks[max(vs, key=position.get)].append(a)

    results: set = set()
    assign: dict = {}

    def candidates(v):
        pools = []
        for a in atoms:
            if not a.positive or v not in a.args:
                continue
            if a.is_role:
                x, y = a.args
                if y == v and x != v:
                    src = value(x, assign)
                    if src is not None:
                        pools.append(interp.successors(a.pred, src))
                elif x == v and y != v:
                    dst = value(y, assign)
                    if dst is not None:
                        pools.append(interp.predecessors(a.pred, dst))
            elif a.pred != "top":
                pools.append(interp.extension(a.pred))
        base = named if v in answer_vars else domain
        if not pools:
            return base
        pools.sort(key=len)
        cand = set(pools[0])
        for p in pools[1:]:
            cand &= p
        if v in answer_vars:
            cand &= interp.individuals
        return sorted(cand)

    def search(i: int) -> None:
        if i == len(order):
            results.add(tuple(value(t, assign) for t in fq.answer))
            return
        v = order[i]
        for d in candidates(v):
            assign[v] = d
            if all(_atom_holds(a, [value(t, assign) for t in a.args], interp) for a in checks[v]) and all(
                filter_holds(f, d, interp) for f in filters_on.get(v, ())
            ):
                search(i + 1)
            del assign[v]

    search(0)
    return results


def eval_ncq_direct(q: NCQ, interp: FiniteInterpretation) -> set[tuple[str, ...]]:
    """Plain first-order evaluation by enumerating assignments variable by variable."""
    answer_vars = [t for t in dict.fromkeys(q.answer) if isinstance(t, Var)]
    rest = sorted(q.variables() - set(answer_vars))
    atoms = list(q.atoms)
    # connected variables next, so atoms can be checked as early as possible
    variables = list(answer_vars)
    while rest:
        linked = [v for v in rest if any(v in a.variables() and a.variables() & set(variables) for a in atoms)]
        v = (linked or rest)[0]
        variables.append(v)
        rest.remove(v)
    domain = sorted(interp.labels)
    named = sorted(interp.individuals)
    n_answer = len(answer_vars)
    out = set()

    def holds(a: Atom, assign) -> bool:
        vals = [t.name if isinstance(t, Ind) else assign[t] for t in a.args]
        if a.is_role:
            r = (vals[0], vals[1]) in interp.role_pairs(a.pred)
        else:
            r = vals[0] in interp.extension(a.pred)
        return r == a.positive

    def rec(i, assign):
        if i == 0:
            ready = [a for a in atoms if not a.variables()]
        else:
            newest = variables[i - 1]
            ready = [a for a in atoms if newest in a.variables() and a.variables() <= assign.keys()]
        if not all(holds(a, assign) for a in ready):
            return
        if i == len(variables):
            tup = tuple(t.name if isinstance(t, Ind) else assign[t] for t in q.answer)
            if all(x in interp.individuals for x in tup):
                out.add(tup)
            return
        for d in named if i < n_answer else domain:
            assign[variables[i]] = d
            rec(i + 1, assign)
            del assign[variables[i]]

    rec(0, {})
    return out


def extend_answers(head: tuple, leaf_answer: tuple, tuples, individuals) -> set:
    """Lift tuples over ``leaf_answer`` to tuples over ``head``; missing variables range over individuals."""
    missing = [v for v in head if v not in leaf_answer]
    out = set()
    for tup in tuples:
        fixed = dict(zip(leaf_answer, tup))
        for extra in itertools.product(sorted(individuals), repeat=len(missing)):
            vals = dict(fixed)
            vals.update(zip(missing, extra))
            out.add(tuple(vals[v] for v in head))
    return out


def mwa_atemporal(q: NCQ, kb, table=None, named=None) -> set[tuple[str, ...]]:
    """Minimal-world answers: union of all rewritings evaluated over the named part."""
    if kb.temporal:
        raise ValidationError("the atemporal engine needs an atemporal knowledge base")
    nkb = normalize(kb)
    table = table or classify_kb(nkb)
    named = named or build_named_part(nkb, table)
    out = set()
    for fq in all_rewritings(q, table):
        out |= eval_filtered(fq, named)
    return out
