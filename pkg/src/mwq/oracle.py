"""Brute-force reference semantics used to cross-check the query pipeline.

Nothing here uses the rewriter or the segment-timeline evaluator.  Answers come
from direct first-order evaluation over explicitly expanded canonical models,
one per time point for temporal knowledge bases.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict

from .classifier import SubsumptionTable, classify_kb, cyclic, role_closure
from .errors import OracleRefusal, ValidationError
from .evaluation import eval_ncq_direct, extend_answers
from .kb import BOT, TOP, ConceptAssertion, ConjCI, DiamCI, ExistsLHS, ExistsRHS, RoleAssertion, RoleCI
from .model import FiniteInterpretation, build_named_part, close_labels, expand_canonical
from .normalizer import normalize
from .queries import (
    NCQ,
    AndF,
    Box,
    Dia,
    FalseF,
    Formula,
    Leaf,
    Next,
    Not,
    OrF,
    Prev,
    Query,
    Since,
    TrueF,
    Until,
    compute_n,
    leaves,
)

MAX_ENDOMORPHISM_DOMAIN = 64


def _expansion_depth(q: NCQ, table: SubsumptionTable, depth: int | None):
    """Depth at which the canonical model is cut, or None for the full (finite) expansion."""
    if not q.is_rooted():
        raise OracleRefusal(f"the oracle only answers rooted queries: {q}")
    needed = len(q.variables()) + 1
    if not cyclic(table):
        return None
    if depth is None:
        return needed
    if depth < needed:
        raise OracleRefusal(f"cyclic TBox: depth {depth} is below the locality bound {needed}")
    return depth


def oracle_atemporal(q: NCQ, kb, depth: int | None = None) -> set:
    """Answers of ``q`` over the (possibly truncated) minimal canonical model."""
    if kb.temporal:
        raise ValidationError("the atemporal oracle needs an atemporal knowledge base")
    nkb = normalize(kb)
    table = classify_kb(nkb)
    limit = _expansion_depth(q, table, depth)
    named = build_named_part(nkb, table)
    return eval_ncq_direct(q, expand_canonical(named, table, limit))


# ---------------------------------------------------------------- classification by models


def model_subsumers(axioms) -> dict:
    """Subsumers of each concept name read off one chased model with an element per name.

    The chase is naive: rules are re-applied to the whole structure until nothing
    changes, and the final structure is checked to satisfy every axiom.
    """
    projected = [ConjCI(a.a, TOP, a.b) if isinstance(a, DiamCI) else a for a in axioms]
    names = {TOP, BOT}
    roles = set()
    for ax in projected:
        for f in ("a", "a1", "a2", "b"):
            if hasattr(ax, f):
                names.add(getattr(ax, f))
        for f in ("role", "sub", "sup"):
            if hasattr(ax, f):
                roles.add(getattr(ax, f))
    ups = role_closure(projected, roles)
    label = {n: {n, TOP} for n in names}
    edges = set()
    changed = True
    while changed:
        changed = False
        for ax in projected:
            for d in names:
                ls = label[d]
                if isinstance(ax, ConjCI) and ax.a1 in ls and ax.a2 in ls and ax.b not in ls:
                    ls.add(ax.b)
                    changed = True
                elif isinstance(ax, ExistsRHS) and ax.a in ls:
                    for s in ups.get(ax.role, {ax.role}):
                        if (d, s, ax.b) not in edges:
                            edges.add((d, s, ax.b))
                            changed = True
        for d, s, e in list(edges):
            for ax in projected:
                if isinstance(ax, ExistsLHS) and ax.role == s and ax.a in label[e] and ax.b not in label[d]:
                    label[d].add(ax.b)
                    changed = True
            if BOT in label[e] and BOT not in label[d]:
                label[d].add(BOT)
                changed = True
    _check_model(projected, label, edges, ups)
    return {d: (set(names) if BOT in ls else ls) for d, ls in label.items()}


def _check_model(axioms, label, edges, ups) -> None:
    for d, ls in label.items():
        if BOT in ls:
            continue
        for ax in axioms:
            if isinstance(ax, ConjCI) and ax.a1 in ls and ax.a2 in ls:
                assert ax.b in ls, (d, ax)
            if isinstance(ax, ExistsRHS) and ax.a in ls:
                assert (d, ax.role, ax.b) in edges, (d, ax)
            if isinstance(ax, ExistsLHS):
                for x, s, e in edges:
                    if x == d and s == ax.role and ax.a in label[e]:
                        assert ax.b in ls, (d, ax)
            if isinstance(ax, RoleCI):
                for x, s, e in edges:
                    if x == d and s == ax.sub:
                        assert (d, ax.sup, e) in edges, (d, ax)


def oracle_subsumes(axioms, a: str, b: str) -> bool:
    if a == BOT:
        return True
    subs = model_subsumers(axioms)
    if a in subs and BOT in subs[a]:
        return True  # unsatisfiable, so below every name, including names outside the TBox
    if a not in subs:
        return a == b or b == TOP or b in subs[TOP]
    return b in subs[a]


# ---------------------------------------------------------------- temporal oracle


def window_saturation(kb, table: SubsumptionTable, lo: int, hi: int):
    """Entailed labels and edges at every time point of [lo, hi], pointwise.

    Values beyond the window equal those at the nearest edge, which is exact as
    long as the window strictly contains every time stamp of the ABox.
    """
    times = range(lo, hi + 1)
    inds = list(kb.individuals)
    labels = {t: {a: {TOP} for a in inds} for t in times}
    edges = {t: defaultdict(set) for t in times}
    for asr in kb.abox:
        if isinstance(asr, ConceptAssertion):
            labels[asr.time][asr.individual].add(asr.concept)
        elif isinstance(asr, RoleAssertion):
            for s in table.roles_above(asr.role):
                edges[asr.time][s].add((asr.subject, asr.object))
    diam = [ax for ax in kb.axioms if isinstance(ax, DiamCI)]
    while True:
        for t in times:
            close_labels(labels[t], edges[t], table, lambda d, t=t: f"bot({d}) @ {t}")
        grew = False
        for ax in diam:
            for a in inds:
                member = [t for t in times if ax.a in labels[t][a]]
                if not member:
                    continue
                for t in times:
                    if ax.b not in labels[t][a] and _diamond_at(ax.op, member, t):
                        labels[t][a].add(ax.b)
                        grew = True
        if not grew:
            return labels, edges


def _diamond_at(op, member: list, t: int) -> bool:
    """Membership of t in the diamond of a set given by its sorted members inside the window.

    Members beyond the window only exist when the nearest edge is a member, so
    the in-window members decide every case.
    """
    if op.kind == "anytime":
        return True
    if op.kind == "past":
        return member[0] <= t
    if op.kind == "future":
        return t <= member[-1]
    if op.kind == "convex":
        return member[0] <= t <= member[-1]
    before = [j for j in member if j <= t]
    after = [k for k in member if k >= t]
    return bool(before) and bool(after) and after[0] - before[-1] < op.n


def oracle_temporal(q: Query, kb, window: int, depth: int | None = None, padding: int | None = None) -> set:
    """Pairs (tuple, time) satisfying ``q`` for times in [min tem - window, max tem + window].

    Truth is computed on a larger evaluation range (``padding`` beyond the output
    window); outside it every subformula is taken to keep its edge value.
    """
    if not kb.temporal:
        raise ValidationError("the temporal oracle needs a temporal knowledge base")
    nkb = normalize(kb)
    table = classify_kb(nkb)
    tem = nkb.tem
    if not tem:
        raise ValidationError("no temporal data: the ABox has no time stamps")
    n = compute_n(q.formula)
    if padding is None:
        padding = n + 2
    out_lo, out_hi = tem[0] - window, tem[-1] + window
    lo, hi = out_lo - padding, out_hi + padding
    labels, edges = window_saturation(nkb, table, lo, hi)

    leaf_depths = {}
    for leaf in leaves(q.formula):
        leaf_depths[leaf.query] = _expansion_depth(leaf.query, table, depth)

    inds = sorted(nkb.individuals)
    head = [v for v in q.answer]
    tuples = list(itertools.product(inds, repeat=len(head)))
    snap_cache: dict = {}
    leaf_cache: dict = {}

    def leaf_answers(leaf: Leaf, t: int) -> set:
        snap = FiniteInterpretation(labels[t], edges[t], inds)
        sig = snap.signature()
        key = (leaf.query, sig)
        if key not in leaf_cache:
            lim = leaf_depths[leaf.query]
            if (sig, lim) not in snap_cache:
                snap_cache[(sig, lim)] = expand_canonical(snap, table, lim)
            found = eval_ncq_direct(leaf.query, snap_cache[(sig, lim)])
            leaf_cache[key] = extend_answers(tuple(head), leaf.query.answer, found, inds)
        return leaf_cache[key]

    times = list(range(lo, hi + 1))
    values: dict = {}

    def table_of(f: Formula) -> dict:
        key = id(f)
        if key in values:
            return values[key][1]
        res = {tup: [False] * len(times) for tup in tuples}
        if isinstance(f, TrueF):
            for tup in tuples:
                res[tup] = [True] * len(times)
        elif isinstance(f, FalseF):
            pass
        elif isinstance(f, Leaf):
            for k, t in enumerate(times):
                for tup in leaf_answers(f, t):
                    res[tup][k] = True
        elif isinstance(f, Not):
            sub = table_of(f.sub)
            res = {tup: [not v for v in sub[tup]] for tup in tuples}
        elif isinstance(f, (AndF, OrF)):
            left, right = table_of(f.left), table_of(f.right)
            op = (lambda x, y: x and y) if isinstance(f, AndF) else (lambda x, y: x or y)
            res = {tup: [op(x, y) for x, y in zip(left[tup], right[tup])] for tup in tuples}
        elif isinstance(f, (Until, Since)):
            left, right = table_of(f.left), table_of(f.right)
            step = 1 if isinstance(f, Until) else -1
            a, b = f.interval.lo, f.interval.hi
            for tup in tuples:
                lv, rv = left[tup], right[tup]
                for k in range(len(times)):
                    res[tup][k] = _until_at(lv, rv, k, step, a, b)
        elif isinstance(f, (Box, Dia)):
            sub = table_of(f.sub)
            a, b = f.interval.lo, f.interval.hi
            for tup in tuples:
                sv = sub[tup]
                for k in range(len(times)):
                    vals = [sv[p] for p in _window_positions(k, a, b, len(times))]
                    res[tup][k] = all(vals) if isinstance(f, Box) else any(vals)
        elif isinstance(f, (Next, Prev)):
            sub = table_of(f.sub)
            d = 1 if isinstance(f, Next) else -1
            for tup in tuples:
                sv = sub[tup]
                res[tup] = [sv[min(max(k + d, 0), len(times) - 1)] for k in range(len(times))]
        else:
            raise TypeError(f)
        values[key] = (f, res)
        return res

    final = table_of(q.formula)
    out = set()
    for tup in tuples:
        for k, t in enumerate(times):
            if out_lo <= t <= out_hi and final[tup][k]:
                out.add((tup, t))
    return out


def _window_positions(k: int, a, b, width: int) -> range:
    """Indices reached from k by offsets in [a, b], clamped to the window."""

    def clamp(off):
        if off == -math.inf:
            return 0
        if off == math.inf:
            return width - 1
        return min(max(k + int(off), 0), width - 1)

    return range(clamp(a), clamp(b) + 1)


def _until_at(lv, rv, k: int, step: int, a, b) -> bool:
    """Direct reading of the Until (step 1) or Since (step -1) clause at index k."""
    width = len(lv)
    left_so_far = True
    for dist in itertools.count(0):
        if b != math.inf and dist > b:
            return False
        p = k + step * dist
        q = min(max(p, 0), width - 1)
        if dist >= a and left_so_far and rv[q]:
            return True
        left_so_far = left_so_far and lv[q]
        if not left_so_far:
            return False
        if dist >= a and q != p:
            return False  # beyond the edge nothing changes any more


# ---------------------------------------------------------------- core check


def endomorphism_test(interp: FiniteInterpretation) -> bool:
    """True iff the identity is the only homomorphism of the structure into itself fixing named elements."""
    domain = interp.domain
    if len(domain) > MAX_ENDOMORPHISM_DOMAIN:
        raise OracleRefusal(f"structure with {len(domain)} elements exceeds the size guard")
    named = [d for d in domain if d in interp.individuals]
    anon = [d for d in domain if d not in interp.individuals]
    anon.sort(key=lambda d: (interp.depth.get(d, 0), d))
    out_edges = defaultdict(list)
    for r, pairs in interp.edges.items():
        for d, e in pairs:
            out_edges[d].append((r, e))
    in_edges = defaultdict(list)
    for r, pairs in interp.edges.items():
        for d, e in pairs:
            in_edges[e].append((r, d))

    h = {a: a for a in named}

    def consistent(d, c) -> bool:
        if not interp.labels[d] <= interp.labels[c]:
            return False
        for r, e in out_edges[d]:
            if e in h and not interp.has_edge(r, c, h[e]):
                return False
        for r, e in in_edges[d]:
            if e in h and not interp.has_edge(r, h[e], c):
                return False
        return True

    for a in named:
        if not consistent(a, a):
            return False  # pragma: no cover - identity always preserves structure

    def search(i: int) -> bool:
        """Whether some completion of h is a non-identity homomorphism."""
        if i == len(anon):
            return any(h[d] != d for d in anon)
        d = anon[i]
        for c in domain:
            if consistent(d, c):
                h[d] = c
                if search(i + 1):
                    return True
                del h[d]
        return False

    return not search(0)
