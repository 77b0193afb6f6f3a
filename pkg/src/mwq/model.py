"""Finite interpretations: the named part of the minimal canonical model and its expansion."""

from __future__ import annotations

from collections import defaultdict, deque

from .classifier import SubsumptionTable
from .errors import InconsistentKBError
from .kb import BOT, TOP, ConceptAssertion, ConjCI, ExistsLHS, RoleAssertion

ANON_PREFIX = "_:"


class FiniteInterpretation:
    """Labelled graph: concept names per element, role edges, depth and parent of anonymous elements."""

    def __init__(self, labels: dict, edges: dict, individuals, depth=None, parent=None):
        self.labels = {d: frozenset(ls) for d, ls in labels.items()}
        self.edges = {r: frozenset(ps) for r, ps in edges.items() if ps}
        self.individuals = frozenset(individuals)
        self.depth = dict(depth) if depth else {d: 0 for d in self.labels}
        self.parent = dict(parent) if parent else {}
        self._ext: dict = defaultdict(set)
        for d, ls in self.labels.items():
            for a in ls:
                self._ext[a].add(d)
        self._succ: dict = defaultdict(lambda: defaultdict(set))
        self._pred: dict = defaultdict(lambda: defaultdict(set))
        for r, pairs in self.edges.items():
            for d, e in pairs:
                self._succ[r][d].add(e)
                self._pred[r][e].add(d)

    @property
    def domain(self) -> list:
        return sorted(self.labels)

    def extension(self, concept: str) -> set:
        if concept == TOP:
            return set(self.labels)
        return self._ext.get(concept, set())

    def has(self, concept: str, d) -> bool:
        if concept == TOP:
            return d in self.labels
        return concept in self.labels.get(d, ())

    def has_edge(self, role: str, d, e) -> bool:
        return e in self._succ[role].get(d, ())

    def successors(self, role: str, d) -> set:
        return self._succ[role].get(d, set())

    def predecessors(self, role: str, e) -> set:
        return self._pred[role].get(e, set())

    def role_pairs(self, role: str) -> frozenset:
        return self.edges.get(role, frozenset())

    def out_edges(self, d) -> list:
        return [(r, e) for r in self.edges for e in self._succ[r].get(d, ())]

    def children(self, d) -> list:
        return sorted(e for e, p in self.parent.items() if p == d)

    def signature(self) -> tuple:
        """Hashable content, used to share work between identical snapshots."""
        return (
            tuple(sorted((d, tuple(sorted(ls))) for d, ls in self.labels.items())),
            tuple(sorted((r, tuple(sorted(ps))) for r, ps in self.edges.items())),
        )

    def to_json(self) -> dict:
        return {
            "elements": {
                d: {"labels": sorted(self.labels[d]), "depth": self.depth.get(d, 0)} for d in self.domain
            },
            "edges": {r: sorted([list(p) for p in ps]) for r, ps in sorted(self.edges.items())},
        }


def close_labels(
    labels: dict,
    edges: dict,
    table: SubsumptionTable,
    witness_of=None,
) -> None:
    """Saturate concept labels over fixed role edges (in place).

    Uses the subsumption table, binary conjunctions and existential left-hand sides.
    Raises InconsistentKBError when some element acquires bot.
    """
    conj = [ax for ax in table.axioms if isinstance(ax, ConjCI) and ax.a2 != TOP]
    lhs = defaultdict(list)
    for ax in table.axioms:
        if isinstance(ax, ExistsLHS):
            lhs[ax.a].append(ax)
    changed = True
    while changed:
        changed = False
        for d, ls in labels.items():
            closed = set(ls)
            closed.add(TOP)
            for a in list(closed):
                closed |= table.concept_supers(a)
            for ax in conj:
                if ax.a1 in closed and ax.a2 in closed and ax.b not in closed:
                    closed |= table.concept_supers(ax.b)
            if closed != ls:
                labels[d] = closed
                changed = True
        for r, pairs in edges.items():
            for s in table.roles_above(r):
                for d, e in pairs:
                    for a in labels[e]:
                        for ax in lhs.get(a, ()):
                            if ax.role == s and ax.b not in labels[d]:
                                labels[d] = set(labels[d]) | table.concept_supers(ax.b)
                                changed = True
    for d in sorted(labels):
        if BOT in labels[d]:
            raise InconsistentKBError(witness_of(d) if witness_of else f"bot({d})")


def close_roles(edges: dict, table: SubsumptionTable) -> dict:
    out = defaultdict(set)
    for r, pairs in edges.items():
        for s in table.roles_above(r):
            out[s] |= set(pairs)
    return out


def _witness(abox, table):
    def find(d) -> str:
        mine = [a for a in abox if isinstance(a, ConceptAssertion) and a.individual == d]
        for a in mine:
            if table.unsatisfiable(a.concept):
                return str(a)
        return str(mine[0]) if mine else f"bot({d})"

    return find


def build_named_part(kb, table: SubsumptionTable) -> FiniteInterpretation:
    """Entailed concept and role assertions over the individuals of a normalized atemporal KB."""
    labels = {a: {TOP} for a in kb.individuals}
    edges = defaultdict(set)
    for a in kb.abox:
        if isinstance(a, ConceptAssertion):
            labels[a.individual].add(a.concept)
        elif isinstance(a, RoleAssertion):
            edges[a.role].add((a.subject, a.object))
    edges = close_roles(edges, table)
    close_labels(labels, edges, table, _witness(kb.abox, table))
    return FiniteInterpretation(labels, edges, kb.individuals)


def minimal_restrictions(table: SubsumptionTable, label: frozenset, satisfied) -> list[tuple[str, str]]:
    """Representatives of the structurally minimal unsatisfied existential restrictions.

    ``satisfied(role, concept)`` reports whether the element already has such a successor.
    """
    cands = set()
    for ax in table.told_existentials():
        if ax.a in label and not satisfied(ax.role, ax.b):
            cands.add((ax.role, ax.b))
    below = table.structurally_subsumed
    minimal = [
        c
        for c in cands
        if not any(below(o[0], o[1], c[0], c[1]) and not below(c[0], c[1], o[0], o[1]) for o in cands)
    ]
    reps = set()
    for r, b in minimal:
        reps.add((table.equivalent_roles(r)[0], table.equivalent_concepts(b)[0]))
    return sorted(reps)


def expand_canonical(named: FiniteInterpretation, table: SubsumptionTable, depth_limit: int | None) -> FiniteInterpretation:
    """Breadth-first anonymous expansion up to ``depth_limit`` (None: until exhausted).

    Call with ``depth_limit=None`` only for acyclic TBoxes.
    """
    labels = {d: set(ls) for d, ls in named.labels.items()}
    edges = defaultdict(set, {r: set(ps) for r, ps in named.edges.items()})
    succ = defaultdict(set)
    for r, ps in edges.items():
        for d, e in ps:
            succ[d].add((r, e))
    depth = dict(named.depth)
    parent = dict(named.parent)
    queue = deque(sorted(d for d in labels if depth.get(d, 0) == 0))
    while queue:
        d = queue.popleft()
        if depth_limit is not None and depth[d] >= depth_limit:
            continue
        label = frozenset(labels[d])

        def satisfied(role, concept, d=d):
            return any(r == role and (concept == TOP or concept in labels[e]) for r, e in succ[d])

        for role, concept in minimal_restrictions(table, label, satisfied):
            child = f"{d}/{role}.{concept}" if d.startswith(ANON_PREFIX) else f"{ANON_PREFIX}{d}/{role}.{concept}"
            labels[child] = set(table.concept_supers(concept)) | {TOP}
            depth[child] = depth[d] + 1
            parent[child] = d
            for s in table.roles_above(role):
                edges[s].add((d, child))
                succ[d].add((s, child))
            queue.append(child)
    return FiniteInterpretation(labels, edges, named.individuals, depth, parent)
