"""Subsumption reasoning for normalized TBoxes by completion rules."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .errors import InvariantViolation
from .kb import (
    BOT,
    TOP,
    ConjCI,
    DiamCI,
    ExistsLHS,
    ExistsRHS,
    RoleCI,
    axiom_concept_names,
    axiom_role_names,
)


def atemporal_projection(axioms) -> tuple:
    """Replace every diamond inclusion by the plain inclusion of its operand."""
    out = []
    seen = set()
    for ax in axioms:
        if isinstance(ax, DiamCI):
            ax = ConjCI(ax.a, TOP, ax.b)
        if ax not in seen:
            seen.add(ax)
            out.append(ax)
    return tuple(out)


@dataclass(frozen=True)
class SubsumptionTable:
    """Subsumers of every concept name and super-roles of every role name."""

    axioms: tuple
    concepts: frozenset
    roles: frozenset
    subsumers: dict
    super_roles: dict

    def subsumed(self, a: str, b: str) -> bool:
        """Whether the TBox entails a SUB b."""
        if a == b or b == TOP:
            return True
        subs = self.subsumers.get(a)
        if subs is None:
            return b in self.subsumers[TOP]
        return b in subs or BOT in subs

    def role_subsumed(self, r: str, s: str) -> bool:
        if r == s:
            return True
        return s in self.super_roles.get(r, ())

    def concept_supers(self, a: str) -> frozenset:
        subs = self.subsumers.get(a)
        if subs is None:
            return frozenset({a}) | self.subsumers[TOP]
        if BOT in subs:
            return self.concepts | {a}
        return subs

    def roles_above(self, r: str) -> frozenset:
        return self.super_roles.get(r, frozenset({r}))

    def unsatisfiable(self, a: str) -> bool:
        return self.subsumed(a, BOT) if a != BOT else True

    def equivalent_concepts(self, a: str) -> list[str]:
        return sorted(b for b in self.concepts | {a} if self.subsumed(a, b) and self.subsumed(b, a))

    def equivalent_roles(self, r: str) -> list[str]:
        return sorted(s for s in self.roles | {r} if self.role_subsumed(r, s) and self.role_subsumed(s, r))

    def structurally_subsumed(self, r: str, a: str, t: str, b: str) -> bool:
        """Structural subsumption of some r.a by some t.b."""
        return self.role_subsumed(r, t) and self.subsumed(a, b)

    def told_existentials(self) -> list[ExistsRHS]:
        return [ax for ax in self.axioms if isinstance(ax, ExistsRHS)]

    def check_preorder(self) -> None:
        for a in self.concepts:
            if not self.subsumed(a, a):
                raise InvariantViolation(f"subsumption is not reflexive at {a}")
            for b in self.concept_supers(a):
                for c in self.concept_supers(b):
                    if not self.subsumed(a, c):
                        raise InvariantViolation(f"subsumption is not transitive: {a} {b} {c}")
        for r, sups in self.super_roles.items():
            for s in sups:
                if not sups >= self.roles_above(s):
                    raise InvariantViolation(f"role hierarchy is not transitive at {r}")


def role_closure(axioms, roles) -> dict:
    up = defaultdict(set)
    for r in roles:
        up[r].add(r)
    for ax in axioms:
        if isinstance(ax, RoleCI):
            up[ax.sub].add(ax.sup)
            up[ax.sup].add(ax.sup)
    changed = True
    while changed:
        changed = False
        for r in list(up):
            new = set(up[r])
            for s in up[r]:
                new |= up[s]
            if new != up[r]:
                up[r] = new
                changed = True
    return {r: frozenset(s) for r, s in up.items()}


def classify(axioms, extra_concepts=(), extra_roles=()) -> SubsumptionTable:
    """Classify an atemporal normalized TBox (diamond inclusions are projected first)."""
    axioms = atemporal_projection(axioms)
    concepts = {TOP, BOT} | set(extra_concepts)
    roles = set(extra_roles)
    for ax in axioms:
        concepts |= axiom_concept_names(ax)
        roles |= axiom_role_names(ax)
    up = role_closure(axioms, roles)

    conj = defaultdict(list)  # premise name -> [(other premise, conclusion)]
    exists_rhs = defaultdict(list)  # lhs -> [(role, filler)]
    exists_lhs = defaultdict(list)  # (role, filler) -> [conclusion]
    for ax in axioms:
        if isinstance(ax, ConjCI):
            conj[ax.a1].append((ax.a2, ax.b))
            if ax.a2 != ax.a1:
                conj[ax.a2].append((ax.a1, ax.b))
        elif isinstance(ax, ExistsRHS):
            exists_rhs[ax.a].append((ax.role, ax.b))
        elif isinstance(ax, ExistsLHS):
            exists_lhs[(ax.role, ax.a)].append(ax.b)

    subs = {a: {a, TOP} for a in concepts}
    # edges[x] = set of (role, y); back[y] = set of (x, role)
    edges = defaultdict(set)
    back = defaultdict(set)
    queue = [(a, a) for a in concepts] + [(a, TOP) for a in concepts]

    def add(x: str, b: str) -> None:
        if b not in subs[x]:
            subs[x].add(b)
            queue.append((x, b))

    def fire_link(x: str, r: str, y: str) -> None:
        for s in up.get(r, (r,)):
            for b in list(subs[y]):
                for c in exists_lhs.get((s, b), ()):
                    add(x, c)
        if BOT in subs[y]:
            add(x, BOT)

    while queue:
        x, a = queue.pop()
        for other, b in conj.get(a, ()):
            if other in subs[x]:
                add(x, b)
        for r, y in exists_rhs.get(a, ()):
            if (r, y) not in edges[x]:
                edges[x].add((r, y))
                back[y].add((x, r))
                fire_link(x, r, y)
        # a newly derived subsumer of x may trigger existential left-hand sides for predecessors
        for pred, r in list(back.get(x, ())):
            for s in up.get(r, (r,)):
                for c in exists_lhs.get((s, a), ()):
                    add(pred, c)
            if a == BOT:
                add(pred, BOT)

    all_concepts = frozenset(concepts)
    table = {}
    for a, s in subs.items():
        table[a] = all_concepts if BOT in s else frozenset(s)
    return SubsumptionTable(axioms, all_concepts, frozenset(roles), table, up)


def classify_kb(kb) -> SubsumptionTable:
    """Classify the projection of a normalized KB, registering its whole signature."""
    return classify(kb.axioms, kb.concept_signature(), kb.role_signature())


def cyclic(table: SubsumptionTable) -> bool:
    """Whether existential restrictions can generate unboundedly deep anonymous chains."""
    graph = defaultdict(set)
    told = table.told_existentials()
    for a in table.concepts:
        if table.unsatisfiable(a):
            continue
        supers = table.concept_supers(a)
        for ax in told:
            if ax.a in supers and not table.unsatisfiable(ax.b):
                graph[a].add(ax.b)
    state: dict = {}

    def visit(n) -> bool:
        state[n] = 1
        for m in graph[n]:
            if state.get(m) == 1 or (m not in state and visit(m)):
                return True
        state[n] = 2
        return False

    return any(visit(n) for n in list(graph) if n not in state)
