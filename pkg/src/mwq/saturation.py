"""Temporal ABox saturation, representative time points and per-representative snapshots."""

from __future__ import annotations

import bisect
from collections import defaultdict
from dataclasses import dataclass

from .classifier import SubsumptionTable
from .errors import InconsistentKBError, InvariantViolation, ValidationError
from .intervals import NEG_INF, POS_INF, IntervalSet, apply_diamond
from .kb import BOT, FRESH_PREFIX, TOP, ConceptAssertion, ConjCI, DiamCI, ExistsLHS, RoleAssertion
from .model import FiniteInterpretation


@dataclass
class TemporalExtensionMap:
    """Entailed time points per (individual, concept) and per (role, subject, object)."""

    concepts: dict  # individual -> concept -> IntervalSet
    roles: dict  # role -> (subject, object) -> IntervalSet
    individuals: tuple
    tem: tuple

    def of(self, individual: str, concept: str) -> IntervalSet:
        if concept == TOP:
            return IntervalSet.everything()
        return self.concepts.get(individual, {}).get(concept, IntervalSet.empty())

    def role_at(self, role: str, pair) -> IntervalSet:
        return self.roles.get(role, {}).get(pair, IntervalSet.empty())

    def to_json(self) -> dict:
        """Extensions of input concept names; top and normalization names are left out."""
        return {
            "individuals": {
                a: {
                    c: ivs.to_json()
                    for c, ivs in sorted(self.concepts[a].items())
                    if ivs and c != TOP and not c.startswith(FRESH_PREFIX)
                }
                for a in sorted(self.concepts)
            },
            "roles": {
                r: [[s, o, ivs.to_json()] for (s, o), ivs in sorted(pairs.items())]
                for r, pairs in sorted(self.roles.items())
            },
        }


def saturate(kb, table: SubsumptionTable) -> TemporalExtensionMap:
    """Least fixpoint of the normalized temporal TBox over the timed ABox.

    ``table`` classifies the atemporal projection; it supplies the subsumption
    closure that accounts for consequences of anonymous successors.
    """
    tem = tuple(kb.tem)
    allowed = set(tem) | {NEG_INF, POS_INF}
    inds = tuple(kb.individuals)
    conc: dict = {a: defaultdict(IntervalSet.empty) for a in inds}
    for a in inds:
        conc[a][TOP] = IntervalSet.everything()
    raw_roles: dict = defaultdict(lambda: defaultdict(set))
    for asr in kb.abox:
        if isinstance(asr, ConceptAssertion):
            conc[asr.individual][asr.concept] = conc[asr.individual][asr.concept].union(IntervalSet.point(asr.time))
        elif isinstance(asr, RoleAssertion):
            for s in table.roles_above(asr.role):
                raw_roles[s][(asr.subject, asr.object)].add(asr.time)
    roles = {r: {p: IntervalSet.points(ts) for p, ts in pairs.items()} for r, pairs in raw_roles.items()}

    conj = [ax for ax in kb.axioms if isinstance(ax, ConjCI) and ax.a2 != TOP]
    diam = [ax for ax in kb.axioms if isinstance(ax, DiamCI)]
    exlhs = [ax for ax in kb.axioms if isinstance(ax, ExistsLHS)]

    def grow(a: str, concept: str, extra: IntervalSet) -> bool:
        if not extra:
            return False
        old = conc[a][concept]
        new = old.union(extra)
        if new == old:
            return False
        if not new.endpoints() <= allowed:
            raise InvariantViolation(f"endpoint outside tem for {concept}({a}): {new}")
        conc[a][concept] = new
        return True

    changed = True
    while changed:
        changed = False
        for a in inds:
            ext = conc[a]
            for concept in list(ext):
                ivs = ext[concept]
                if not ivs:
                    continue
                for sup in table.concept_supers(concept):
                    if sup != concept:
                        changed |= grow(a, sup, ivs)
            for ax in conj:
                changed |= grow(a, ax.b, ext[ax.a1].intersect(ext[ax.a2]))
            for ax in diam:
                changed |= grow(a, ax.b, apply_diamond(ax.op, ext[ax.a]))
        for ax in exlhs:
            for (s, o), times in roles.get(ax.role, {}).items():
                changed |= grow(s, ax.b, times.intersect(conc[o][ax.a]))

    for a in inds:
        bad = conc[a].get(BOT)
        if bad:
            t = bad.sample_points()[0]
            raise InconsistentKBError(_witness(kb, a, t, table))
    frozen = {a: {c: ivs for c, ivs in ext.items() if ivs} for a, ext in conc.items()}
    return TemporalExtensionMap(frozen, roles, inds, tem)


def _witness(kb, individual: str, t: int, table) -> str:
    mine = [x for x in kb.abox if isinstance(x, ConceptAssertion) and x.individual == individual]
    for x in mine:
        if table.unsatisfiable(x.concept):
            return str(x)
    if mine:
        return f"{mine[0]} (bot entailed at {individual} @ {t})"
    return f"bot({individual}) @ {t}"


def representatives(tem) -> list[int]:
    """The time points of the ABox plus both finite endpoints of every maximal gap."""
    if not tem:
        raise ValidationError("no temporal data: the ABox has no time stamps")
    points = set(tem)
    for t in tem:
        points.add(t - 1)
        points.add(t + 1)
    return sorted(points)


@dataclass
class TemporalStructure:
    reps: list
    snapshots: dict  # representative -> FiniteInterpretation
    extensions: TemporalExtensionMap

    @property
    def tem(self) -> tuple:
        return self.extensions.tem

    def nearest_rep(self, t: int) -> int:
        i = bisect.bisect_left(self.reps, t)
        best = None
        for j in (i - 1, i):
            if 0 <= j < len(self.reps):
                r = self.reps[j]
                if best is None or abs(r - t) < abs(best - t):
                    best = r
        return best


def snapshot(ext: TemporalExtensionMap, t: int) -> FiniteInterpretation:
    labels = {a: {c for c, ivs in ext.concepts[a].items() if t in ivs} | {TOP} for a in ext.individuals}
    edges = defaultdict(set)
    for r, pairs in ext.roles.items():
        for p, ivs in pairs.items():
            if t in ivs:
                edges[r].add(p)
    return FiniteInterpretation(labels, edges, ext.individuals)


def build_temporal_structure(kb, table: SubsumptionTable) -> TemporalStructure:
    ext = saturate(kb, table)
    reps = representatives(ext.tem)
    return TemporalStructure(reps, {t: snapshot(ext, t) for t in reps}, ext)
