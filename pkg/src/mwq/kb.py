"""Concepts, axioms, assertions and knowledge bases."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .intervals import DiamondOp

TOP = "top"
BOT = "bot"
RESERVED_CONCEPTS = frozenset({TOP, BOT})
FRESH_PREFIX = "_N"


# ---------------------------------------------------------------- concepts


@dataclass(frozen=True)
class Name:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Top:
    def __str__(self) -> str:
        return TOP


@dataclass(frozen=True)
class Bot:
    def __str__(self) -> str:
        return BOT


@dataclass(frozen=True)
class And:
    left: "Concept"
    right: "Concept"

    def __str__(self) -> str:
        return f"{_wrap(self.left, And)} AND {_wrap(self.right)}"


@dataclass(frozen=True)
class Exists:
    role: str
    filler: "Concept"

    def __str__(self) -> str:
        return f"some {self.role} . {_wrap(self.filler)}"


@dataclass(frozen=True)
class Diam:
    op: DiamondOp
    filler: "Concept"

    def __str__(self) -> str:
        return f"{self.op.keyword()} {_wrap(self.filler)}"


Concept = Union[Name, Top, Bot, And, Exists, Diam]


def _wrap(c: Concept, allow: type | None = None) -> str:
    if isinstance(c, (Name, Top, Bot)) or (allow is not None and isinstance(c, allow)):
        return str(c)
    return f"({c})"


def concept_of(name: str) -> Concept:
    if name == TOP:
        return Top()
    if name == BOT:
        return Bot()
    return Name(name)


def has_diamond(c: Concept) -> bool:
    if isinstance(c, Diam):
        return True
    if isinstance(c, And):
        return has_diamond(c.left) or has_diamond(c.right)
    if isinstance(c, Exists):
        return has_diamond(c.filler)
    return False


def concept_names(c: Concept) -> set[str]:
    if isinstance(c, Name):
        return {c.name}
    if isinstance(c, And):
        return concept_names(c.left) | concept_names(c.right)
    if isinstance(c, (Exists, Diam)):
        return concept_names(c.filler)
    return set()


def role_names(c: Concept) -> set[str]:
    if isinstance(c, And):
        return role_names(c.left) | role_names(c.right)
    if isinstance(c, Exists):
        return {c.role} | role_names(c.filler)
    if isinstance(c, Diam):
        return role_names(c.filler)
    return set()


# ---------------------------------------------------------------- raw TBox


@dataclass(frozen=True)
class CI:
    """Concept inclusion ``lhs SUB rhs``."""

    lhs: Concept
    rhs: Concept

    def __str__(self) -> str:
        return f"{self.lhs} SUB {self.rhs}"


@dataclass(frozen=True)
class RI:
    """Role inclusion ``role sub SUB sup``."""

    sub: str
    sup: str

    def __str__(self) -> str:
        return f"role {self.sub} SUB {self.sup}"


RawAxiom = Union[CI, RI]


# ---------------------------------------------------------------- normal form


@dataclass(frozen=True, order=True)
class ConjCI:
    a1: str
    a2: str
    b: str

    def __str__(self) -> str:
        if self.a2 == TOP:
            return f"{self.a1} SUB {self.b}"
        return f"{self.a1} AND {self.a2} SUB {self.b}"


@dataclass(frozen=True)
class DiamCI:
    op: DiamondOp
    a: str
    b: str

    def __str__(self) -> str:
        return f"{self.op.keyword()} {self.a} SUB {self.b}"


@dataclass(frozen=True, order=True)
class ExistsRHS:
    a: str
    role: str
    b: str

    def __str__(self) -> str:
        return f"{self.a} SUB some {self.role} . {self.b}"


@dataclass(frozen=True, order=True)
class ExistsLHS:
    role: str
    a: str
    b: str

    def __str__(self) -> str:
        return f"some {self.role} . {self.a} SUB {self.b}"


@dataclass(frozen=True, order=True)
class RoleCI:
    sub: str
    sup: str

    def __str__(self) -> str:
        return f"role {self.sub} SUB {self.sup}"


NormalAxiom = Union[ConjCI, DiamCI, ExistsRHS, ExistsLHS, RoleCI]


def as_raw(ax: NormalAxiom) -> RawAxiom:
    """Express a normal-form axiom as a raw inclusion."""
    if isinstance(ax, ConjCI):
        lhs = concept_of(ax.a1) if ax.a2 == TOP else And(concept_of(ax.a1), concept_of(ax.a2))
        return CI(lhs, concept_of(ax.b))
    if isinstance(ax, DiamCI):
        return CI(Diam(ax.op, concept_of(ax.a)), concept_of(ax.b))
    if isinstance(ax, ExistsRHS):
        return CI(concept_of(ax.a), Exists(ax.role, concept_of(ax.b)))
    if isinstance(ax, ExistsLHS):
        return CI(Exists(ax.role, concept_of(ax.a)), concept_of(ax.b))
    return RI(ax.sub, ax.sup)


def axiom_concept_names(ax: NormalAxiom) -> set[str]:
    if isinstance(ax, ConjCI):
        return {ax.a1, ax.a2, ax.b}
    if isinstance(ax, (DiamCI, ExistsRHS, ExistsLHS)):
        return {ax.a, ax.b}
    return set()


def axiom_role_names(ax: NormalAxiom) -> set[str]:
    if isinstance(ax, (ExistsRHS, ExistsLHS)):
        return {ax.role}
    if isinstance(ax, RoleCI):
        return {ax.sub, ax.sup}
    return set()


# ---------------------------------------------------------------- ABox


@dataclass(frozen=True, order=True)
class ConceptAssertion:
    concept: str
    individual: str
    time: int | None = None

    def __str__(self) -> str:
        stamp = "" if self.time is None else f" @ {self.time}"
        return f"{self.concept}({self.individual}){stamp}"


@dataclass(frozen=True, order=True)
class RoleAssertion:
    role: str
    subject: str
    object: str
    time: int | None = None

    def __str__(self) -> str:
        stamp = "" if self.time is None else f" @ {self.time}"
        return f"{self.role}({self.subject},{self.object}){stamp}"


@dataclass(frozen=True)
class ComplexAssertion:
    """``C(a)`` for a complex concept C; removed by normalization."""

    concept: Concept
    individual: str
    time: int | None = None

    def __str__(self) -> str:
        stamp = "" if self.time is None else f" @ {self.time}"
        return f"({self.concept})({self.individual}){stamp}"


Assertion = Union[ConceptAssertion, RoleAssertion, ComplexAssertion]


# ---------------------------------------------------------------- knowledge base


@dataclass(frozen=True)
class KnowledgeBase:
    tbox: tuple[RawAxiom, ...] = ()
    abox: tuple[Assertion, ...] = ()
    temporal: bool = False
    axioms: tuple[NormalAxiom, ...] | None = None
    definitions: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def normalized(self) -> bool:
        return self.axioms is not None

    @property
    def tem(self) -> list[int]:
        return sorted({a.time for a in self.abox if a.time is not None})

    @property
    def individuals(self) -> list[str]:
        out = set()
        for a in self.abox:
            if isinstance(a, RoleAssertion):
                out.update((a.subject, a.object))
            else:
                out.add(a.individual)
        return sorted(out)

    def concept_signature(self) -> set[str]:
        names: set[str] = set()
        if self.axioms is not None:
            for ax in self.axioms:
                names |= axiom_concept_names(ax)
        for ax in self.tbox:
            if isinstance(ax, CI):
                names |= concept_names(ax.lhs) | concept_names(ax.rhs)
        for a in self.abox:
            if isinstance(a, ConceptAssertion):
                names.add(a.concept)
            elif isinstance(a, ComplexAssertion):
                names |= concept_names(a.concept)
        return names - RESERVED_CONCEPTS

    def role_signature(self) -> set[str]:
        names: set[str] = set()
        if self.axioms is not None:
            for ax in self.axioms:
                names |= axiom_role_names(ax)
        for ax in self.tbox:
            if isinstance(ax, CI):
                names |= role_names(ax.lhs) | role_names(ax.rhs)
            else:
                names |= {ax.sub, ax.sup}
        for a in self.abox:
            if isinstance(a, RoleAssertion):
                names.add(a.role)
            elif isinstance(a, ComplexAssertion):
                names |= role_names(a.concept)
        return names

    def with_abox(self, extra) -> "KnowledgeBase":
        abox = self.abox + tuple(extra)
        temporal = self.temporal or any(a.time is not None for a in abox)
        return KnowledgeBase(self.tbox, abox, temporal, self.axioms, self.definitions)
