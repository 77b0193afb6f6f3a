"""Normal-form conversion with fresh, hash-consed definition names."""

from __future__ import annotations

from .errors import ValidationError
from .kb import (
    BOT,
    CI,
    FRESH_PREFIX,
    TOP,
    And,
    Bot,
    ComplexAssertion,
    ConceptAssertion,
    ConjCI,
    Diam,
    DiamCI,
    Exists,
    ExistsLHS,
    ExistsRHS,
    KnowledgeBase,
    Name,
    RoleCI,
    Top,
    as_raw,
    has_diamond,
)


def simplify(c):
    """Absorb top and bot where the result is obvious."""
    if isinstance(c, And):
        left, right = simplify(c.left), simplify(c.right)
        if isinstance(left, Bot) or isinstance(right, Bot):
            return Bot()
        if isinstance(left, Top):
            return right
        if isinstance(right, Top):
            return left
        return And(left, right)
    if isinstance(c, Exists):
        filler = simplify(c.filler)
        return Bot() if isinstance(filler, Bot) else Exists(c.role, filler)
    if isinstance(c, Diam):
        filler = simplify(c.filler)
        if isinstance(filler, (Bot, Top)):
            return filler
        return Diam(c.op, filler)
    return c


def _atomic(c) -> str | None:
    if isinstance(c, Name):
        return c.name
    if isinstance(c, Top):
        return TOP
    if isinstance(c, Bot):
        return BOT
    return None


class _Normalizer:
    def __init__(self, start: int = 1):
        self.counter = start
        self.fresh: dict = {}
        self.lhs_done: set = set()
        self.rhs_done: set = set()
        self.out: list = []
        self.seen: set = set()

    def emit(self, ax) -> None:
        if ax not in self.seen:
            self.seen.add(ax)
            self.out.append(ax)

    def fresh_name(self, c) -> str:
        if c not in self.fresh:
            self.fresh[c] = f"{FRESH_PREFIX}{self.counter}"
            self.counter += 1
        return self.fresh[c]

    def name_lhs(self, c) -> str:
        """A name X with c SUB X."""
        atom = _atomic(c)
        if atom is not None:
            return atom
        x = self.fresh_name(c)
        if c not in self.lhs_done:
            self.lhs_done.add(c)
            self.lhs_shape(c, x)
        return x

    def name_rhs(self, c) -> str:
        """A name X with X EQV c (both directions when c is diamond-free)."""
        atom = _atomic(c)
        if atom is not None:
            return atom
        x = self.fresh_name(c)
        if c not in self.rhs_done:
            self.rhs_done.add(c)
            self.inclusion(Name(x), c)
            # the reverse direction lets named successors satisfy the restriction
            self.name_lhs(c)
        return x

    def lhs_shape(self, c, b: str) -> None:
        atom = _atomic(c)
        if atom == BOT:
            return
        if atom is not None:
            self.emit(ConjCI(atom, TOP, b))
        elif isinstance(c, And):
            self.emit(ConjCI(self.name_lhs(c.left), self.name_lhs(c.right), b))
        elif isinstance(c, Exists):
            self.emit(ExistsLHS(c.role, self.name_lhs(c.filler), b))
        elif isinstance(c, Diam):
            self.emit(DiamCI(c.op, self.name_lhs(c.filler), b))
        else:
            raise TypeError(c)

    def inclusion(self, lhs, rhs) -> None:
        lhs, rhs = simplify(lhs), simplify(rhs)
        if isinstance(lhs, Bot) or isinstance(rhs, Top):
            return
        if isinstance(rhs, And):
            self.inclusion(lhs, rhs.left)
            self.inclusion(lhs, rhs.right)
            return
        if isinstance(rhs, Diam):
            raise ValidationError("diamonds may only occur on the left-hand side")
        if isinstance(rhs, Exists):
            a = self.name_lhs(lhs)
            self.emit(ExistsRHS(a, rhs.role, self.name_rhs(rhs.filler)))
            return
        self.lhs_shape(lhs, _atomic(rhs))


def normalize(kb: KnowledgeBase) -> KnowledgeBase:
    """Return an equivalent knowledge base whose TBox is in normal form.

    Fresh names map to their defining concepts in ``definitions``.
    """
    if kb.normalized:
        return kb
    for name in kb.concept_signature() | kb.role_signature() | set(kb.individuals):
        if name.startswith(FRESH_PREFIX):
            raise ValidationError(f"name {name!r} collides with the reserved prefix {FRESH_PREFIX}")
    norm = _Normalizer()
    for ax in kb.tbox:
        if isinstance(ax, CI):
            norm.inclusion(ax.lhs, ax.rhs)
        else:
            norm.emit(RoleCI(ax.sub, ax.sup))
    abox = []
    for a in kb.abox:
        if isinstance(a, ComplexAssertion):
            if has_diamond(a.concept):
                raise ValidationError("diamonds are not allowed in assertions")
            c = simplify(a.concept)
            abox.append(ConceptAssertion(norm.name_rhs(c), a.individual, a.time))
        else:
            abox.append(a)
    definitions = {name: c for c, name in norm.fresh.items()}
    return KnowledgeBase(
        tuple(as_raw(ax) for ax in norm.out),
        tuple(abox),
        kb.temporal,
        tuple(norm.out),
        definitions,
    )
