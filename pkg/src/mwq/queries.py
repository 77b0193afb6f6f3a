"""Query syntax trees: NCQs, filtered queries and metric temporal formulas."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

from .errors import ValidationError
from .intervals import NEG_INF, POS_INF, render_bound

# ---------------------------------------------------------------- terms and atoms


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class Ind:
    name: str

    def __str__(self) -> str:
        return f"'{self.name}'"


Term = Union[Var, Ind]


@dataclass(frozen=True)
class Atom:
    """A concept atom (one argument) or role atom (two arguments), possibly negated."""

    pred: str
    args: tuple[Term, ...]
    positive: bool = True

    @property
    def is_role(self) -> bool:
        return len(self.args) == 2

    def variables(self) -> set[Var]:
        return {t for t in self.args if isinstance(t, Var)}

    def substitute(self, mapping: dict) -> "Atom":
        return Atom(self.pred, tuple(mapping.get(t, t) for t in self.args), self.positive)

    def negate(self) -> "Atom":
        return Atom(self.pred, self.args, not self.positive)

    def sort_key(self):
        return (not self.positive, len(self.args), self.pred, tuple(_term_key(t) for t in self.args))

    def __str__(self) -> str:
        body = f"{self.pred}({','.join(str(t) for t in self.args)})"
        return body if self.positive else f"not {body}"


def _term_key(t: Term):
    return (0, t.name) if isinstance(t, Ind) else (1, t.name)


def is_rooted(answer: tuple[Term, ...], atoms) -> bool:
    """Every variable reaches an answer variable or an individual through role atoms."""
    atoms = list(atoms)
    variables = set()
    for a in atoms:
        variables |= a.variables()
    anchors = {t for t in answer if isinstance(t, Var)}
    anchors |= {t for a in atoms for t in a.args if isinstance(t, Ind)}
    adj: dict = {}
    for a in atoms:
        if a.is_role and a.positive:
            x, y = a.args
            adj.setdefault(x, set()).add(y)
            adj.setdefault(y, set()).add(x)
    reached = set(anchors)
    stack = list(anchors)
    while stack:
        for u in adj.get(stack.pop(), ()):
            if u not in reached:
                reached.add(u)
                stack.append(u)
    return variables <= reached


def check_guarded(atoms) -> None:
    atoms = list(atoms)
    positive_terms = set()
    positive_pairs = set()
    for a in atoms:
        if a.positive:
            positive_terms.update(a.args)
            if a.is_role:
                positive_pairs.add(frozenset(a.args))
    for a in atoms:
        if a.positive:
            continue
        if a.is_role:
            if frozenset(a.args) not in positive_pairs:
                raise ValidationError(f"negated atom {a} is not guarded by a positive role atom")
        elif a.args[0] not in positive_terms:
            raise ValidationError(f"negated atom {a} is not guarded by a positive atom")


@dataclass(frozen=True)
class NCQ:
    """Conjunction of (possibly negated) atoms; non-answer variables are existential."""

    answer: tuple[Term, ...]
    atoms: frozenset[Atom]

    def variables(self) -> set[Var]:
        out = set()
        for a in self.atoms:
            out |= a.variables()
        return out

    def quantified(self) -> set[Var]:
        return self.variables() - set(self.answer)

    def is_rooted(self) -> bool:
        return is_rooted(self.answer, self.atoms)

    def __str__(self) -> str:
        return render_query(self.answer, self.atoms, frozenset())


# ---------------------------------------------------------------- filters


@dataclass(frozen=True)
class Filter:
    """Implication (exists z'. role(z,z') & concept(z')) -> (exists z'. ... & negations & nested).

    The subject z is stored with the owning query; z' is implicit.
    """

    role: str
    concept: str
    neg_concepts: frozenset[str] = frozenset()
    neg_roles: frozenset[str] = frozenset()
    nested: frozenset["Filter"] = frozenset()

    def depth(self) -> int:
        return 1 + max((f.depth() for f in self.nested), default=0)

    def key(self):
        return (
            self.role,
            self.concept,
            tuple(sorted(self.neg_concepts)),
            tuple(sorted(self.neg_roles)),
            tuple(sorted(f.key() for f in self.nested)),
        )

    def render(self, subject: str, depth: int = 0) -> str:
        z = f"z{depth}"
        pre = f"{self.role}({subject},{z}) AND {self.concept}({z})"
        parts = [pre]
        parts += [f"NOT {a}({z})" for a in sorted(self.neg_concepts)]
        parts += [f"NOT {r}({subject},{z})" for r in sorted(self.neg_roles)]
        parts += [f"({f.render(z, depth + 1)})" for f in sorted(self.nested, key=Filter.key)]
        return f"(exists {z}. {pre}) -> (exists {z}. {' AND '.join(parts)})"

    def to_json(self) -> dict:
        return {
            "role": self.role,
            "concept": self.concept,
            "not_concepts": sorted(self.neg_concepts),
            "not_roles": sorted(self.neg_roles),
            "nested": [f.to_json() for f in sorted(self.nested, key=Filter.key)],
        }


@dataclass(frozen=True)
class FilteredQuery:
    answer: tuple[Term, ...]
    atoms: frozenset[Atom]
    filters: frozenset[tuple[Term, Filter]] = frozenset()

    @staticmethod
    def from_ncq(q: NCQ) -> "FilteredQuery":
        return FilteredQuery(q.answer, q.atoms, frozenset())

    def variables(self) -> set[Var]:
        out = {t for t in self.answer if isinstance(t, Var)}
        for a in self.atoms:
            out |= a.variables()
        return out

    def quantified(self) -> set[Var]:
        return self.variables() - set(self.answer)

    def nested_filter_depth(self) -> int:
        return max((f.depth() for _, f in self.filters), default=0)

    def is_rooted(self) -> bool:
        return is_rooted(self.answer, self.atoms)

    def __str__(self) -> str:
        return render_query(self.answer, self.atoms, self.filters)


def render_query(answer, atoms, filters) -> str:
    head = f"q({','.join(str(t) for t in answer)})"
    qvars = set()
    for a in atoms:
        qvars |= a.variables()
    qvars -= set(answer)
    parts = [str(a) if a.positive else f"NOT {Atom(a.pred, a.args)}" for a in sorted(atoms, key=Atom.sort_key)]
    parts += [f"({f.render(str(t))})" for t, f in sorted(filters, key=lambda tf: (_term_key(tf[0]), tf[1].key()))]
    body = " AND ".join(parts) if parts else "TRUE"
    if qvars:
        body = f"exists {','.join(sorted(v.name for v in qvars))}. {body}"
    return f"{head} := {body}"


# ---------------------------------------------------------------- temporal formulas


@dataclass(frozen=True)
class TimeInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo == POS_INF or self.hi == NEG_INF or self.lo > self.hi:
            raise ValidationError(f"malformed interval [{self.lo},{self.hi}]")

    def finite_weight(self) -> int:
        return sum(int(abs(b)) for b in (self.lo, self.hi) if not math.isinf(b))

    def __str__(self) -> str:
        return f"[{render_bound(self.lo)},{render_bound(self.hi)}]"


@dataclass(frozen=True)
class Leaf:
    query: NCQ


@dataclass(frozen=True)
class RewrittenLeaf:
    """An NCQ leaf together with the union of its rewritings."""

    query: NCQ
    rewritings: tuple[FilteredQuery, ...] = field(compare=False)


@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class FalseF:
    pass


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class AndF:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class OrF:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Until:
    left: "Formula"
    right: "Formula"
    interval: TimeInterval


@dataclass(frozen=True)
class Since:
    left: "Formula"
    right: "Formula"
    interval: TimeInterval


@dataclass(frozen=True)
class Box:
    interval: TimeInterval
    sub: "Formula"


@dataclass(frozen=True)
class Dia:
    interval: TimeInterval
    sub: "Formula"


@dataclass(frozen=True)
class Next:
    sub: "Formula"


@dataclass(frozen=True)
class Prev:
    sub: "Formula"


Formula = Union[Leaf, RewrittenLeaf, TrueF, FalseF, Not, AndF, OrF, Until, Since, Box, Dia, Next, Prev]


@dataclass(frozen=True)
class Query:
    """A named query ``q(x,...) := formula``."""

    name: str
    answer: tuple[Var, ...]
    formula: Formula

    def is_temporal(self) -> bool:
        return is_temporal(self.formula)

    def as_ncq(self) -> NCQ:
        if not isinstance(self.formula, Leaf):
            raise ValidationError("query is not a plain NCQ")
        return self.formula.query


def children(f: Formula) -> tuple:
    if isinstance(f, (Not, Box, Dia, Next, Prev)):
        return (f.sub,)
    if isinstance(f, (AndF, OrF, Until, Since)):
        return (f.left, f.right)
    return ()


def is_temporal(f: Formula) -> bool:
    if isinstance(f, (Until, Since, Box, Dia, Next, Prev)):
        return True
    return any(is_temporal(c) for c in children(f))


def leaves(f: Formula) -> list:
    if isinstance(f, (Leaf, RewrittenLeaf)):
        return [f]
    out = []
    for c in children(f):
        out.extend(leaves(c))
    return out


def expand_derived(f: Formula) -> Formula:
    """Rewrite Box, Dia, Next and Prev into Until/Since."""
    if isinstance(f, (Leaf, RewrittenLeaf, TrueF, FalseF)):
        return f
    if isinstance(f, Not):
        return Not(expand_derived(f.sub))
    if isinstance(f, AndF):
        return AndF(expand_derived(f.left), expand_derived(f.right))
    if isinstance(f, OrF):
        return OrF(expand_derived(f.left), expand_derived(f.right))
    if isinstance(f, Until):
        return Until(expand_derived(f.left), expand_derived(f.right), f.interval)
    if isinstance(f, Since):
        return Since(expand_derived(f.left), expand_derived(f.right), f.interval)
    if isinstance(f, Next):
        return Until(TrueF(), expand_derived(f.sub), TimeInterval(1, 1))
    if isinstance(f, Prev):
        return Since(TrueF(), expand_derived(f.sub), TimeInterval(1, 1))
    if isinstance(f, Dia):
        return _dia(f.interval, expand_derived(f.sub))
    if isinstance(f, Box):
        return Not(_dia(f.interval, Not(expand_derived(f.sub))))
    raise TypeError(f)


def _dia(iv: TimeInterval, sub: Formula) -> Formula:
    lo, hi = iv.lo, iv.hi
    past: Formula = FalseF()
    future: Formula = FalseF()
    if lo <= 0:
        # the part of the interval at or before now, mirrored onto the naturals
        past = Since(TrueF(), sub, TimeInterval(max(-hi, 0), -lo))
    if hi >= 0:
        future = Until(TrueF(), sub, TimeInterval(max(lo, 0), hi))
    if isinstance(past, FalseF):
        return future
    if isinstance(future, FalseF):
        return past
    return OrF(past, future)


def compute_n(f: Formula) -> int:
    """Sum of the finite bounds of every Until/Since in the expanded formula."""
    f = expand_derived(f)
    return _sum_bounds(f)


def _sum_bounds(f: Formula) -> int:
    own = f.interval.finite_weight() if isinstance(f, (Until, Since)) else 0
    return own + sum(_sum_bounds(c) for c in children(f))


def render_formula(f: Formula) -> str:
    if isinstance(f, Leaf):
        return "{" + ", ".join(str(a) for a in sorted(f.query.atoms, key=Atom.sort_key)) + "}"
    if isinstance(f, RewrittenLeaf):
        inner = " OR ".join(f"[{render_query(r.answer, r.atoms, r.filters).split(' := ', 1)[1]}]" for r in f.rewritings)
        return "{" + inner + "}"
    if isinstance(f, TrueF):
        return "TRUE"
    if isinstance(f, FalseF):
        return "FALSE"
    if isinstance(f, Not):
        return f"NOT {_paren(f.sub)}"
    if isinstance(f, AndF):
        return f"{_paren(f.left)} AND {_paren(f.right)}"
    if isinstance(f, OrF):
        return f"{_paren(f.left)} OR {_paren(f.right)}"
    if isinstance(f, Until):
        return f"{_paren(f.left)} U{f.interval} {_paren(f.right)}"
    if isinstance(f, Since):
        return f"{_paren(f.left)} S{f.interval} {_paren(f.right)}"
    if isinstance(f, Box):
        return f"BOX{f.interval} {_paren(f.sub)}"
    if isinstance(f, Dia):
        return f"DIA{f.interval} {_paren(f.sub)}"
    if isinstance(f, Next):
        return f"NEXT {_paren(f.sub)}"
    if isinstance(f, Prev):
        return f"PREV {_paren(f.sub)}"
    raise TypeError(f)


def _paren(f: Formula) -> str:
    text = render_formula(f)
    if isinstance(f, (Leaf, RewrittenLeaf, TrueF, FalseF)):
        return text
    return f"({text})"


def render_full_query(q: Query) -> str:
    return f"{q.name}({','.join(v.name for v in q.answer)}) := {render_formula(q.formula)}"

