"""Answering metric temporal queries over temporal knowledge bases.

Each NCQ leaf is replaced by the union of its rewritings and evaluated on the
snapshot of the nearest representative time point.  Truth values live on a
segment timeline: every integer within N of a representative is its own
segment, and every maximal region farther away is one segment on which all
subformulas are constant.
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass

import numpy as np

from .answers import AnswerSet
from .classifier import SubsumptionTable, classify_kb
from .errors import ValidationError
from .evaluation import eval_filtered
from .intervals import NEG_INF, POS_INF, IntervalSet
from .normalizer import normalize
from .queries import (
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
    RewrittenLeaf,
    Since,
    TrueF,
    Until,
    children,
    compute_n,
    expand_derived,
    render_full_query,
)
from .rewriter import all_rewritings
from .saturation import TemporalStructure, build_temporal_structure


def _map_leaves(f: Formula, fn) -> Formula:
    if isinstance(f, (Leaf, RewrittenLeaf)):
        return fn(f)
    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, Not):
        return Not(_map_leaves(f.sub, fn))
    if isinstance(f, AndF):
        return AndF(_map_leaves(f.left, fn), _map_leaves(f.right, fn))
    if isinstance(f, OrF):
        return OrF(_map_leaves(f.left, fn), _map_leaves(f.right, fn))
    if isinstance(f, Until):
        return Until(_map_leaves(f.left, fn), _map_leaves(f.right, fn), f.interval)
    if isinstance(f, Since):
        return Since(_map_leaves(f.left, fn), _map_leaves(f.right, fn), f.interval)
    if isinstance(f, (Box, Dia)):
        return type(f)(f.interval, _map_leaves(f.sub, fn))
    if isinstance(f, (Next, Prev)):
        return type(f)(_map_leaves(f.sub, fn))
    raise TypeError(f)


def lift_rewrite(q: Query, table: SubsumptionTable, require_rooted: bool = True) -> Query:
    """Replace every NCQ leaf by the union of its rewritings; the temporal skeleton is kept."""
    cache: dict = {}

    def lift(leaf):
        ncq = leaf.query
        if require_rooted and not ncq.is_rooted():
            raise ValidationError(f"temporal queries need rooted NCQ leaves; not rooted: {ncq}")
        if ncq not in cache:
            cache[ncq] = RewrittenLeaf(ncq, tuple(all_rewritings(ncq, table)))
        return cache[ncq]

    return Query(q.name, q.answer, _map_leaves(q.formula, lift))


def skeleton(q: Query) -> str:
    return render_full_query(q)


# ---------------------------------------------------------------- time line


def rep_check(t: int, n: int, reps) -> bool:
    """No representative lies in [t+n, t) or (t, t+n]."""
    if n == 0:
        return True
    if n > 0:
        i = bisect.bisect_right(reps, t)
        return i >= len(reps) or reps[i] > t + n
    i = bisect.bisect_left(reps, t) - 1
    return i < 0 or reps[i] < t + n


@dataclass(frozen=True)
class VirtualPoint:
    """Time point ``rep + offset`` addressed through the representative that stands for it."""

    rep: int
    offset: int

    @property
    def time(self) -> int:
        return self.rep + self.offset


class Timeline:
    """Partition of the integers into covered points and far regions."""

    def __init__(self, reps, n: int, extra_points=()):
        self.reps = sorted(reps)
        self.n = n
        covered = IntervalSet.of((r - n, r + n) for r in self.reps)
        covered = covered.union(IntervalSet.points(extra_points))
        self.covered = covered
        segs = []
        for a, b in covered.complement():
            if a == NEG_INF:
                sample = int(b) - n - 1
            elif b == POS_INF:
                sample = int(a) + n + 1
            else:
                sample = (int(a) + int(b)) // 2
            segs.append((a, b, sample, True))
        for a, b in covered:
            segs.extend((p, p, p, False) for p in range(int(a), int(b) + 1))
        segs.sort(key=lambda seg: seg[0])
        self.lo = [seg[0] for seg in segs]
        self.hi = [seg[1] for seg in segs]
        self.sample = [seg[2] for seg in segs]
        self.far = [seg[3] for seg in segs]

    def __len__(self) -> int:
        return len(self.lo)

    def segment_of(self, t) -> int:
        return bisect.bisect_right(self.lo, t) - 1

    def far_regions(self) -> list[tuple]:
        return [(self.lo[i], self.hi[i]) for i in range(len(self)) if self.far[i]]

    def mirrored(self) -> "Timeline":
        m = object.__new__(Timeline)
        m.reps = sorted(-r for r in self.reps)
        m.n = self.n
        m.covered = None
        m.lo = [-h for h in reversed(self.hi)]
        m.hi = [-lo for lo in reversed(self.lo)]
        m.sample = [-s for s in reversed(self.sample)]
        m.far = list(reversed(self.far))
        return m


def _next_index(flags: np.ndarray) -> np.ndarray:
    """Per row and column s: smallest s' >= s with flags[s'] set, or the row length."""
    width = flags.shape[1]
    idx = np.where(flags, np.arange(width), width)
    return np.minimum.accumulate(idx[:, ::-1], axis=1)[:, ::-1]


def _until(left: np.ndarray, right: np.ndarray, lo_b, hi_b, tl: Timeline) -> np.ndarray:
    """Truth of ``left U[lo_b,hi_b] right`` on every segment, for every tuple row."""
    count = len(tl)
    next_true = _next_index(right)
    next_false = _next_index(~left)
    out = np.zeros_like(left)
    for s in range(count):
        i = tl.sample[s]
        x = i + lo_b
        sx = tl.segment_of(x)
        sb = count - 1 if hi_b == POS_INF else tl.segment_of(i + hi_b)
        witness = next_true[:, sx]
        reachable = witness <= sb
        if lo_b == 0:
            immediate = witness == s
        else:
            immediate = np.zeros(left.shape[0], dtype=bool)
        blocker = next_false[:, s]
        starts_at_lo = (witness != sx) | (x == tl.lo[sx])
        guarded = (blocker > witness) | ((blocker == witness) & starts_at_lo)
        out[:, s] = reachable & (immediate | guarded)
    return out


def _since(left, right, lo_b, hi_b, tl: Timeline) -> np.ndarray:
    mirror = tl.mirrored()
    return _until(left[:, ::-1], right[:, ::-1], lo_b, hi_b, mirror)[:, ::-1]


# ---------------------------------------------------------------- evaluation


class TemporalEvaluator:
    """Bottom-up truth tables of a lifted query over the segment timeline."""

    def __init__(self, lifted: Query, structure: TemporalStructure, n: int, extra_points=()):
        self.query = lifted
        self.structure = structure
        self.formula = expand_derived(lifted.formula)
        self.n = n
        self.timeline = Timeline(structure.reps, n, extra_points)
        self.individuals = sorted(structure.extensions.individuals)
        self.tuples = list(itertools.product(self.individuals, repeat=len(lifted.answer)))
        self.index = {t: i for i, t in enumerate(self.tuples)}
        reps = structure.reps
        self.rep_pos = {r: i for i, r in enumerate(reps)}
        self.segment_rep = np.array([self.rep_pos[structure.nearest_rep(s)] for s in self.timeline.sample], dtype=np.int64)
        self._leaf_cache: dict = {}
        self.truth: dict = {}
        self._eval(self.formula)

    def _leaf_table(self, leaf: RewrittenLeaf) -> np.ndarray:
        """Truth per tuple and representative."""
        if leaf.query in self._leaf_cache:
            return self._leaf_cache[leaf.query]
        head = [v for v in self.query.answer]
        leaf_vars = list(leaf.query.answer)
        pos = [head.index(v) for v in leaf_vars]
        reps = self.structure.reps
        table = np.zeros((len(self.tuples), len(reps)), dtype=bool)
        for j, r in enumerate(reps):
            snap = self.structure.snapshots[r]
            found = set()
            for fq in leaf.rewritings:
                found |= eval_filtered(fq, snap)
            if not found:
                continue
            for i, tup in enumerate(self.tuples):
                if tuple(tup[p] for p in pos) in found:
                    table[i, j] = True
        self._leaf_cache[leaf.query] = table
        return table

    def _eval(self, f: Formula) -> np.ndarray:
        if f in self.truth:
            return self.truth[f]
        shape = (len(self.tuples), len(self.timeline))
        if isinstance(f, TrueF):
            out = np.ones(shape, dtype=bool)
        elif isinstance(f, FalseF):
            out = np.zeros(shape, dtype=bool)
        elif isinstance(f, RewrittenLeaf):
            out = self._leaf_table(f)[:, self.segment_rep]
        elif isinstance(f, Leaf):
            raise ValidationError("query leaves must be rewritten before temporal evaluation")
        elif isinstance(f, Not):
            out = ~self._eval(f.sub)
        elif isinstance(f, AndF):
            out = self._eval(f.left) & self._eval(f.right)
        elif isinstance(f, OrF):
            out = self._eval(f.left) | self._eval(f.right)
        elif isinstance(f, Until):
            out = _until(self._eval(f.left), self._eval(f.right), f.interval.lo, f.interval.hi, self.timeline)
        elif isinstance(f, Since):
            out = _since(self._eval(f.left), self._eval(f.right), f.interval.lo, f.interval.hi, self.timeline)
        else:
            raise TypeError(f)
        self.truth[f] = out
        return out

    def subformulas(self) -> list:
        out, stack = [], [self.formula]
        while stack:
            f = stack.pop()
            if f not in out:
                out.append(f)
                stack.extend(children(f))
        return out

    def holds(self, f: Formula, tup, t: int) -> bool:
        return bool(self.truth[f][self.index[tuple(tup)], self.timeline.segment_of(t)])

    def eval_at(self, tup, point: VirtualPoint, f: Formula | None = None) -> bool:
        """Truth at a rep-valid virtual point."""
        if abs(point.offset) > self.n:
            raise ValidationError(f"offset {point.offset} exceeds N = {self.n}")
        if point.rep not in self.rep_pos or not rep_check(point.rep, point.offset, self.structure.reps):
            raise ValidationError(f"{point.rep}+{point.offset} is not a valid virtual point")
        return self.holds(f or self.formula, tup, point.time)

    def intervals(self, f: Formula | None = None) -> dict:
        """Tuple -> IntervalSet of time points where the formula holds."""
        table = self.truth[f or self.formula]
        tl = self.timeline
        out = {}
        for i, tup in enumerate(self.tuples):
            row = table[i]
            if not row.any():
                continue
            out[tup] = IntervalSet.of((tl.lo[s], tl.hi[s]) for s in np.flatnonzero(row))
        return out


def prepare(q: Query, kb, table: SubsumptionTable | None = None, structure: TemporalStructure | None = None):
    """Normalized KB, classification, temporal structure and lifted query."""
    if not kb.temporal:
        raise ValidationError("the temporal engine needs a temporal knowledge base")
    nkb = normalize(kb)
    table = table or classify_kb(nkb)
    structure = structure or build_temporal_structure(nkb, table)
    return nkb, table, structure, lift_rewrite(q, table)


def answer_intervals(
    q: Query,
    kb,
    n_override: int | None = None,
    only_tem: bool = False,
    table: SubsumptionTable | None = None,
    structure: TemporalStructure | None = None,
) -> AnswerSet:
    """Every tuple of individuals with the exact set of integers where the query holds."""
    nkb, table, structure, lifted = prepare(q, kb, table, structure)
    n = compute_n(lifted.formula) if n_override is None else n_override
    ev = TemporalEvaluator(lifted, structure, n)
    rows = ev.intervals()
    answers = AnswerSet(tuple(v.name for v in q.answer), rows, True)
    if only_tem:
        answers = answers.restrict(IntervalSet.points(structure.tem))
    return answers


def rep_constancy_violations(q: Query, kb, samples_per_region: int = 3) -> list:
    """Far regions on which some subformula changes its value at the sampled points.

    The sampled points are split off as their own segments, so their values are
    computed rather than inherited from the region.
    """
    nkb, table, structure, lifted = prepare(q, kb)
    n = compute_n(lifted.formula)
    base = Timeline(structure.reps, n)
    picks = []
    for lo, hi in base.far_regions():
        if lo == NEG_INF:
            pts = [int(hi), int(hi) - n - 1, int(hi) - 3 * n - 17]
        elif hi == POS_INF:
            pts = [int(lo), int(lo) + n + 1, int(lo) + 3 * n + 17]
        else:
            pts = sorted({int(lo), (int(lo) + int(hi)) // 2, int(hi)})
        picks.append(pts[:samples_per_region])
    ev = TemporalEvaluator(lifted, structure, n, extra_points=[p for pts in picks for p in pts])
    bad = []
    for f in ev.subformulas():
        for pts in picks:
            values = {tuple(ev.truth[f][:, ev.timeline.segment_of(p)]) for p in pts}
            if len(values) > 1:
                bad.append((f, pts))
    return bad
