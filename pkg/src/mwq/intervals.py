"""Canonical sets of integers built from intervals, and the diamond operators on them.

Endpoints are Python ints, or ``-math.inf`` / ``math.inf`` for unbounded sides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .errors import ValidationError

NEG_INF = -math.inf
POS_INF = math.inf
INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

Bound = Union[int, float]


def check_time(value: int) -> int:
    if not INT64_MIN <= value <= INT64_MAX:
        raise ValidationError(f"time point {value} outside the signed 64-bit range")
    return value


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, pairwise disjoint and non-adjacent closed intervals over the integers."""

    intervals: tuple[tuple[Bound, Bound], ...] = ()

    @staticmethod
    def of(raw: Iterable[tuple[Bound, Bound]]) -> "IntervalSet":
        items = []
        for lo, hi in raw:
            if lo > hi:
                raise ValidationError(f"malformed interval [{lo}, {hi}]")
            if lo == POS_INF or hi == NEG_INF:
                raise ValidationError(f"malformed interval [{lo}, {hi}]")
            items.append((lo, hi))
        items.sort()
        merged: list[list[Bound]] = []
        for lo, hi in items:
            if merged and lo <= merged[-1][1] + 1:
                if hi > merged[-1][1]:
                    merged[-1][1] = hi
            else:
                merged.append([lo, hi])
        return IntervalSet(tuple((lo, hi) for lo, hi in merged))

    @staticmethod
    def point(t: int) -> "IntervalSet":
        return IntervalSet(((t, t),))

    @staticmethod
    def points(ts: Iterable[int]) -> "IntervalSet":
        return IntervalSet.of((t, t) for t in ts)

    @staticmethod
    def everything() -> "IntervalSet":
        return IntervalSet(((NEG_INF, POS_INF),))

    @staticmethod
    def empty() -> "IntervalSet":
        return IntervalSet(())

    def is_empty(self) -> bool:
        return not self.intervals

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __iter__(self) -> Iterator[tuple[Bound, Bound]]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __contains__(self, t: int) -> bool:
        lo_i, hi_i = 0, len(self.intervals)
        while lo_i < hi_i:
            mid = (lo_i + hi_i) // 2
            lo, hi = self.intervals[mid]
            if t < lo:
                hi_i = mid
            elif t > hi:
                lo_i = mid + 1
            else:
                return True
        return False

    def min(self) -> Bound:
        return self.intervals[0][0]

    def max(self) -> Bound:
        return self.intervals[-1][1]

    def is_canonical(self) -> bool:
        prev_hi = None
        for lo, hi in self.intervals:
            if lo > hi or lo == POS_INF or hi == NEG_INF:
                return False
            if prev_hi is not None and lo <= prev_hi + 1:
                return False
            prev_hi = hi
        return True

    def union(self, other: "IntervalSet") -> "IntervalSet":
        if not other.intervals:
            return self
        if not self.intervals:
            return other
        return IntervalSet.of(self.intervals + other.intervals)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        i = j = 0
        a, b = self.intervals, other.intervals
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo <= hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(tuple(out))

    def complement(self) -> "IntervalSet":
        out = []
        cursor: Bound = NEG_INF
        for lo, hi in self.intervals:
            if lo > cursor:
                out.append((cursor, lo - 1))
            cursor = hi + 1
        if cursor != POS_INF:
            out.append((cursor, POS_INF))
        return IntervalSet(tuple(out))

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        return self.intersect(other.complement())

    def issubset(self, other: "IntervalSet") -> bool:
        return self.intersect(other) == self

    def sample_points(self) -> list[int]:
        """One integer member per interval (finite endpoint preferred)."""
        out = []
        for lo, hi in self.intervals:
            if lo != NEG_INF:
                out.append(int(lo))
            elif hi != POS_INF:
                out.append(int(hi))
            else:
                out.append(0)
        return out

    def endpoints(self) -> set[Bound]:
        return {e for iv in self.intervals for e in iv}

    def members_within(self, lo: int, hi: int) -> list[int]:
        out = []
        for a, b in self.intervals:
            start = max(a, lo)
            stop = min(b, hi)
            if start <= stop:
                out.extend(range(int(start), int(stop) + 1))
        return out

    def to_json(self) -> list[list]:
        return [[render_bound(lo), render_bound(hi)] for lo, hi in self.intervals]

    def __str__(self) -> str:
        if not self.intervals:
            return "{}"
        return " u ".join(f"[{render_bound(lo)},{render_bound(hi)}]" for lo, hi in self.intervals)


def render_bound(b: Bound):
    if b == NEG_INF:
        return "-inf"
    if b == POS_INF:
        return "inf"
    return int(b)


def parse_bound(value) -> Bound:
    if value in ("-inf", NEG_INF):
        return NEG_INF
    if value in ("inf", "+inf", POS_INF):
        return POS_INF
    return int(value)


@dataclass(frozen=True)
class DiamondOp:
    """A diamond operator; ``kind`` is one of past, future, anytime, convex, convex_n."""

    kind: str
    n: int | None = None

    def __post_init__(self):
        if self.kind not in ("past", "future", "anytime", "convex", "convex_n"):
            raise ValidationError(f"unknown diamond kind {self.kind!r}")
        if self.kind == "convex_n":
            if self.n is None or self.n < 1:
                raise ValidationError("conv[n] requires n >= 1")
        elif self.n is not None:
            raise ValidationError(f"diamond {self.kind} takes no bound")

    @staticmethod
    def convex_n(n: int) -> "DiamondOp":
        return DiamondOp("convex_n", n)

    def keyword(self) -> str:
        return {
            "past": "diaP",
            "future": "diaF",
            "anytime": "diaPF",
            "convex": "conv",
        }.get(self.kind) or f"conv[{self.n}]"


PAST = DiamondOp("past")
FUTURE = DiamondOp("future")
ANYTIME = DiamondOp("anytime")
CONVEX = DiamondOp("convex")


def apply_diamond(op: DiamondOp, m: IntervalSet) -> IntervalSet:
    if m.is_empty():
        return m
    if op.kind == "anytime":
        return IntervalSet.everything()
    if op.kind == "future":
        return IntervalSet(((NEG_INF, m.max()),))
    if op.kind == "past":
        return IntervalSet(((m.min(), POS_INF),))
    if op.kind == "convex":
        return IntervalSet(((m.min(), m.max()),))
    # convex_n: one pass, a gap closes iff its bounding original points are < n apart
    out = [list(m.intervals[0])]
    for lo, hi in m.intervals[1:]:
        if lo - out[-1][1] < op.n:
            out[-1][1] = hi
        else:
            out.append([lo, hi])
    return IntervalSet(tuple((a, b) for a, b in out))
