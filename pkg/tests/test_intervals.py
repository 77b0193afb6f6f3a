import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mwq.errors import ValidationError
from mwq.intervals import (
    ANYTIME,
    CONVEX,
    FUTURE,
    NEG_INF,
    PAST,
    POS_INF,
    DiamondOp,
    IntervalSet,
    apply_diamond,
)

ALL_OPS = [PAST, FUTURE, ANYTIME, CONVEX] + [DiamondOp.convex_n(n) for n in (1, 2, 3, 5, 10)]


def members(s: IntervalSet, lo: int, hi: int) -> set:
    return set(s.members_within(lo, hi))


def brute_diamond(op: DiamondOp, m: set, t: int) -> bool:
    """Pointwise definition of each diamond over a finite member set."""
    if not m:
        return False
    if op.kind == "anytime":
        return True
    if op.kind == "past":
        return any(j <= t for j in m)
    if op.kind == "future":
        return any(j >= t for j in m)
    if op.kind == "convex":
        return any(j <= t for j in m) and any(k >= t for k in m)
    return any(j <= t <= k and k - j < op.n for j in m for k in m)


finite_sets = st.lists(
    st.tuples(st.integers(-30, 30), st.integers(0, 6)).map(lambda p: (p[0], p[0] + p[1])), max_size=6
).map(IntervalSet.of)


@st.composite
def interval_sets(draw):
    s = draw(finite_sets)
    if s and draw(st.booleans()):
        s = s.union(IntervalSet.of([(NEG_INF, s.min())]))
    if s and draw(st.booleans()):
        s = s.union(IntervalSet.of([(s.max(), POS_INF)]))
    return s


class TestConstruction:
    def test_canonical_input_is_kept(self):
        assert IntervalSet.of([(0, 0), (167, 258)]).to_json() == [[0, 0], [167, 258]]

    def test_adjacent_intervals_merge(self):
        assert IntervalSet.of([(1, 3), (4, 6)]).to_json() == [[1, 6]]

    def test_overlapping_unsorted_merge(self):
        s = IntervalSet.of([(5, 9), (2, 6)])
        assert s.to_json() == [[2, 9]]
        assert members(s, 0, 12) == set(range(2, 10))

    def test_malformed_interval_rejected(self):
        with pytest.raises(ValidationError):
            IntervalSet.of([(3, 1)])

    def test_infinite_bounds_render(self):
        assert IntervalSet.everything().to_json() == [["-inf", "inf"]]


class TestSetOperations:
    def test_union(self):
        assert IntervalSet.of([(0, 3)]).union(IntervalSet.of([(2, 5)])).to_json() == [[0, 5]]

    def test_intersect_half_lines(self):
        s = IntervalSet.of([(0, POS_INF)]).intersect(IntervalSet.of([(NEG_INF, 0)]))
        assert s.to_json() == [[0, 0]]

    def test_complement(self):
        c = IntervalSet.point(0).complement()
        assert c.to_json() == [["-inf", -1], [1, "inf"]]
        assert members(c, -5, 5) == set(range(-5, 6)) - {0}

    @given(interval_sets(), interval_sets())
    def test_operations_match_sets(self, a, b):
        lo, hi = -45, 45
        ma, mb = members(a, lo, hi), members(b, lo, hi)
        assert members(a.union(b), lo, hi) == ma | mb
        assert members(a.intersect(b), lo, hi) == ma & mb
        assert members(a.complement(), lo, hi) == set(range(lo, hi + 1)) - ma
        assert members(a.difference(b), lo, hi) == ma - mb
        for s in (a.union(b), a.intersect(b), a.complement()):
            assert s.is_canonical()

    @given(interval_sets())
    def test_sample_points_hit_every_interval(self, s):
        pts = s.sample_points()
        assert len(pts) == len(s.intervals)
        for p, (lo, hi) in zip(pts, s.intervals):
            assert lo <= p <= hi


class TestDiamonds:
    @pytest.mark.parametrize("op", ALL_OPS)
    def test_empty_stays_empty(self, op):
        assert apply_diamond(op, IntervalSet.empty()).is_empty()

    def test_convex_one_is_identity(self):
        s = IntervalSet.points([0, 5])
        assert apply_diamond(DiamondOp.convex_n(1), s) == s

    def test_chemotherapy_gap_closing(self):
        s = apply_diamond(DiamondOp.convex_n(120), IntervalSet.points([0, 167, 258]))
        assert s.to_json() == [[0, 0], [167, 258]]

    def test_past(self):
        assert apply_diamond(PAST, IntervalSet.point(5)).to_json() == [[5, "inf"]]

    def test_future(self):
        assert apply_diamond(FUTURE, IntervalSet.point(10)).to_json() == [["-inf", 10]]

    def test_gap_closes_iff_strictly_below_bound(self):
        assert apply_diamond(DiamondOp.convex_n(3), IntervalSet.points([0, 3])).to_json() == [[0, 0], [3, 3]]
        assert apply_diamond(DiamondOp.convex_n(4), IntervalSet.points([0, 3])).to_json() == [[0, 3]]

    def test_bad_bound_rejected(self):
        with pytest.raises(ValidationError):
            DiamondOp.convex_n(0)

    @settings(max_examples=200)
    @given(finite_sets, st.sampled_from(ALL_OPS))
    def test_agrees_with_pointwise_definition(self, m, op):
        if not m:
            return
        pts = members(m, -100, 100)
        n = op.n or 0
        lo, hi = min(pts) - n - 2, max(pts) + n + 2
        got = members(apply_diamond(op, m), lo, hi)
        assert got == {t for t in range(lo, hi + 1) if brute_diamond(op, pts, t)}

    @given(interval_sets(), interval_sets(), st.sampled_from(ALL_OPS))
    def test_monotone(self, a, b, op):
        small, big = a.intersect(b), a
        assert apply_diamond(op, small).issubset(apply_diamond(op, big))

    @given(interval_sets(), st.sampled_from(ALL_OPS))
    def test_extensive(self, m, op):
        assert m.issubset(apply_diamond(op, m))

    @given(interval_sets())
    def test_convex_idempotent(self, m):
        once = apply_diamond(CONVEX, m)
        assert apply_diamond(CONVEX, once) == once
