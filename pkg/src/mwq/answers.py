"""Answer sets returned by the query engines."""

from __future__ import annotations

from dataclasses import dataclass, field

from .intervals import IntervalSet


@dataclass(frozen=True)
class AnswerSet:
    """Map from individual tuples to the time points where they are answers.

    Atemporal answer sets store ``None`` as the value of every tuple.
    """

    variables: tuple[str, ...]
    rows: dict = field(default_factory=dict)
    temporal: bool = False

    def tuples(self) -> set[tuple[str, ...]]:
        return set(self.rows)

    def sorted_rows(self) -> list[tuple[tuple[str, ...], IntervalSet | None]]:
        return sorted(self.rows.items(), key=lambda kv: kv[0])

    def restrict(self, allowed: IntervalSet) -> "AnswerSet":
        rows = {}
        for t, iv in self.rows.items():
            cut = iv.intersect(allowed)
            if cut:
                rows[t] = cut
        return AnswerSet(self.variables, rows, self.temporal)
