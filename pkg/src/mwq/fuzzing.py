"""Seeded equivalence trials between the rewriting pipeline and the oracle."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .evaluation import mwa_atemporal
from .generator import Instance, Limits, random_instance
from .intervals import IntervalSet
from .kb import KnowledgeBase
from .oracle import oracle_atemporal, oracle_temporal
from .pipeline import default_window
from .queries import compute_n, render_full_query
from .temporal import answer_intervals, rep_constancy_violations
from .textio import serialize_kb


@dataclass
class TrialResult:
    seed: int
    temporal: bool
    instance: Instance
    expected: set
    actual: set
    problems: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems


def _pairs_in_window(answers, lo: int, hi: int) -> set:
    return {(tup, t) for tup, ivs in answers.rows.items() for t in ivs.members_within(lo, hi)}


def run_trial(seed: int, temporal: bool = False, limits: Limits = Limits()) -> TrialResult:
    inst = random_instance(seed, limits, temporal)
    q, kb = inst.query, inst.kb
    if not temporal:
        ncq = q.as_ncq()
        expected = oracle_atemporal(ncq, kb)
        actual = mwa_atemporal(ncq, kb)
        res = TrialResult(seed, False, inst, expected, actual)
        if expected != actual:
            res.problems.append("pipeline and oracle answers differ")
        return res
    window = default_window(q, kb)
    tem = kb.tem
    lo, hi = tem[0] - window, tem[-1] + window
    answers = answer_intervals(q, kb)
    actual = _pairs_in_window(answers, lo, hi)
    expected = oracle_temporal(q, kb, window)
    res = TrialResult(seed, True, inst, expected, actual)
    if expected != actual:
        res.problems.append("pipeline and oracle answers differ inside the window")
    bumped = answer_intervals(q, kb, n_override=compute_n(q.formula) + 5)
    if bumped.rows != answers.rows:
        res.problems.append("answers change when N is raised by 5")
    if rep_constancy_violations(q, kb):
        res.problems.append("a subformula is not constant on a far region")
    return res


def write_repro(result: TrialResult, directory: str | Path) -> Path:
    """Store a trial as a bundle: kb.txt, data.txt, query.txt, expected.json, actual.json, problems.txt.

    The layout matches the shipped bundles, so ``mwq answer --kb kb.txt --data data.txt
    --query query.txt`` replays it.
    """
    out = Path(directory) / f"seed-{result.seed}{'-temporal' if result.temporal else ''}"
    out.mkdir(parents=True, exist_ok=True)
    kb = result.instance.kb
    (out / "kb.txt").write_text(serialize_kb(KnowledgeBase(kb.tbox, (), kb.temporal)))
    (out / "data.txt").write_text("".join(f"{a}\n" for a in kb.abox))
    (out / "query.txt").write_text(render_full_query(result.instance.query) + "\n")

    def dump(rows) -> str:
        if result.temporal:
            grouped: dict = {}
            for tup, t in rows:
                grouped.setdefault(tup, []).append(t)
            items = [
                {"tuple": list(tup), "intervals": IntervalSet.points(ts).to_json()} for tup, ts in sorted(grouped.items())
            ]
        else:
            items = [{"tuple": list(tup)} for tup in sorted(rows)]
        return json.dumps({"answers": items}, separators=(",", ":")) + "\n"

    (out / "expected.json").write_text(dump(result.expected))
    (out / "actual.json").write_text(dump(result.actual))
    (out / "problems.txt").write_text("\n".join(result.problems) + "\n")
    return out
