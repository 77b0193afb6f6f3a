"""Loading inputs and answering queries with either engine."""

from __future__ import annotations

from pathlib import Path

from .answers import AnswerSet
from .classifier import classify_kb
from .errors import ValidationError
from .evaluation import extend_answers, mwa_atemporal
from .intervals import IntervalSet
from .kb import DiamCI, KnowledgeBase
from .model import build_named_part
from .normalizer import normalize
from .oracle import oracle_atemporal, oracle_temporal
from .queries import Leaf, Query, compute_n
from .saturation import saturate
from .temporal import answer_intervals
from .textio import ingest_csv, merge_data, parse_kb, parse_query


def load_data(path: str | Path) -> list:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        return ingest_csv(text, str(path))
    data = parse_kb(text, str(path))
    if data.tbox:
        raise ValidationError(f"{path}: data files may only contain assertions")
    return list(data.abox)


def load_kb(kb_path: str | Path, data_path: str | Path | None = None) -> KnowledgeBase:
    kb = parse_kb(Path(kb_path).read_text(), str(kb_path))
    if data_path is not None:
        kb = merge_data(kb, load_data(data_path))
    return kb


def load_query(path: str | Path) -> Query:
    return parse_query(Path(path).read_text(), str(path))


def check_consistency(kb: KnowledgeBase) -> None:
    """Raises InconsistentKBError with a witness when bot is entailed somewhere."""
    nkb = normalize(kb)
    table = classify_kb(nkb)
    if nkb.temporal:
        saturate(nkb, table)
    else:
        build_named_part(nkb, table)


def default_window(q: Query, kb: KnowledgeBase) -> int:
    """Output window for the temporal oracle: N plus the largest gap-closing bound plus 2."""
    nkb = normalize(kb)
    conv = [ax.op.n for ax in nkb.axioms if isinstance(ax, DiamCI) and ax.op.kind == "convex_n"]
    return compute_n(q.formula) + max(conv, default=0) + 2


def _head_answers(q: Query, kb: KnowledgeBase, tuples) -> set:
    leaf = q.formula
    return extend_answers(q.answer, leaf.query.answer, tuples, kb.individuals)


def answer_query(
    q: Query,
    kb: KnowledgeBase,
    engine: str = "rewrite",
    only_tem: bool = False,
    oracle_depth: int | None = None,
    window: int | None = None,
) -> AnswerSet:
    variables = tuple(v.name for v in q.answer)
    if not kb.temporal:
        if q.is_temporal():
            raise ValidationError("temporal operators need a temporal knowledge base")
        if not isinstance(q.formula, Leaf):
            raise ValidationError("Boolean connectives need a temporal knowledge base; use a single NCQ")
        ncq = q.formula.query
        if engine == "oracle":
            found = oracle_atemporal(ncq, kb, oracle_depth)
        else:
            found = mwa_atemporal(ncq, kb)
        return AnswerSet(variables, {t: None for t in _head_answers(q, kb, found)}, False)
    if engine == "oracle":
        w = default_window(q, kb) if window is None else window
        pairs = oracle_temporal(q, kb, w, oracle_depth)
        points: dict = {}
        for tup, t in pairs:
            points.setdefault(tup, []).append(t)
        rows = {tup: IntervalSet.points(ts) for tup, ts in points.items()}
        answers = AnswerSet(variables, rows, True)
        if only_tem:
            answers = answers.restrict(IntervalSet.points(kb.tem))
        return answers
    return answer_intervals(q, kb, only_tem=only_tem)
