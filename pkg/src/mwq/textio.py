"""Text formats: knowledge bases, queries, CSV assertion data and answer output.

Knowledge base syntax, one statement per line (``#`` starts a comment)::

    BreastCancer EQV Cancer AND some findingSite . BreastStructure
    conv[120] ChemotherapyPatient SUB ChemotherapyPatient
    role hasPart SUB hasComponent
    ChemotherapyPatient(p1) @ 167
    diagnosedWith(p3,c3)
    (some diagnosedWith . Cancer)(p4)

Query syntax::

    q(x) := BOX[-90,0]{T(x)} AND NOT BOX[-180,0]{T(x)}
    q(x) := {dW(x,y), Cancer(y), not SkinStructure(y)}

Inside braces, bare identifiers are variables and quoted identifiers
(``'p1'``) are individual names.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass

from .answers import AnswerSet
from .errors import ParseError, SourceLocation, ValidationError
from .intervals import NEG_INF, POS_INF, DiamondOp, check_time, render_bound
from .kb import (
    BOT,
    CI,
    FRESH_PREFIX,
    RI,
    TOP,
    And,
    Bot,
    ComplexAssertion,
    ConceptAssertion,
    Diam,
    Exists,
    KnowledgeBase,
    Name,
    RoleAssertion,
    Top,
    has_diamond,
)
from .queries import (
    NCQ,
    AndF,
    Atom,
    Box,
    Dia,
    FalseF,
    Ind,
    Leaf,
    Next,
    Not,
    OrF,
    Prev,
    Query,
    Since,
    TimeInterval,
    TrueF,
    Until,
    Var,
    check_guarded,
)

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<assign>:=)
  | (?P<quoted>'[A-Za-z0-9_]+'|"[A-Za-z0-9_]+")
  | (?P<num>[-+]?\d+)
  | (?P<ninf>-inf\b)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<sym>[()\[\]{},.@])
    """,
    re.VERBOSE,
)

DIAMOND_KEYWORDS = {"diaP": "past", "diaF": "future", "diaPF": "anytime", "conv": "convex"}
KB_KEYWORDS = {"AND", "SUB", "EQV", "some", "role", "top", "bot", *DIAMOND_KEYWORDS}
QUERY_KEYWORDS = {"NOT", "AND", "OR", "U", "S", "BOX", "DIA", "NEXT", "PREV", "TRUE", "FALSE", "top", "bot"}


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    loc: SourceLocation


def tokenize(text: str, file: str = "<input>", line: int = 1) -> list[Token]:
    tokens = []
    pos = 0
    line_start = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            col = pos - line_start + 1
            raise ParseError(f"unexpected character {text[pos]!r}", SourceLocation(file, line, col))
        kind = m.lastgroup
        value = m.group()
        loc = SourceLocation(file, line, pos - line_start + 1)
        if kind == "ws":
            for i, ch in enumerate(value):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        else:
            tokens.append(Token(kind, value, loc))
        pos = m.end()
    return tokens


class _Cursor:
    def __init__(self, tokens: list[Token], end_loc: SourceLocation):
        self.tokens = tokens
        self.i = 0
        self.end_loc = end_loc

    def peek(self, k: int = 0) -> Token | None:
        j = self.i + k
        return self.tokens[j] if j < len(self.tokens) else None

    def loc(self) -> SourceLocation:
        tok = self.peek()
        return tok.loc if tok else self.end_loc

    def at(self, value: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.value == value and tok.kind in ("sym", "ident", "assign")

    def take(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.end_loc)
        self.i += 1
        return tok

    def expect(self, value: str) -> Token:
        tok = self.peek()
        if tok is None or tok.value != value:
            found = "end of input" if tok is None else repr(tok.value)
            raise ParseError(f"expected {value!r}, found {found}", self.loc())
        self.i += 1
        return tok

    def expect_kind(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            found = "end of input" if tok is None else repr(tok.value)
            raise ParseError(f"expected {what}, found {found}", self.loc())
        self.i += 1
        return tok

    def done(self) -> bool:
        return self.i >= len(self.tokens)


# ---------------------------------------------------------------- knowledge bases


def _name(cur: _Cursor, what: str) -> str:
    tok = cur.expect_kind("ident", what)
    if tok.value in KB_KEYWORDS:
        raise ParseError(f"keyword {tok.value!r} cannot be used as {what}", tok.loc)
    return tok.value


def _concept(cur: _Cursor):
    left = _unary(cur)
    while cur.at("AND"):
        cur.take()
        left = And(left, _unary(cur))
    return left


def _unary(cur: _Cursor):
    tok = cur.peek()
    if tok is None:
        raise ParseError("expected a concept", cur.end_loc)
    if tok.kind == "ident" and tok.value == "some":
        cur.take()
        role = _name(cur, "a role name")
        cur.expect(".")
        return Exists(role, _unary(cur))
    if tok.kind == "ident" and tok.value in DIAMOND_KEYWORDS:
        cur.take()
        if tok.value == "conv" and cur.at("["):
            cur.take()
            n_tok = cur.expect_kind("num", "a positive bound")
            cur.expect("]")
            n = int(n_tok.value)
            if n < 1:
                raise ParseError("conv[n] requires n >= 1", n_tok.loc)
            op = DiamondOp.convex_n(n)
        else:
            op = DiamondOp(DIAMOND_KEYWORDS[tok.value])
        return Diam(op, _unary(cur))
    if tok.kind == "ident" and tok.value == "top":
        cur.take()
        return Top()
    if tok.kind == "ident" and tok.value == "bot":
        cur.take()
        return Bot()
    if tok.value == "(":
        cur.take()
        c = _concept(cur)
        cur.expect(")")
        return c
    return Name(_name(cur, "a concept name"))


def _parse_time(cur: _Cursor) -> int:
    tok = cur.expect_kind("num", "an integer time point")
    try:
        return check_time(int(tok.value))
    except ValidationError as e:
        raise ValidationError(e.message, tok.loc) from None


def _parse_assertion(tokens: list[Token], end_loc: SourceLocation):
    """Split ``predicate(args) [@ t]`` and parse the predicate part."""
    time = None
    body = tokens
    at_idx = next((i for i, t in enumerate(tokens) if t.value == "@" and t.kind == "sym"), None)
    if at_idx is not None:
        stamp = _Cursor(tokens[at_idx + 1 :], end_loc)
        time = _parse_time(stamp)
        if not stamp.done():
            raise ParseError("unexpected tokens after time stamp", stamp.loc())
        body = tokens[:at_idx]
    if not body or body[-1].value != ")":
        raise ParseError("expected an axiom or an assertion", body[0].loc if body else end_loc)
    # the argument list is the last parenthesised group
    j = len(body) - 2
    args = []
    while j >= 0 and body[j].value != "(":
        args.append(body[j])
        j -= 1
    if j < 0:
        raise ParseError("unbalanced parentheses in assertion", body[-1].loc)
    args.reverse()
    names = [t for t in args if t.value != ","]
    if len(names) not in (1, 2) or any(t.kind != "ident" or t.value in KB_KEYWORDS for t in names):
        raise ParseError("assertion arguments must be one or two individual names", args[0].loc if args else body[j].loc)
    if len(names) == 2 and (len(args) != 3 or args[1].value != ","):
        raise ParseError("malformed argument list", args[0].loc)
    pred_tokens = body[:j]
    if not pred_tokens:
        raise ParseError("missing predicate", body[0].loc)
    inds = [t.value for t in names]
    if len(pred_tokens) == 1 and pred_tokens[0].kind == "ident":
        pred = pred_tokens[0]
        if len(inds) == 2:
            if pred.value in KB_KEYWORDS:
                raise ParseError(f"keyword {pred.value!r} cannot be a role name", pred.loc)
            return RoleAssertion(pred.value, inds[0], inds[1], time), pred.loc
        if pred.value in ("top", "bot"):
            return ConceptAssertion(pred.value, inds[0], time), pred.loc
        if pred.value in KB_KEYWORDS:
            raise ParseError(f"keyword {pred.value!r} cannot be a concept name", pred.loc)
        return ConceptAssertion(pred.value, inds[0], time), pred.loc
    if len(inds) != 1:
        raise ParseError("complex concepts take exactly one argument", pred_tokens[0].loc)
    cur = _Cursor(pred_tokens, body[j].loc)
    concept = _concept(cur)
    if not cur.done():
        raise ParseError("unexpected tokens in concept", cur.loc())
    if has_diamond(concept):
        raise ValidationError("diamonds are not allowed in assertions", pred_tokens[0].loc)
    if isinstance(concept, Name):
        return ConceptAssertion(concept.name, inds[0], time), pred_tokens[0].loc
    return ComplexAssertion(concept, inds[0], time), pred_tokens[0].loc


def parse_kb(text: str, file: str = "<kb>") -> KnowledgeBase:
    tbox = []
    abox = []
    locs = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0]
        if not line.strip():
            continue
        tokens = tokenize(line, file, lineno)
        end_loc = SourceLocation(file, lineno, len(line) + 1)
        if tokens[0].kind == "ident" and tokens[0].value == "role":
            cur = _Cursor(tokens[1:], end_loc)
            sub = _name(cur, "a role name")
            op = cur.take()
            if op.value not in ("SUB", "EQV"):
                raise ParseError("expected SUB or EQV", op.loc)
            sup = _name(cur, "a role name")
            if not cur.done():
                raise ParseError("unexpected tokens after role inclusion", cur.loc())
            tbox.append(RI(sub, sup))
            if op.value == "EQV":
                tbox.append(RI(sup, sub))
            continue
        split = next((i for i, t in enumerate(tokens) if t.kind == "ident" and t.value in ("SUB", "EQV")), None)
        if split is None:
            assertion, loc = _parse_assertion(tokens, end_loc)
            abox.append(assertion)
            locs.append(loc)
            continue
        lhs_cur = _Cursor(tokens[:split], tokens[split].loc)
        lhs = _concept(lhs_cur)
        if not lhs_cur.done():
            raise ParseError("unexpected tokens before SUB/EQV", lhs_cur.loc())
        rhs_cur = _Cursor(tokens[split + 1 :], end_loc)
        rhs = _concept(rhs_cur)
        if not rhs_cur.done():
            raise ParseError("unexpected tokens after concept", rhs_cur.loc())
        if has_diamond(rhs):
            raise ValidationError("diamonds may only occur on the left-hand side", tokens[split + 1].loc)
        if tokens[split].value == "EQV":
            if has_diamond(lhs):
                raise ValidationError("diamonds may only occur on the left-hand side", tokens[0].loc)
            tbox.extend([CI(lhs, rhs), CI(rhs, lhs)])
        else:
            tbox.append(CI(lhs, rhs))
    check_abox_modes(abox, locs)
    temporal = any(a.time is not None for a in abox) or any(
        isinstance(ax, CI) and (has_diamond(ax.lhs) or has_diamond(ax.rhs)) for ax in tbox
    )
    return KnowledgeBase(tuple(tbox), tuple(abox), temporal)


def check_abox_modes(abox, locs=None) -> None:
    timed = [a.time is not None for a in abox]
    if any(timed) and not all(timed):
        idx = timed.index(False) if timed[0] else timed.index(True)
        loc = locs[idx] if locs else None
        raise ValidationError("timed and untimed assertions cannot be mixed", loc)


def merge_data(kb: KnowledgeBase, assertions) -> KnowledgeBase:
    merged = kb.with_abox(assertions)
    check_abox_modes(merged.abox)
    return merged


def serialize_kb(kb: KnowledgeBase) -> str:
    lines = [str(ax) for ax in kb.tbox]
    lines += [str(a) for a in kb.abox]
    return "\n".join(lines) + ("\n" if lines else "")


def ingest_csv(text: str, file: str = "<csv>") -> list:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        return []
    header = [h.strip() for h in rows[0]]
    if header != ["kind", "predicate", "subject", "object", "time"]:
        raise ParseError("CSV header must be kind,predicate,subject,object,time", SourceLocation(file, 1, 1))
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        loc = SourceLocation(file, lineno, 1)
        if len(row) != 5:
            raise ParseError("expected 5 columns", loc)
        kind, pred, subj, obj, time_text = (c.strip() for c in row)
        time = None
        if time_text:
            try:
                time = check_time(int(time_text))
            except ValueError:
                raise ParseError(f"time {time_text!r} is not an integer", loc) from None
            except ValidationError as e:
                raise ValidationError(e.message, loc) from None
        for value in (pred, subj) + ((obj,) if obj else ()):
            if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", value):
                raise ParseError(f"invalid name {value!r}", loc)
        if kind == "concept":
            if obj:
                raise ParseError("concept rows must leave the object column empty", loc)
            out.append(ConceptAssertion(pred, subj, time))
        elif kind == "role":
            if not obj:
                raise ParseError("role rows need an object", loc)
            out.append(RoleAssertion(pred, subj, obj, time))
        else:
            raise ParseError(f"unknown kind {kind!r}", loc)
    check_abox_modes(out)
    return out


# ---------------------------------------------------------------- queries


def parse_query(text: str, file: str = "<query>") -> Query:
    lines = [ln.split("#", 1)[0] for ln in text.splitlines()]
    source = "\n".join(lines)
    tokens = tokenize(source, file)
    last_line = source.count("\n") + 1
    end_loc = SourceLocation(file, last_line, len(source.rsplit("\n", 1)[-1]) + 1)
    cur = _Cursor(tokens, end_loc)
    name = cur.expect_kind("ident", "a query name").value
    cur.expect("(")
    head: list[Var] = []
    while not cur.at(")"):
        tok = cur.expect_kind("ident", "an answer variable")
        var = Var(tok.value)
        if var in head:
            raise ValidationError(f"answer variable {tok.value} repeated", tok.loc)
        head.append(var)
        if not cur.at(")"):
            cur.expect(",")
    cur.expect(")")
    cur.expect(":=")
    parser = _FormulaParser(cur, tuple(head))
    formula = parser.formula()
    if not cur.done():
        raise ParseError(f"unexpected token {cur.peek().value!r}", cur.loc())
    return Query(name, tuple(head), formula)


class _FormulaParser:
    def __init__(self, cur: _Cursor, head: tuple[Var, ...]):
        self.cur = cur
        self.head = head

    def formula(self):
        left = self.conj()
        while self.cur.at("OR"):
            self.cur.take()
            left = OrF(left, self.conj())
        return left

    def conj(self):
        left = self.binary()
        while self.cur.at("AND"):
            self.cur.take()
            left = AndF(left, self.binary())
        return left

    def binary(self):
        left = self.unary()
        if self.cur.at("U") or self.cur.at("S"):
            op = self.cur.take()
            iv = self.interval(natural=True)
            right = self.unary()
            return Until(left, right, iv) if op.value == "U" else Since(left, right, iv)
        return left

    def unary(self):
        cur = self.cur
        if cur.at("NOT"):
            cur.take()
            return Not(self.unary())
        if cur.at("BOX") or cur.at("DIA"):
            op = cur.take()
            iv = self.interval(natural=False)
            sub = self.unary()
            return Box(iv, sub) if op.value == "BOX" else Dia(iv, sub)
        if cur.at("NEXT"):
            cur.take()
            return Next(self.unary())
        if cur.at("PREV"):
            cur.take()
            return Prev(self.unary())
        return self.primary()

    def primary(self):
        cur = self.cur
        tok = cur.peek()
        if tok is None:
            raise ParseError("expected a formula", cur.end_loc)
        if tok.value in ("TRUE", "top") and tok.kind == "ident":
            cur.take()
            return TrueF()
        if tok.value in ("FALSE", "bot") and tok.kind == "ident":
            cur.take()
            return FalseF()
        if tok.value == "(":
            cur.take()
            f = self.formula()
            cur.expect(")")
            return f
        if tok.value == "{":
            return Leaf(self.ncq())
        raise ParseError(f"expected a formula, found {tok.value!r}", tok.loc)

    def interval(self, natural: bool) -> TimeInterval:
        cur = self.cur
        start = cur.expect("[")
        lo = self.bound()
        cur.expect(",")
        hi = self.bound()
        cur.expect("]")
        if lo == POS_INF or hi == NEG_INF or lo > hi:
            raise ParseError(f"malformed interval [{render_bound(lo)},{render_bound(hi)}]", start.loc)
        if natural and lo < 0:
            raise ParseError("U and S intervals must lie within the naturals", start.loc)
        return TimeInterval(lo, hi)

    def bound(self):
        tok = self.cur.take()
        if tok.kind == "ninf":
            return NEG_INF
        if tok.kind == "ident" and tok.value == "inf":
            return POS_INF
        if tok.kind == "num":
            return int(tok.value)
        raise ParseError(f"expected an interval bound, found {tok.value!r}", tok.loc)

    def ncq(self) -> NCQ:
        cur = self.cur
        open_tok = cur.expect("{")
        atoms = []
        while True:
            atoms.append(self.atom())
            if cur.at("}"):
                break
            cur.expect(",")
        cur.expect("}")
        try:
            check_guarded(atoms)
        except ValidationError as e:
            raise ValidationError(e.message, open_tok.loc) from None
        variables = set()
        for a in atoms:
            variables |= a.variables()
        answer = tuple(v for v in self.head if v in variables)
        return NCQ(answer, frozenset(atoms))

    def atom(self) -> Atom:
        cur = self.cur
        positive = True
        if cur.at("not"):
            cur.take()
            positive = False
        pred_tok = cur.expect_kind("ident", "a predicate")
        if pred_tok.value.startswith(FRESH_PREFIX):
            raise ValidationError("reserved name in query", pred_tok.loc)
        cur.expect("(")
        args = [self.term()]
        if cur.at(","):
            cur.take()
            args.append(self.term())
        cur.expect(")")
        if len(args) == 2 and pred_tok.value in (TOP, BOT):
            raise ValidationError(f"{pred_tok.value} is a concept, not a role", pred_tok.loc)
        return Atom(pred_tok.value, tuple(args), positive)

    def term(self):
        tok = self.cur.take()
        if tok.kind == "quoted":
            return Ind(tok.value[1:-1])
        if tok.kind == "ident":
            return Var(tok.value)
        raise ParseError(f"expected a term, found {tok.value!r}", tok.loc)


# ---------------------------------------------------------------- answers


def write_answers(answers: AnswerSet, fmt: str = "json") -> str:
    rows = answers.sorted_rows()
    if fmt == "json":
        items = []
        for tup, ivs in rows:
            entry = {"tuple": list(tup)}
            if answers.temporal:
                entry["intervals"] = ivs.to_json()
            items.append(entry)
        return json.dumps({"answers": items}, separators=(",", ":"))
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = list(answers.variables)
        if answers.temporal:
            header += ["from", "to"]
        writer.writerow(header)
        for tup, ivs in rows:
            if answers.temporal:
                for lo, hi in ivs:
                    writer.writerow(list(tup) + [render_bound(lo), render_bound(hi)])
            else:
                writer.writerow(list(tup))
        return buf.getvalue()
    raise ValidationError(f"unknown answer format {fmt!r}")
