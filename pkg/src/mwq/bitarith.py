"""Comparisons of time-stamp differences built only from bit, sign and overflow predicates.

A time stamp is held in sign-magnitude form: ``sign`` is true for non-negative
values and bit ``j`` (1 = least significant) is the j-th magnitude bit.  Adding a
constant ``d`` is unfolded into ``d`` successive increments whose effect on the
bits is described by first-order definitions; nothing here subtracts integers.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

RELATIONS = ("<", "<=", "=", ">=", ">")


def encode(values, n_bits: int):
    """Sign flags and magnitude bits (column j-1 holds bit j) for an array of integers."""
    values = np.asarray(values, dtype=np.int64)
    limit = (1 << n_bits) - 1
    if np.any(np.abs(values) > limit):
        raise ValidationError(f"value outside the {n_bits}-bit sign-magnitude range")
    sign = values >= 0
    mag = np.abs(values)
    bits = ((mag[..., None] >> np.arange(n_bits)) & 1).astype(bool)
    return sign, bits


def _lower_exists(flags):
    """For each j: is some lower position j' < j set?"""
    out = np.zeros_like(flags)
    if flags.shape[-1] > 1:
        out[..., 1:] = np.logical_or.accumulate(flags[..., :-1], axis=-1)
    return out


def add_step(sign, bits, ovf):
    """One unfolding of the inductive definitions: the predicates for t+d+1 from those for t+d."""
    is_one = bits[..., 0] & ~np.any(bits[..., 1:], axis=-1)
    new_sign = sign | is_one
    new_ovf = ovf | (sign & np.all(bits, axis=-1))
    inc = bits == _lower_exists(~bits)
    dec = bits == _lower_exists(bits)
    new_bits = (sign[..., None] & inc) | (~new_sign[..., None] & dec)
    return new_sign, new_bits, new_ovf


def bit_add(sign, bits, d: int):
    """Predicates sign^d, bit^d and ovf^d for a constant ``d >= 0``."""
    if d < 0:
        raise ValidationError("the added constant must be non-negative")
    ovf = np.zeros(np.shape(sign), dtype=bool)
    for _ in range(d):
        sign, bits, ovf = add_step(sign, bits, ovf)
    return sign, bits, ovf


def _equal(sa, ba, sb, bb):
    return (sa == sb) & np.all(ba == bb, axis=-1)


def _less(sa, ba, sb, bb):
    """a < b from signs and the most significant differing bit."""
    n = ba.shape[-1]
    same_above = np.ones(np.broadcast_shapes(sa.shape, sb.shape), dtype=bool)
    found = np.zeros_like(same_above)
    for j in range(n - 1, -1, -1):
        differ = ba[..., j] != bb[..., j]
        found |= same_above & differ & (bb[..., j] == sa)
        same_above &= ~differ
    return (~sa & sb) | ((sa == sb) & found)


def compare_encoded(sign_t2, bits_t2, sign_u, bits_u, ovf_u, relation: str):
    """Decide ``t' - t <relation> d`` given t' and the predicates for u = t + d."""
    eq = _equal(sign_t2, bits_t2, sign_u, bits_u)
    if relation == "=":
        return eq & ~ovf_u
    if relation == "<":
        return ovf_u | _less(sign_t2, bits_t2, sign_u, bits_u)
    if relation == "<=":
        return ovf_u | _less(sign_t2, bits_t2, sign_u, bits_u) | eq
    if relation == ">":
        return ~ovf_u & _less(sign_u, bits_u, sign_t2, bits_t2)
    if relation == ">=":
        return ~ovf_u & (_less(sign_u, bits_u, sign_t2, bits_t2) | eq)
    raise ValidationError(f"unknown relation {relation!r}")


def bit_compare(t: int, t2: int, relation: str, d: int, n_bits: int) -> bool:
    """Whether ``t2 - t <relation> d`` holds, decided on the bit encodings."""
    s1, b1 = encode([t], n_bits)
    s2, b2 = encode([t2], n_bits)
    su, bu, ou = bit_add(s1, b1, d)
    return bool(compare_encoded(s2, b2, su, bu, ou, relation)[0])


def overflows(t: int, d: int, n_bits: int) -> bool:
    s, b = encode([t], n_bits)
    return bool(bit_add(s, b, d)[2][0])


def emit_comparator_formula(relation: str, d: int, n_bits: int) -> str:
    """First-order definitions (one per line) expressing ``t' - t <relation> d``."""
    if relation not in RELATIONS:
        raise ValidationError(f"unknown relation {relation!r}")
    if d < 0:
        raise ValidationError("the constant must be non-negative")
    lines = [
        f"# bits j = 1..{n_bits}; sign(t) holds iff t >= 0",
        "ovf^0(t) := FALSE",
        "sign^0(t) := sign(t)",
        "bit^0(t,j) := bit(t,j)",
    ]
    for k in range(d):
        lines += [
            f"ovf^{k + 1}(t) := ovf^{k}(t) OR (sign^{k}(t) AND forall j. bit^{k}(t,j))",
            f"sign^{k + 1}(t) := sign^{k}(t) OR (forall j. (exists j'. j' < j) <-> NOT bit^{k}(t,j))",
            f"bit^{k + 1}(t,j) := (sign^{k}(t) AND (bit^{k}(t,j) <-> exists j'. j' < j AND NOT bit^{k}(t,j')))"
            f" OR (NOT sign^{k + 1}(t) AND (bit^{k}(t,j) <-> exists j'. j' < j AND bit^{k}(t,j')))",
        ]

    u_sign, u_bit = f"^{d}(t)", f"^{d}(t,j)"
    t2_sign, t2_bit = "(t')", "(t',j)"
    lt_t2_u = less_expr(t2_sign, t2_bit, u_sign, u_bit)
    lt_u_t2 = less_expr(u_sign, u_bit, t2_sign, t2_bit)
    eq = f"(sign(t') <-> sign^{d}(t)) AND forall j. (bit(t',j) <-> bit^{d}(t,j))"
    ovf = f"ovf^{d}(t)"
    body = {
        "=": f"{eq} AND NOT {ovf}",
        "<": f"{ovf} OR {lt_t2_u}",
        "<=": f"{ovf} OR {lt_t2_u} OR ({eq})",
        ">": f"NOT {ovf} AND {lt_u_t2}",
        ">=": f"NOT {ovf} AND ({lt_u_t2} OR ({eq}))",
    }[relation]
    lines.append(f"t' - t {relation} {d} := {body}")
    return "\n".join(lines) + "\n"


def less_expr(sign_a: str, bit_a: str, sign_b: str, bit_b: str) -> str:
    """Formula text for a < b; arguments are predicate suffixes such as ``(t')`` or ``^3(t,j)``."""

    def bit(suffix: str, var: str) -> str:
        return "bit" + suffix.replace(",j)", f",{var})")

    a_hi, b_hi = bit(bit_a, "j'"), bit(bit_b, "j'")
    a_j, b_j = bit(bit_a, "j"), bit(bit_b, "j")
    return (
        f"((NOT sign{sign_a} AND sign{sign_b}) OR ((sign{sign_a} <-> sign{sign_b}) AND exists j. "
        f"(forall j'. j' > j -> ({b_hi} <-> {a_hi})) "
        f"AND ({b_j} <-> sign{sign_a}) AND ({b_j} <-> NOT {a_j})))"
    )
