"""Sequences of numeral states, Cauchy tests and real-number representatives.

The quantifiers "for every l there is a p such that for all j, h > p" cannot
be checked over infinite index sets, so every check here runs on a finite
window: l = 1..ell_max and indices 0..p_max.  Verdicts are three-valued.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .errors import BaseMismatch, NotCauchy
from .numeral import (
    ComplexNumeral,
    NumeralState,
    PeriodicExpansion,
    abs_A,
    cmp_A,
    convert_base,
    encode,
    is_initial_part,
    pad,
    power_state,
    sub_A,
    trim,
    truncate_fraction,
    value,
)
from .qstate import StringSuperposition, as_superposition, prob_arith_close

Term = Union[NumeralState, StringSuperposition]


class Status(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class NumeralSequence:
    """``n -> term`` for n >= 0, optionally with a declared Cauchy modulus.

    ``term`` must be pure.  ``modulus(ell)`` claims that all terms past index
    ``p = modulus(ell)`` lie within k**-ell of each other.
    """

    k: int
    term: Callable[[int], Term]
    modulus: Optional[Callable[[int], int]] = None
    name: str = "sequence"

    def __call__(self, n: int) -> StringSuperposition:
        t = as_superposition(self.term(n))
        if t.k != self.k:
            raise BaseMismatch(f"term {n} has base {t.k}, sequence has base {self.k}")
        return t

    def state(self, n: int) -> NumeralState:
        t = self.term(n)
        if isinstance(t, NumeralState):
            if t.k != self.k:
                raise BaseMismatch(f"term {n} has base {t.k}, sequence has base {self.k}")
            return t
        return as_superposition(t).single()

    def is_basis(self, n_max: int) -> bool:
        return all(self(n).is_basis() for n in range(n_max + 1))


# ---------------------------------------------------------------------------
# built-in families


def constant(state: NumeralState) -> NumeralSequence:
    return NumeralSequence(state.k, lambda n: state, modulus=lambda ell: 0, name="constant")


def truncation(v: Union[Fraction, str, int], k: int, extra_zeros: int = 0) -> NumeralSequence:
    """Term n keeps the first n base-k fractional digits of v (toward zero).

    Consecutive terms differ by less than k**-n, so ``p(ell) = ell`` is a
    valid modulus.  ``extra_zeros`` pads every term with trailing zeros
    without changing its value.
    """
    v = Fraction(v)
    sign = "-" if v < 0 else "+"
    mag = abs(v)
    ip = mag.numerator // mag.denominator

    def term(n: int) -> NumeralState:
        l = (mag * k ** n).numerator // (mag * k ** n).denominator
        digits = []
        while l:
            l, r = divmod(l, k)
            digits.append(r)
        width = n + len(_digits_of(ip, k))
        digits += [0] * (width - len(digits))
        digits = [0] * extra_zeros + digits
        return NumeralState(k, sign, tuple(digits), n + extra_zeros)

    return NumeralSequence(k, term, modulus=lambda ell: ell, name=f"truncation({v})")


def _digits_of(n: int, k: int) -> list[int]:
    out = []
    while n:
        n, r = divmod(n, k)
        out.append(r)
    return out


def alternating(a: NumeralState, b: NumeralState) -> NumeralSequence:
    if a.k != b.k:
        raise BaseMismatch(f"base {a.k} vs base {b.k}")
    return NumeralSequence(a.k, lambda n: a if n % 2 == 0 else b, name="alternating")


def superposed(weights: Sequence[complex], families: Sequence[NumeralSequence]) -> NumeralSequence:
    """Term n is ``sum_i w_i |family_i(n)>`` (families must give basis terms)."""
    if len(weights) != len(families) or not families:
        raise ValueError("need one weight per family")
    k = families[0].k
    for f in families:
        if f.k != k:
            raise BaseMismatch(f"base {f.k} vs base {k}")

    def term(n: int) -> StringSuperposition:
        return StringSuperposition(k, [(f.state(n), complex(w)) for w, f in zip(weights, families)])

    return NumeralSequence(k, term, name="superposed")


def difference(seq1: NumeralSequence, seq2: NumeralSequence) -> NumeralSequence:
    if seq1.k != seq2.k:
        raise BaseMismatch(f"base {seq1.k} vs base {seq2.k}")
    return NumeralSequence(seq1.k, lambda n: sub_A(seq1.state(n), seq2.state(n)), name="difference")


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class CauchyVerdict:
    status: Status
    ell_max: int
    p_max: int
    moduli: dict[int, int] = field(default_factory=dict)
    worst_deviation: Optional[Fraction] = None
    failed_ells: tuple[int, ...] = ()
    modulus_declared: bool = False

    def to_record(self) -> dict:
        return {
            "status": self.status.value,
            "ell_max": self.ell_max,
            "p_max": self.p_max,
            "moduli": {str(k): v for k, v in sorted(self.moduli.items())},
            "worst_deviation": None if self.worst_deviation is None else str(self.worst_deviation),
            "failed_ells": list(self.failed_ells),
            "modulus_declared": self.modulus_declared,
        }


@dataclass(frozen=True)
class ProbabilityEstimate:
    estimate: float
    ell_max: int
    p_max: int
    per_ell: dict[int, float] = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "estimate": self.estimate,
            "ell_max": self.ell_max,
            "p_max": self.p_max,
            "per_ell": {str(k): v for k, v in sorted(self.per_ell.items())},
        }


def p_candidates(p_max: int) -> range:
    """Indices p searched for a modulus; the verified tail must cover half the window."""
    return range(0, p_max // 2 + 1)


def _check_window(ell_max: int, p_max: int) -> None:
    if ell_max < 1 or p_max < 1:
        raise ValueError("ell_max and p_max must be >= 1")


def _deviation_table(states: list[NumeralState]) -> list[list[NumeralState]]:
    n = len(states)
    table = [[None] * n for _ in range(n)]
    for j in range(n):
        table[j][j] = abs_A(sub_A(states[j], states[j]))
        for h in range(j + 1, n):
            d = abs_A(sub_A(states[j], states[h]))
            table[j][h] = table[h][j] = d
    return table


def _tail_worst(table, p: int, p_max: int) -> NumeralState:
    worst = table[p_max][p_max]
    for j in range(p + 1, p_max + 1):
        for h in range(j + 1, p_max + 1):
            if cmp_A(table[j][h], worst) > 0:
                worst = table[j][h]
    return worst


def _verdict_from_tails(k: int, worst_after: Callable[[int], NumeralState], last_bad: Callable[[int], bool],
                        ell_max: int, p_max: int, declared: Optional[Callable[[int], int]]) -> CauchyVerdict:
    moduli: dict[int, int] = {}
    failed: list[int] = []
    undecided = False
    worst_seen: Optional[NumeralState] = None
    for ell in range(1, ell_max + 1):
        bound = power_state(k, -ell)
        if declared is not None:
            p = declared(ell)
            moduli[ell] = p
            if p >= p_max - 1:
                undecided = True
                continue
            w = worst_after(p)
            if cmp_A(w, bound) > 0:
                failed.append(ell)
            if worst_seen is None or cmp_A(w, worst_seen) > 0:
                worst_seen = w
            continue
        found = None
        for p in p_candidates(p_max):
            if cmp_A(worst_after(p), bound) <= 0:
                found = p
                break
        if found is None:
            if last_bad(ell):
                failed.append(ell)
            else:
                undecided = True
            continue
        moduli[ell] = found
        w = worst_after(found)
        if worst_seen is None or cmp_A(w, worst_seen) > 0:
            worst_seen = w
    if failed:
        status = Status.FAIL
    elif undecided:
        status = Status.INCONCLUSIVE
    else:
        status = Status.PASS
    worst = None if worst_seen is None else value(worst_seen)
    return CauchyVerdict(status, ell_max, p_max, moduli, worst, tuple(failed), declared is not None)


def cauchy_test(seq: NumeralSequence, ell_max: int, p_max: int) -> CauchyVerdict:
    """Check the Cauchy condition for basis-state terms on a finite window.

    With a declared modulus, each ``p = modulus(ell)`` is verified and any
    violating pair in (p, p_max] gives FAIL.  Without one, the smallest p in
    ``p_candidates`` whose tail is within k**-ell is searched; if none exists
    and the last two terms of the window still violate the bound the
    deviation fills the window and the verdict is FAIL, otherwise
    INCONCLUSIVE.
    """
    _check_window(ell_max, p_max)
    states = [seq.state(n) for n in range(p_max + 1)]
    table = _deviation_table(states)
    cache: dict[int, NumeralState] = {}

    def worst_after(p: int) -> NumeralState:
        if p not in cache:
            cache[p] = _tail_worst(table, p, p_max)
        return cache[p]

    def last_bad(ell: int) -> bool:
        return cmp_A(table[p_max - 1][p_max], power_state(seq.k, -ell)) > 0

    return _verdict_from_tails(seq.k, worst_after, last_bad, ell_max, p_max, seq.modulus)


def cauchy_prob(seq: NumeralSequence, ell_max: int, p_max: int) -> ProbabilityEstimate:
    """Truncated liminf_l limsup_p inf_{j,h>p} P_{j,h,l}.

    inf runs over j, h in (p, p_max], limsup becomes a max over
    ``p_candidates(p_max)`` and liminf a min over l <= ell_max.
    """
    _check_window(ell_max, p_max)
    terms = [seq(n) for n in range(p_max + 1)]
    per_ell: dict[int, float] = {}
    for ell in range(1, ell_max + 1):
        P = [[0.0] * (p_max + 1) for _ in range(p_max + 1)]
        for j in range(p_max + 1):
            for h in range(j, p_max + 1):
                P[j][h] = P[h][j] = prob_arith_close(terms[j], terms[h], ell)
        best = 0.0
        for p in p_candidates(p_max):
            inf = min(P[j][h] for j in range(p + 1, p_max + 1) for h in range(p + 1, p_max + 1))
            best = max(best, inf)
        per_ell[ell] = best
    return ProbabilityEstimate(min(per_ell.values()), ell_max, p_max, per_ell)


def equivalent(seq1: NumeralSequence, seq2: NumeralSequence, ell_max: int, p_max: int) -> CauchyVerdict:
    """Does the termwise difference seq1(n) -_A seq2(n) converge to 0 on the window?"""
    _check_window(ell_max, p_max)
    diff = difference(seq1, seq2)
    mags = [abs_A(diff.state(n)) for n in range(p_max + 1)]

    def worst_after(p: int) -> NumeralState:
        worst = mags[p_max]
        for n in range(p + 1, p_max + 1):
            if cmp_A(mags[n], worst) > 0:
                worst = mags[n]
        return worst

    def last_bad(ell: int) -> bool:
        return cmp_A(mags[p_max], power_state(seq1.k, -ell)) > 0

    return _verdict_from_tails(seq1.k, worst_after, last_bad, ell_max, p_max, None)


# ---------------------------------------------------------------------------
# canonical representatives


def _support(t: StringSuperposition) -> list[NumeralState]:
    return list(t)


def _stable_index(terms: list[StringSuperposition], k: int, ell: int, p_max: int) -> Optional[int]:
    """Smallest candidate p such that every component pair in the tail is within k**-ell."""
    bound = power_state(k, -ell)
    supports = [_support(t) for t in terms]
    # a tail is clean iff every pair of components taken from tail terms is close;
    # scan p downward from the largest candidate, growing the tail one term at a time
    clean_from = None
    tail: list[NumeralState] = []
    for p in range(p_max - 1, -1, -1):
        new = supports[p + 1]
        ok = all(cmp_A(abs_A(sub_A(a, b)), bound) <= 0 for a in new for b in tail + new)
        if not ok:
            break
        tail.extend(new)
        clean_from = p
    if clean_from is None:
        return None
    cands = p_candidates(p_max)
    if clean_from > cands[-1]:
        return None
    return clean_from


def default_window(n: int) -> int:
    return 2 * (n + 2) + 16


def canonical(seq: NumeralSequence, n: int, p_max: Optional[int] = None) -> NumeralState:
    """``n``-fractional-digit prefix of the canonical digit stream of ``seq``.

    Terms past the index that witnesses closeness k**-(n+1) are each cut to
    ``n`` fractional digits; the prefix is emitted only when all of them
    agree.  Otherwise the window cannot settle the digits and
    :class:`NotCauchy` is raised.
    """
    if n < 0:
        raise ValueError("precision must be >= 0")
    p_max = default_window(n) if p_max is None else p_max
    ell = n + 1
    if seq.modulus is not None and seq.modulus(ell) < p_max - 1:
        p = seq.modulus(ell)
        terms = [seq(i) for i in range(p + 1, p_max + 1)]
        bound = power_state(seq.k, -ell)
        comps = [c for t in terms for c in t]
        if any(cmp_A(abs_A(sub_A(a, b)), bound) > 0 for a in comps for b in comps):
            raise NotCauchy(f"declared modulus p({ell})={p} violated inside window {p_max}")
    else:
        all_terms = [seq(i) for i in range(p_max + 1)]
        p = _stable_index(all_terms, seq.k, ell, p_max)
        if p is None:
            raise NotCauchy(f"no index within window {p_max} makes terms agree to {seq.k}**-{ell}")
        comps = [c for t in all_terms[p + 1:] for c in t]
    cut = {truncate_fraction(c, n) for c in comps}
    if len(cut) != 1:
        # a limit sitting on a digit boundary: tail terms straddle it
        signs = {c.gamma for c in cut}
        raise NotCauchy(f"{len(cut)} distinct {n}-digit prefixes in the tail (signs {sorted(signs)})")
    return cut.pop()


# ---------------------------------------------------------------------------
# real and complex representatives


@dataclass(frozen=True)
class RealRep:
    """A real number as a canonical digit stream ``n -> n-digit prefix``.

    ``constant`` is True when the class holds a constant sequence of states,
    i.e. the value has a finite base-k expansion.
    """

    k: int
    generator: Callable[[int], NumeralState]
    provenance: str
    constant: bool = False
    expansion: Optional[Union[NumeralState, PeriodicExpansion]] = None

    def prefix(self, n: int) -> NumeralState:
        return self.generator(n)

    def check_prefix(self, n_max: int) -> bool:
        outs = [self.prefix(n) for n in range(n_max + 1)]
        return all(is_initial_part(outs[a], outs[b]) for a in range(n_max + 1) for b in range(a + 1, n_max + 1))

    def approx(self, n: int) -> Fraction:
        return value(self.prefix(n))


@dataclass(frozen=True)
class ComplexRep:
    re: RealRep
    im: RealRep

    def __post_init__(self):
        if self.re.k != self.im.k:
            raise BaseMismatch(f"base {self.re.k} vs base {self.im.k}")

    @property
    def k(self) -> int:
        return self.re.k

    def approx(self, n: int) -> complex:
        return complex(float(self.re.approx(n)), float(self.im.approx(n)))


def real_from_numeral(a: NumeralState) -> RealRep:
    t = trim(a)
    return RealRep(a.k, lambda n: truncate_fraction(t, n), "constant", True, t)


def complex_from_pair(p: ComplexNumeral) -> ComplexRep:
    return ComplexRep(real_from_numeral(p.re), real_from_numeral(p.im))


def real_from_sequence(seq: NumeralSequence, p_max: Optional[int] = None) -> RealRep:
    return RealRep(seq.k, lambda n: canonical(seq, n, p_max), "derived")


def real_convert_base(a: NumeralState, k: int) -> RealRep:
    conv = convert_base(a, k)
    if isinstance(conv, NumeralState):
        prov = "constant" if k == a.k else "converted"
        return RealRep(k, lambda n: truncate_fraction(conv, n), prov, True, conv)
    return RealRep(k, conv.truncate, "converted", False, conv)
