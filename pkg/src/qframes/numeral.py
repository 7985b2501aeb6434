"""Base-k numeral states |gamma, s>_{k,L,m} and their arithmetic.

A state is a sign, a digit string ``s(0..L-1)`` (index 0 is the least
significant digit) and the position ``m`` of the k-al point counted from the
right end.  Its value is ``gamma * sum(s(j) k**j) * k**-m``.

Arithmetic here works digit by digit on the strings themselves;
:func:`value` and :func:`encode` are the bridge to exact rationals and are
what the tests use as the independent oracle.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Union

from .errors import BaseMismatch, CannotAlign, InvalidState, NotRepresentable, ParseError

# Exact rationals in lowest terms; Fraction already normalizes sign and gcd.
RationalValue = Fraction

DIGIT_CHARS = "0123456789abcdefghijklmnopqrstuvwxyz"
_MINUS_CHARS = "-−"


@dataclass(frozen=True)
class NumeralState:
    """One basis state of a qukit string.

    Equality and hashing are *label* equality (k, sign, digits, m all equal),
    which is what makes padded forms distinct basis vectors.  Use
    :func:`eq_arith` for equality of values.
    """

    k: int
    gamma: str
    digits: tuple[int, ...]
    m: int = 0

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))
        if not isinstance(self.k, int) or self.k < 2:
            raise InvalidState(f"base must be an integer >= 2, got {self.k!r}")
        if self.gamma not in ("+", "-"):
            raise InvalidState(f"sign must be '+' or '-', got {self.gamma!r}")
        for d in self.digits:
            if not 0 <= d < self.k:
                raise InvalidState(f"digit {d} out of range for base {self.k}")
        if not 0 <= self.m <= len(self.digits):
            raise InvalidState(f"point position m={self.m} outside [0, {len(self.digits)}]")

    @property
    def L(self) -> int:
        return len(self.digits)

    @property
    def sign(self) -> int:
        return -1 if self.gamma == "-" else 1

    @property
    def integer(self) -> int:
        """The unsigned integer l = sum s(j) k**j."""
        out = 0
        for d in reversed(self.digits):
            out = out * self.k + d
        return out

    def is_zero(self) -> bool:
        return not any(self.digits)

    def __str__(self) -> str:
        return f"|{format_compact(self)}>_{self.k}"

    def to_record(self) -> dict:
        return {"k": self.k, "gamma": self.gamma, "digits": list(self.digits), "m": self.m}

    @classmethod
    def from_record(cls, rec: dict) -> "NumeralState":
        try:
            return cls(int(rec["k"]), str(rec["gamma"]), tuple(rec["digits"]), int(rec["m"]))
        except KeyError as exc:
            raise InvalidState(f"numeral record missing field {exc}") from None


@dataclass(frozen=True)
class ComplexNumeral:
    re: NumeralState
    im: NumeralState

    def __post_init__(self):
        if self.re.k != self.im.k:
            raise BaseMismatch(f"complex parts have bases {self.re.k} and {self.im.k}")

    @property
    def k(self) -> int:
        return self.re.k

    def value(self) -> tuple[Fraction, Fraction]:
        return value(self.re), value(self.im)


@dataclass(frozen=True)
class PeriodicExpansion:
    """Eventually periodic base-k expansion ``int . preperiod (period)``.

    ``integer_digits`` follows the package convention (index 0 = units digit).
    ``preperiod`` and ``period`` are fractional digits in reading order, the
    first entry being the k**-1 digit.
    """

    k: int
    gamma: str
    integer_digits: tuple[int, ...]
    preperiod: tuple[int, ...]
    period: tuple[int, ...] = field(default=())

    def fractional_digit(self, i: int) -> int:
        """Digit at position k**-(i+1)."""
        if i < len(self.preperiod):
            return self.preperiod[i]
        if not self.period:
            return 0
        return self.period[(i - len(self.preperiod)) % len(self.period)]

    def truncate(self, n: int) -> NumeralState:
        """State holding exactly ``n`` fractional digits, truncated toward zero."""
        frac = [self.fractional_digit(i) for i in range(n)]
        digits = tuple(reversed(frac)) + tuple(self.integer_digits)
        return NumeralState(self.k, self.gamma, digits, n)

    def value(self) -> Fraction:
        ip = 0
        for d in reversed(self.integer_digits):
            ip = ip * self.k + d
        pre = 0
        for d in self.preperiod:
            pre = pre * self.k + d
        out = Fraction(ip) + Fraction(pre, self.k ** len(self.preperiod))
        if self.period:
            per = 0
            for d in self.period:
                per = per * self.k + d
            out += Fraction(per, (self.k ** len(self.period) - 1) * self.k ** len(self.preperiod))
        return -out if self.gamma == "-" else out

    def __str__(self) -> str:
        ints = "".join(DIGIT_CHARS[d] for d in reversed(self.integer_digits)) or "0"
        pre = "".join(DIGIT_CHARS[d] for d in self.preperiod)
        per = "".join(DIGIT_CHARS[d] for d in self.period)
        sign = "-" if self.gamma == "-" else ""
        return f"{sign}{ints}.{pre}({per})" if per else f"{sign}{ints}.{pre}"

    def to_record(self) -> dict:
        return {
            "k": self.k,
            "gamma": self.gamma,
            "integer_digits": list(self.integer_digits),
            "preperiod": list(self.preperiod),
            "period": list(self.period),
        }


# ---------------------------------------------------------------------------
# rational bridge


def value(a: NumeralState) -> Fraction:
    return Fraction(a.sign * a.integer, a.k ** a.m)


def _int_digits(n: int, k: int) -> list[int]:
    """Base-k digits of n >= 0, least significant first; [] for 0."""
    out = []
    while n:
        n, r = divmod(n, k)
        out.append(r)
    return out


def representable(v: Fraction, k: int) -> bool:
    """True when every prime factor of v's denominator divides k."""
    d = Fraction(v).denominator
    g = gcd(d, k)
    while g > 1:
        while d % g == 0:
            d //= g
        g = gcd(d, k)
    return d == 1


def encode(v: Union[Fraction, int, str], k: int) -> NumeralState:
    """Shortest state of base ``k`` whose value is ``v``."""
    v = Fraction(v)
    if k < 2:
        raise InvalidState(f"base must be >= 2, got {k}")
    if not representable(v, k):
        raise NotRepresentable(f"{v} has no finite base-{k} expansion")
    if v == 0:
        return NumeralState(k, "+", (0,), 0)
    m = 0
    scale = 1
    while (abs(v) * scale).denominator != 1:
        m += 1
        scale *= k
    l = int(abs(v) * scale)
    digits = _int_digits(l, k)
    digits += [0] * (max(m, len(digits)) - len(digits))
    return NumeralState(k, "-" if v < 0 else "+", tuple(digits), m)


# ---------------------------------------------------------------------------
# shape changes


def trim(a: NumeralState) -> NumeralState:
    """Drop leading and trailing zeros; zero becomes ``0+``."""
    digits = list(a.digits)
    m = a.m
    while m > 0 and digits and digits[0] == 0:
        digits.pop(0)
        m -= 1
    while len(digits) > m and digits and digits[-1] == 0:
        digits.pop()
    if not any(digits):
        return NumeralState(a.k, "+", (0,), 0)
    return NumeralState(a.k, a.gamma, tuple(digits), m)


def pad(a: NumeralState, L: int, m: int) -> NumeralState:
    """Arithmetically equal state with exactly length ``L`` and point ``m``."""
    t = trim(a)
    if m < t.m:
        raise CannotAlign(f"cannot place point at {m}: value needs {t.m} fractional digits")
    low = [0] * (m - t.m)
    digits = low + list(t.digits)
    if t.is_zero():
        digits = low
    while len(digits) > L and digits[-1] == 0:
        digits.pop()
    if len(digits) > L or m > L:
        raise CannotAlign(f"value does not fit in length {L} with point {m}")
    digits += [0] * (L - len(digits))
    return NumeralState(a.k, t.gamma, tuple(digits), m)


def _check_base(a: NumeralState, b: NumeralState) -> int:
    if a.k != b.k:
        raise BaseMismatch(f"base {a.k} vs base {b.k}")
    return a.k


def _aligned(a: NumeralState, b: NumeralState) -> tuple[list[int], list[int], int]:
    """Digit lists of equal length sharing the point position."""
    m = max(a.m, b.m)
    ip = max(a.L - a.m, b.L - b.m)

    def shift(x: NumeralState) -> list[int]:
        ds = [0] * (m - x.m) + list(x.digits)
        return ds + [0] * (m + ip - len(ds))

    return shift(a), shift(b), m


def _mag_cmp(x: list[int], y: list[int]) -> int:
    for dx, dy in zip(reversed(x), reversed(y)):
        if dx != dy:
            return 1 if dx > dy else -1
    return 0


def _mag_add(x: list[int], y: list[int], k: int) -> list[int]:
    out, carry = [], 0
    for dx, dy in zip(x, y):
        carry, d = divmod(dx + dy + carry, k)
        out.append(d)
    if carry:
        out.append(carry)
    return out


def _mag_sub(x: list[int], y: list[int], k: int) -> list[int]:
    # requires x >= y
    out, borrow = [], 0
    for dx, dy in zip(x, y):
        d = dx - dy - borrow
        borrow = 1 if d < 0 else 0
        out.append(d + k * borrow)
    return out


def _signed_add(k: int, sa: str, x: list[int], sb: str, y: list[int]) -> tuple[str, list[int]]:
    if sa == sb:
        return sa, _mag_add(x, y, k)
    c = _mag_cmp(x, y)
    if c == 0:
        return "+", [0] * len(x)
    if c > 0:
        return sa, _mag_sub(x, y, k)
    return sb, _mag_sub(y, x, k)


# ---------------------------------------------------------------------------
# arithmetic (subscript A)


def add_A(a: NumeralState, b: NumeralState) -> NumeralState:
    k = _check_base(a, b)
    x, y, m = _aligned(a, b)
    g, ds = _signed_add(k, a.gamma, x, b.gamma, y)
    return trim(NumeralState(k, g, tuple(ds), m))


def negate(a: NumeralState) -> NumeralState:
    return NumeralState(a.k, "-" if a.gamma == "+" else "+", a.digits, a.m)


def sub_A(a: NumeralState, b: NumeralState) -> NumeralState:
    return add_A(a, negate(b))


def abs_A(a: NumeralState) -> NumeralState:
    return trim(NumeralState(a.k, "+", a.digits, a.m))


def cmp_A(a: NumeralState, b: NumeralState) -> int:
    """-1, 0 or 1 as value(a) is less than, equal to or greater than value(b)."""
    _check_base(a, b)
    x, y, _ = _aligned(a, b)
    sa = 0 if not any(x) else a.sign
    sb = 0 if not any(y) else b.sign
    if sa != sb:
        return 1 if sa > sb else -1
    if sa == 0:
        return 0
    return sa * _mag_cmp(x, y)


def eq_arith(a: NumeralState, b: NumeralState) -> bool:
    return cmp_A(a, b) == 0


def le_A(a: NumeralState, b: NumeralState) -> bool:
    return cmp_A(a, b) <= 0


def power_state(k: int, exponent: int) -> NumeralState:
    """The state ``|+, e>`` whose value is k**e, e.g. 0.01 for k**-2."""
    if exponent >= 0:
        return NumeralState(k, "+", (0,) * exponent + (1,), 0)
    return NumeralState(k, "+", (1,) + (0,) * (-exponent - 1), -exponent)


def _ulp_step(a: NumeralState, direction: int) -> NumeralState:
    # signed add of one unit at digit 0; L and m kept unless a carry grows L
    mag = list(a.digits) or [0]
    unit = [1] + [0] * (len(mag) - 1)
    gamma, out = _signed_add(a.k, a.gamma, mag, "+" if direction > 0 else "-", unit)
    return NumeralState(a.k, gamma, tuple(out), a.m)


def succ_ulp(a: NumeralState) -> NumeralState:
    """``a +_A 1``: add one unit in the last place (k**-m), keeping the shape."""
    return _ulp_step(a, +1)


def pred_ulp(a: NumeralState) -> NumeralState:
    return _ulp_step(a, -1)


def truncate_fraction(a: NumeralState, n: int) -> NumeralState:
    """Keep ``n`` fractional digits (dropping or zero-filling), integer part trimmed.

    Truncation is toward zero, digit-wise; the sign is kept even when the
    result is zero so that streams of prefixes stay consistent.
    """
    ints = list(a.digits[a.m:])
    while ints and ints[-1] == 0:
        ints.pop()
    frac = list(a.digits[: a.m])  # least significant first
    if n <= len(frac):
        frac = frac[len(frac) - n:]
    else:
        frac = [0] * (n - len(frac)) + frac
    return NumeralState(a.k, a.gamma, tuple(frac + ints), n)


def is_initial_part(a: NumeralState, b: NumeralState) -> bool:
    """True when ``a``'s digit string, read from the left, begins ``b``'s."""
    if a.k != b.k or a.gamma != b.gamma:
        return False
    if a.L - a.m != b.L - b.m or a.m > b.m:
        return False
    return b.digits[b.m - a.m:] == a.digits


# ---------------------------------------------------------------------------
# base conversion


def convert_base(a: NumeralState, k: int) -> Union[NumeralState, PeriodicExpansion]:
    """Re-express value(a) in base ``k``: a state if finite, else a periodic expansion."""
    if k < 2:
        raise InvalidState(f"target base must be >= 2, got {k}")
    if k == a.k:
        return trim(a)
    v = value(a)
    if representable(v, k):
        return encode(v, k)
    gamma = "-" if v < 0 else "+"
    v = abs(v)
    ip = v.numerator // v.denominator
    r, d = v.numerator - ip * v.denominator, v.denominator
    seen: dict[int, int] = {}
    frac: list[int] = []
    while r not in seen:
        seen[r] = len(frac)
        q, r = divmod(r * k, d)
        frac.append(q)
    start = seen[r]
    return PeriodicExpansion(k, gamma, tuple(_int_digits(ip, k)), tuple(frac[:start]), tuple(frac[start:]))


# ---------------------------------------------------------------------------
# compact text form


def format_compact(a: NumeralState) -> str:
    if a.k > len(DIGIT_CHARS):
        raise ParseError(f"compact form supports bases up to {len(DIGIT_CHARS)}")
    text = "".join(DIGIT_CHARS[d] for d in reversed(a.digits))
    cut = a.L - a.m
    return text[:cut] + a.gamma + text[cut:]


def parse_compact(text: str, k: int) -> NumeralState:
    """Parse ``digits* sign digits*``; the sign sits at the k-al point."""
    text = text.strip()
    signs = [i for i, ch in enumerate(text) if ch == "+" or ch in _MINUS_CHARS]
    if len(signs) != 1:
        raise ParseError(f"expected exactly one sign in {text!r}, found {len(signs)}")
    if not 2 <= k <= len(DIGIT_CHARS):
        raise ParseError(f"compact form needs 2 <= k <= {len(DIGIT_CHARS)}, got {k}")
    pos = signs[0]
    body = text[:pos] + text[pos + 1:]
    digits = []
    for ch in reversed(body.lower()):
        d = DIGIT_CHARS.find(ch)
        if d < 0 or d >= k:
            raise ParseError(f"invalid digit {ch!r} for base {k} in {text!r}")
        digits.append(d)
    gamma = "+" if text[pos] == "+" else "-"
    return NumeralState(k, gamma, tuple(digits), len(text) - pos - 1)


def all_states(k: int, L: int, m: int | None = None) -> Iterable[NumeralState]:
    """Every basis state of shape (k, L, m), both signs; all m when ``m`` is None."""
    from itertools import product

    ms = range(L + 1) if m is None else (m,)
    for mm in ms:
        for ds in product(range(k), repeat=L):
            for g in "+-":
                yield NumeralState(k, g, ds, mm)
