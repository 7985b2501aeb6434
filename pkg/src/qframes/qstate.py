"""Sparse superpositions over numeral basis states (a Fock-space vector).

Labels are :class:`NumeralState` objects compared as labels, so ``013-470``
and ``13-47`` are orthogonal keys even though they are arithmetically equal.
Amplitudes are ordinary machine complex numbers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional

import numpy as np

from .errors import BaseMismatch, DimensionMismatch, InvalidState
from .numeral import NumeralState, abs_A, cmp_A, power_state, sub_A

NORM_TOL = 1e-12
LOAD_NORM_TOL = 1e-6


class StringSuperposition:
    """Immutable map ``NumeralState -> complex`` sharing one base ``k``."""

    __slots__ = ("k", "_amps")

    def __init__(self, k: int, amplitudes: Mapping[NumeralState, complex] | Iterable[tuple[NumeralState, complex]] = ()):
        items = amplitudes.items() if isinstance(amplitudes, Mapping) else amplitudes
        amps: dict[NumeralState, complex] = {}
        for label, c in items:
            if label.k != k:
                raise BaseMismatch(f"label {label} has base {label.k}, superposition has base {k}")
            amps[label] = amps.get(label, 0j) + complex(c)
        self.k = k
        self._amps = {lab: c for lab, c in amps.items() if c != 0}

    @classmethod
    def basis(cls, state: NumeralState) -> "StringSuperposition":
        return cls(state.k, {state: 1.0})

    @classmethod
    def uniform(cls, states: Iterable[NumeralState]) -> "StringSuperposition":
        states = list(states)
        c = 1 / math.sqrt(len(states))
        return cls(states[0].k, [(s, c) for s in states])

    @property
    def amplitudes(self) -> dict[NumeralState, complex]:
        return dict(self._amps)

    def __getitem__(self, label: NumeralState) -> complex:
        return self._amps.get(label, 0j)

    def __iter__(self):
        return iter(self._amps)

    def __len__(self) -> int:
        return len(self._amps)

    def items(self):
        return self._amps.items()

    def norm2(self) -> float:
        return math.fsum(abs(c) ** 2 for c in self._amps.values())

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm2() - 1.0) <= tol

    def normalized(self) -> "StringSuperposition":
        n = math.sqrt(self.norm2())
        return StringSuperposition(self.k, {s: c / n for s, c in self._amps.items()})

    def is_basis(self) -> bool:
        return len(self._amps) == 1

    def single(self) -> NumeralState:
        """The label of a one-component state."""
        if len(self._amps) != 1:
            raise ValueError(f"not a basis state: {len(self._amps)} components")
        return next(iter(self._amps))

    def prune(self, tol: float) -> "StringSuperposition":
        return StringSuperposition(self.k, {s: c for s, c in self._amps.items() if abs(c) > tol})

    def __eq__(self, other) -> bool:
        return isinstance(other, StringSuperposition) and self.k == other.k and self._amps == other._amps

    def __repr__(self) -> str:
        from .numeral import format_compact

        terms = ", ".join(f"{format_compact(s)}: {c:.6g}" for s, c in sorted(self._amps.items(), key=_label_key))
        return f"StringSuperposition(k={self.k}, {{{terms}}})"

    def to_records(self) -> list[dict]:
        return [
            {"label": s.to_record(), "re": c.real, "im": c.imag}
            for s, c in sorted(self._amps.items(), key=_label_key)
        ]

    @classmethod
    def from_records(cls, records: list[dict], unnormalized: bool = False) -> "StringSuperposition":
        if not records:
            raise InvalidState("empty superposition")
        pairs = [(NumeralState.from_record(r["label"]), complex(r["re"], r["im"])) for r in records]
        out = cls(pairs[0][0].k, pairs)
        if not unnormalized and abs(out.norm2() - 1.0) > LOAD_NORM_TOL:
            raise InvalidState(f"norm^2 {out.norm2():.12g} deviates from 1 by more than {LOAD_NORM_TOL}")
        return out


def _label_key(item):
    s = item[0]
    return (s.L, s.m, s.gamma, s.digits)


def as_superposition(x) -> StringSuperposition:
    if isinstance(x, StringSuperposition):
        return x
    if isinstance(x, NumeralState):
        return StringSuperposition.basis(x)
    raise TypeError(f"expected a NumeralState or StringSuperposition, got {type(x).__name__}")


def _same_base(phi: StringSuperposition, psi: StringSuperposition) -> int:
    if phi.k != psi.k:
        raise BaseMismatch(f"base {phi.k} vs base {psi.k}")
    return phi.k


def inner_product(phi, psi) -> complex:
    phi, psi = as_superposition(phi), as_superposition(psi)
    _same_base(phi, psi)
    small, big = (phi, psi) if len(phi) <= len(psi) else (psi, phi)
    total = 0j
    for label in small:
        if label in big._amps:
            total += phi[label].conjugate() * psi[label]
    return total


def lift_arith(op: Callable[[NumeralState, NumeralState], NumeralState], phi, psi) -> StringSuperposition:
    """Apply a binary arithmetic operation basis-wise; colliding results add."""
    phi, psi = as_superposition(phi), as_superposition(psi)
    k = _same_base(phi, psi)
    out: dict[NumeralState, complex] = {}
    for a, ca in phi.items():
        for b, cb in psi.items():
            r = op(a, b)
            out[r] = out.get(r, 0j) + ca * cb
    return StringSuperposition(k, out)


def arith_close(a: NumeralState, b: NumeralState, ell: int) -> bool:
    """``|a -_A b|_A <=_A k**-ell`` evaluated on the digit strings."""
    return cmp_A(abs_A(sub_A(a, b)), power_state(a.k, -ell)) <= 0


def prob_arith_close(phi, psi, ell: int) -> float:
    """Probability that independent measurements of phi and psi land within k**-ell.

    Sums ``|c_a|^2 |d_b|^2`` over component pairs that pass the arithmetic
    closeness test; the joint measure is the product of the two Born
    distributions.
    """
    phi, psi = as_superposition(phi), as_superposition(psi)
    _same_base(phi, psi)
    if ell < 0:
        raise ValueError("precision exponent must be >= 0")
    hit = math.fsum(
        abs(ca) ** 2 * abs(cb) ** 2
        for a, ca in phi.items()
        for b, cb in psi.items()
        if arith_close(a, b, ell)
    )
    return min(1.0, hit / (phi.norm2() * psi.norm2()))


@dataclass(frozen=True)
class GaugeMap:
    """Uniform single-qukit unitary, with an optional sign-qubit unitary.

    This is a basis change acting identically on every digit position; it
    does not attempt the general gauge construction.
    """

    k: int
    U: np.ndarray
    sign_U: Optional[np.ndarray] = None
    tol: float = 1e-10

    def __post_init__(self):
        U = np.asarray(self.U, dtype=complex)
        object.__setattr__(self, "U", U)
        if U.shape != (self.k, self.k):
            raise DimensionMismatch(f"U has shape {U.shape}, expected ({self.k}, {self.k})")
        if not np.allclose(U.conj().T @ U, np.eye(self.k), atol=self.tol, rtol=0):
            raise InvalidState("U is not unitary")
        if self.sign_U is not None:
            S = np.asarray(self.sign_U, dtype=complex)
            object.__setattr__(self, "sign_U", S)
            if S.shape != (2, 2):
                raise DimensionMismatch(f"sign unitary has shape {S.shape}, expected (2, 2)")
            if not np.allclose(S.conj().T @ S, np.eye(2), atol=self.tol, rtol=0):
                raise InvalidState("sign unitary is not unitary")

    @classmethod
    def identity(cls, k: int) -> "GaugeMap":
        return cls(k, np.eye(k))

    def dagger(self) -> "GaugeMap":
        S = None if self.sign_U is None else self.sign_U.conj().T
        return GaugeMap(self.k, self.U.conj().T, S, self.tol)


def _expand_label(label: NumeralState, G: GaugeMap):
    """Yield (new label, amplitude) for G applied to one basis label."""
    partial = [((), 1.0 + 0j)]
    for d in label.digits:
        col = G.U[:, d]
        partial = [(ds + (e,), amp * col[e]) for ds, amp in partial for e in range(G.k) if col[e] != 0]
    if G.sign_U is None:
        signs = [(label.gamma, 1.0 + 0j)]
    else:
        col = G.sign_U[:, 0 if label.gamma == "+" else 1]
        signs = [(g, col[i]) for i, g in enumerate("+-") if col[i] != 0]
    for ds, amp in partial:
        for g, samp in signs:
            yield NumeralState(label.k, g, ds, label.m), amp * samp


def gauge_transform(psi, G: GaugeMap) -> StringSuperposition:
    psi = as_superposition(psi)
    if psi.k != G.k:
        raise DimensionMismatch(f"gauge map acts on base {G.k}, state has base {psi.k}")
    out: dict[NumeralState, complex] = {}
    for label, c in psi.items():
        for new, amp in _expand_label(label, G):
            out[new] = out.get(new, 0j) + c * amp
    return StringSuperposition(psi.k, out)


HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def fourier_gauge(k: int) -> GaugeMap:
    """The k-point discrete Fourier transform as a gauge choice."""
    w = np.exp(2j * np.pi / k)
    F = np.array([[w ** (a * b) for b in range(k)] for a in range(k)]) / math.sqrt(k)
    return GaugeMap(k, F)
