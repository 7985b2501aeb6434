"""Frame field, per-frame space-time lattices and their parent-frame images."""
from __future__ import annotations

import itertools
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

from .cauchy import RealRep, real_convert_base
from .errors import ImageMismatch, IndexOutOfRange, InvalidLattice, InvalidSpacing, UnknownFrame
from .numeral import NumeralState, value
from .qstate import GaugeMap

TOPOLOGIES = ("finite-chain", "one-way-infinite", "two-way-infinite", "cyclic")


@dataclass(frozen=True, order=True)
class FrameId:
    j: int
    k: int
    g: str = "g0"

    def __post_init__(self):
        if self.k < 2:
            raise InvalidLattice(f"frame base must be >= 2, got {self.k}")

    def to_record(self) -> dict:
        return {"j": self.j, "k": self.k, "g": self.g}


@dataclass
class FrameGraph:
    """Registry of frames plus the topology of the iteration-stage axis.

    ``one-way-infinite`` takes an ``anchor`` stage and a ``direction``:
    "descending" has a common ancestor at the anchor and no terminal stage,
    "ascending" has a terminal stage at the anchor and no common ancestor.
    """

    topology: str = "two-way-infinite"
    j_min: Optional[int] = None
    j_max: Optional[int] = None
    anchor: Optional[int] = None
    direction: Optional[str] = None
    period: Optional[int] = None
    frames: dict[FrameId, Optional[GaugeMap]] = field(default_factory=dict)

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise InvalidLattice(f"unknown topology {self.topology!r}")
        if self.topology == "finite-chain":
            if self.j_min is None or self.j_max is None or self.j_min > self.j_max:
                raise InvalidLattice("finite chain needs j_min <= j_max")
        if self.topology == "one-way-infinite":
            if self.anchor is None or self.direction not in ("descending", "ascending"):
                raise InvalidLattice("one-way-infinite needs an anchor and direction 'descending' or 'ascending'")
        if self.topology == "cyclic" and (self.period is None or self.period < 1):
            raise InvalidLattice("cyclic topology needs period >= 1")

    def allows_stage(self, j: int) -> bool:
        if self.topology == "finite-chain":
            return self.j_min <= j <= self.j_max
        if self.topology == "one-way-infinite":
            return j >= self.anchor if self.direction == "descending" else j <= self.anchor
        if self.topology == "cyclic":
            return 0 <= j < self.period
        return True

    def register(self, frame: FrameId, gauge: Optional[GaugeMap] = None) -> FrameId:
        if not self.allows_stage(frame.j):
            raise InvalidLattice(f"stage {frame.j} not allowed in {self.topology} topology")
        if gauge is not None and gauge.k != frame.k:
            raise InvalidLattice(f"gauge for base {gauge.k} bound to frame of base {frame.k}")
        self.frames[frame] = gauge
        return frame

    def __contains__(self, frame: FrameId) -> bool:
        return frame in self.frames

    def parent_stage(self, j: int) -> Optional[int]:
        if self.topology == "cyclic":
            return (j - 1) % self.period
        if not self.allows_stage(j - 1):
            return None
        return j - 1

    def ancestors(self, frame: FrameId) -> list[FrameId]:
        self._require(frame)
        return sorted(f for f in self.frames if f.j < frame.j)

    def descendants(self, frame: FrameId) -> list[FrameId]:
        self._require(frame)
        return sorted(f for f in self.frames if f.j > frame.j)

    def _require(self, frame: FrameId) -> None:
        if frame not in self.frames:
            raise UnknownFrame(f"frame {frame} is not registered")

    @classmethod
    def from_config(cls, cfg: dict) -> "FrameGraph":
        topo = dict(cfg.get("topology", {"kind": "two-way-infinite"}))
        kind = topo.pop("kind")
        graph = cls(topology=kind, **topo)
        for f in cfg.get("frames", []):
            graph.register(FrameId(int(f["j"]), int(f["k"]), str(f.get("g", "g0"))))
        return graph


def visible(observer: FrameId, target: FrameId, graph: FrameGraph) -> bool:
    """Descendants (and the observer's own stage) are visible; ancestors are not.

    Cyclic fields relax the rule: every stage is both ancestor and
    descendant, so everything is visible.
    """
    graph._require(observer)
    graph._require(target)
    if graph.topology == "cyclic":
        return True
    return target.j >= observer.j


# ---------------------------------------------------------------------------
# lattices


@dataclass(frozen=True)
class Lattice:
    frame: FrameId
    L: int
    m: int
    D: int = 1

    @property
    def k(self) -> int:
        return self.frame.k

    @property
    def M(self) -> int:
        return self.k ** self.L

    @property
    def delta(self) -> Fraction:
        return Fraction(1, self.k ** self.m)

    @property
    def n_space(self) -> int:
        return self.M ** self.D

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.M,) * self.D

    def space_points(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(range(self.M), repeat=self.D)

    def points(self) -> Iterator["LatticePoint"]:
        for t in range(self.M):
            for sp in self.space_points():
                yield LatticePoint(sp, t)

    def locations_1d(self) -> set[Fraction]:
        return {l * self.delta for l in range(self.M)}

    def nests_in(self, finer: "Lattice") -> bool:
        """Every coordinate value of this lattice is also one of ``finer``'s."""
        return self.locations_1d() <= finer.locations_1d()

    def to_record(self) -> dict:
        return {
            "frame": self.frame.to_record(),
            "k": self.k,
            "L": self.L,
            "m": self.m,
            "D": self.D,
            "M": self.M,
            "delta": str(self.delta),
            "space_points": self.n_space,
            "time_points": self.M,
        }


def make_lattice(frame, L: int, m: int, D: int = 1) -> Lattice:
    if isinstance(frame, int):
        frame = FrameId(0, frame)
    if L < 0:
        raise InvalidLattice(f"L must be >= 0, got {L}")
    if D < 1:
        raise InvalidLattice(f"D must be >= 1, got {D}")
    if not 0 <= m <= L:
        raise InvalidSpacing(f"m={m} must satisfy 0 <= m <= L={L}")
    return Lattice(frame, L, m, D)


@dataclass(frozen=True)
class LatticePoint:
    space: tuple[int, ...]
    time: int = 0

    def to_record(self) -> dict:
        return {"space": list(self.space), "time": self.time}


def _check_point(lat: Lattice, p: LatticePoint) -> None:
    if len(p.space) != lat.D:
        raise IndexOutOfRange(f"point has {len(p.space)} space indices, lattice has D={lat.D}")
    for l in (*p.space, p.time):
        if not 0 <= l < lat.M:
            raise IndexOutOfRange(f"index {l} outside [0, {lat.M})")


def point_location(lat: Lattice, p: LatticePoint) -> tuple[tuple[Fraction, ...], Fraction]:
    _check_point(lat, p)
    return tuple(l * lat.delta for l in p.space), p.time * lat.delta


# ---------------------------------------------------------------------------
# parent-frame images


def parent_image_number(a: NumeralState, parent_k: int) -> RealRep:
    """The stage j-1 view of a number value: a real in the parent's base."""
    return real_convert_base(a, parent_k)


def _prime_factors(n: int) -> set[int]:
    out, p = set(), 2
    while p * p <= n:
        while n % p == 0:
            out.add(p)
            n //= p
        p += 1
    if n > 1:
        out.add(n)
    return out


def base_images_constant(child_k: int, parent_k: int) -> bool:
    """True when every base-``child_k`` value has a constant image in base ``parent_k``."""
    return all(parent_k % p == 0 for p in _prime_factors(child_k))


@dataclass(frozen=True)
class HybridTupleImage:
    space: tuple[NumeralState, ...]
    time: NumeralState

    def location(self) -> tuple[tuple[Fraction, ...], Fraction]:
        return tuple(value(s) for s in self.space), value(self.time)

    def to_record(self) -> dict:
        from .numeral import format_compact

        return {"space": [format_compact(s) for s in self.space], "time": format_compact(self.time)}


class LatticeImage(Mapping):
    """Lazy bijection ``LatticePoint -> HybridTupleImage`` for one lattice.

    Each component is the state of S_{j-1,k,L,m} with exactly the lattice's
    L and m (never trimmed) whose value is the coordinate l * delta.
    """

    def __init__(self, lattice: Lattice):
        self.lattice = lattice

    def coordinate_state(self, l: int) -> NumeralState:
        lat = self.lattice
        if not 0 <= l < lat.M:
            raise IndexOutOfRange(f"index {l} outside [0, {lat.M})")
        digits = []
        for _ in range(lat.L):
            l, r = divmod(l, lat.k)
            digits.append(r)
        return NumeralState(lat.k, "+", tuple(digits), lat.m)

    def coordinate_index(self, s: NumeralState) -> int:
        """Inverse of :meth:`coordinate_state`, via the state's value."""
        lat = self.lattice
        if s.k != lat.k or s.L != lat.L or s.m != lat.m or s.gamma != "+":
            raise ImageMismatch(f"{s} is not a state of S_(k={lat.k}, L={lat.L}, m={lat.m})")
        l = value(s) / lat.delta
        if l.denominator != 1 or not 0 <= l < lat.M:
            raise ImageMismatch(f"{s} is not a location of the lattice")
        return int(l)

    def space_image(self, space: tuple[int, ...]) -> tuple[NumeralState, ...]:
        return tuple(self.coordinate_state(l) for l in space)

    def __getitem__(self, p: LatticePoint) -> HybridTupleImage:
        _check_point(self.lattice, p)
        return HybridTupleImage(self.space_image(p.space), self.coordinate_state(p.time))

    def inverse(self, image: HybridTupleImage) -> LatticePoint:
        return LatticePoint(tuple(self.coordinate_index(s) for s in image.space), self.coordinate_index(image.time))

    def __iter__(self):
        return self.lattice.points()

    def __len__(self) -> int:
        return self.lattice.n_space * self.lattice.M


def parent_image_lattice(lat: Lattice) -> LatticeImage:
    return LatticeImage(lat)
