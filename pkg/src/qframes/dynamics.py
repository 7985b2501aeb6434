"""Energies of hybrid-system states and discrete Schrodinger dynamics on lattices.

The time step is the explicit forward difference

    i hbar (psi(t + dt) - psi(t)) / dt = H psi(t),   H = -hbar^2/(2 mass) lap + V

with the second-difference stencil ``lap``.  The step is not unitary: each
step grows the norm^2 by exactly ``(dt/hbar)^2 |H psi|^2``.  A dense
matrix-exponential propagator is available for comparison on small lattices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.linalg import expm

from .cauchy import NumeralSequence
from .errors import ImageMismatch, IndexOutOfRange, LatticeMismatch, LatticeTooLarge
from .frames import HybridTupleImage, Lattice, LatticeImage
from .numeral import NumeralState, pred_ulp, succ_ulp, trim, value

DEFAULT_SITE_CAP = 4096
BOUNDARIES = ("periodic", "fixed-zero")
ROLES = ("generic", "x", "t", "r", "i")


# ---------------------------------------------------------------------------
# energy models


@dataclass(frozen=True)
class EnergyModel:
    """Energy eigenvalue of a trimmed numeral state, times ``scale``."""

    name: str
    evaluator: Callable[[NumeralState], float]
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("energy scale must be positive")


def magnitude_model(scale: float = 1.0) -> EnergyModel:
    return EnergyModel("magnitude", lambda s: float(abs(value(s))), scale)


def digit_sum_model(scale: float = 1.0) -> EnergyModel:
    return EnergyModel("digit-sum", lambda s: float(sum(s.digits)), scale)


MODELS = {"magnitude": magnitude_model, "digit-sum": digit_sum_model}


def get_model(name: str, scale: float = 1.0) -> EnergyModel:
    try:
        return MODELS[name](scale)
    except KeyError:
        raise ValueError(f"unknown energy model {name!r}; choose from {sorted(MODELS)}") from None


def energy_of(a: NumeralState, model: EnergyModel) -> float:
    # defined on the trimmed form only, so padded representatives agree
    return model.scale * model.evaluator(trim(a))


def tuple_energy(t: HybridTupleImage, model: EnergyModel) -> float:
    """Sum of space-component energies; the time component carries none."""
    return math.fsum(energy_of(s, model) for s in t.space)


@dataclass(frozen=True)
class EnergyReport:
    energies: list[float]
    tail_start: int
    tail_spread: float
    tolerance: float
    status: str

    def to_record(self) -> dict:
        return {
            "status": self.status,
            "tail_start": self.tail_start,
            "tail_spread": self.tail_spread,
            "tolerance": self.tolerance,
            "energies": self.energies,
        }


def _monotone(xs: Sequence[float]) -> bool:
    diffs = [b - a for a, b in zip(xs, xs[1:])]
    return all(d >= 0 for d in diffs) or all(d <= 0 for d in diffs)


def energy_sequence(seq: NumeralSequence, model: EnergyModel, n_max: int = 32,
                    tail_start: Optional[int] = None, tol: Optional[float] = None) -> EnergyReport:
    """Energies E_n of the terms 0..n_max with a convergence flag.

    CONVERGENT when the tail spread max|E_j - E_h| (j, h >= tail_start) is
    within ``tol`` (default 2**-10 * scale).  DIVERGENT when the tail is
    monotone and its second half moves at least as far as its first half,
    i.e. there is no sign of settling.  INCONCLUSIVE otherwise.
    """
    tail_start = n_max // 2 if tail_start is None else tail_start
    tol = 2.0 ** -10 * model.scale if tol is None else tol
    energies = [energy_of(seq.state(n), model) for n in range(n_max + 1)]
    tail = energies[tail_start:]
    spread = max(tail) - min(tail)
    if spread <= tol:
        status = "CONVERGENT"
    else:
        half = len(tail) // 2
        first = abs(tail[half] - tail[0])
        second = abs(tail[-1] - tail[half])
        status = "DIVERGENT" if _monotone(tail) and second >= first > 0 else "INCONCLUSIVE"
    return EnergyReport(energies, tail_start, spread, tol, status)


# ---------------------------------------------------------------------------
# systems and Hamiltonians


@dataclass(frozen=True)
class HybridSystem:
    """A qukit string S_{j,k',L,m} viewed as a physical system.

    ``state`` is the internal rational-number state; ``h`` only tells
    otherwise identical systems apart.
    """

    k: int
    L: int
    m: int
    j: int = 0
    h: int = 0
    mass: float = 1.0
    energy_model: EnergyModel = field(default_factory=magnitude_model)
    role: str = "generic"
    state: Optional[NumeralState] = None

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if self.role not in ROLES:
            raise ValueError(f"role must be one of {ROLES}")
        if self.state is not None and self.state.k != self.k:
            raise LatticeMismatch(f"internal state has base {self.state.k}, system has base {self.k}")

    def internal_energy(self) -> float:
        return 0.0 if self.state is None else energy_of(self.state, self.energy_model)


def complex_pair(re: NumeralState, im: NumeralState, **kw) -> tuple[HybridSystem, HybridSystem]:
    """(S_r, S_i) holding the real and imaginary parts of a complex rational."""
    def make(s, role, h):
        return HybridSystem(s.k, s.L, s.m, h=h, role=role, state=s, **kw)

    return make(re, "r", 0), make(im, "i", 1)


@dataclass(frozen=True)
class HamiltonianSpec:
    mass: float = 1.0
    potential: Optional[Callable[[tuple[float, ...]], float]] = None
    hbar: float = 1.0

    def __post_init__(self):
        if not self.mass > 0 or not self.hbar > 0:
            raise ValueError("mass and hbar must be positive")


@dataclass
class WaveFunction:
    """Amplitudes Psi(x, t) on the space points of a lattice at one time slice."""

    lattice: Lattice
    amplitudes: np.ndarray
    boundary: str = "periodic"

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.shape != self.lattice.shape:
            a = a.reshape(self.lattice.shape)
        self.amplitudes = a
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}")

    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def flat(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)

    def __getitem__(self, idx) -> complex:
        return complex(self.amplitudes[tuple(idx)])


def locations(lat: Lattice) -> np.ndarray:
    """Float coordinates of every space point, shape (n_space, D), row-major order."""
    d = float(lat.delta)
    return np.array(list(lat.space_points()), dtype=float).reshape(-1, lat.D) * d


def potential_array(lat: Lattice, H: HamiltonianSpec) -> np.ndarray:
    if H.potential is None:
        return np.zeros(lat.n_space)
    return np.array([float(H.potential(tuple(x))) for x in locations(lat)])


def neighbor_tables(lat: Lattice, boundary: str) -> tuple[np.ndarray, np.ndarray]:
    """Flat indices of the +delta and -delta neighbors along each axis.

    Shape (D, n_space).  A missing neighbor (fixed-zero boundary) points to
    the sentinel index ``n_space``, which always holds amplitude 0.
    """
    N, M = lat.n_space, lat.M
    idx = np.array(list(lat.space_points()), dtype=np.int64).reshape(-1, lat.D)
    plus = np.empty((lat.D, N), dtype=np.int64)
    minus = np.empty((lat.D, N), dtype=np.int64)
    for z in range(lat.D):
        for table, step in ((plus, 1), (minus, -1)):
            moved = idx.copy()
            moved[:, z] += step
            outside = (moved[:, z] < 0) | (moved[:, z] >= M)
            if boundary == "periodic":
                moved[:, z] %= M
            else:
                moved[:, z] = np.clip(moved[:, z], 0, M - 1)
            flat = np.ravel_multi_index(tuple(moved.T), lat.shape)
            if boundary != "periodic":
                flat[outside] = N
            table[z] = flat
    return plus, minus


def _laplacian_flat(psi: np.ndarray, plus: np.ndarray, minus: np.ndarray, d2: float) -> np.ndarray:
    ext = np.append(psi, 0j)
    lap = np.zeros_like(psi)
    for z in range(plus.shape[0]):
        lap = lap + (ext[plus[z]] - 2.0 * psi + ext[minus[z]]) / d2
    return lap


def _hamiltonian_flat(psi, plus, minus, d2, V, kin) -> np.ndarray:
    return -kin * _laplacian_flat(psi, plus, minus, d2) + V * psi


def _step_flat(psi, plus, minus, d2, V, kin, dt, hbar):
    return psi - (1j * dt / hbar) * _hamiltonian_flat(psi, plus, minus, d2, V, kin)


def laplacian_fb(psi: WaveFunction, point: Sequence[int]) -> complex:
    """Forward-times-backward second difference at one space point."""
    lat = psi.lattice
    point = tuple(point)
    if len(point) != lat.D or any(not 0 <= l < lat.M for l in point):
        raise IndexOutOfRange(f"point {point} outside lattice of shape {lat.shape}")
    d2 = float(lat.delta) ** 2
    centre = psi[point]
    total = 0j
    for z in range(lat.D):
        nb = []
        for step in (1, -1):
            q = list(point)
            q[z] += step
            if 0 <= q[z] < lat.M:
                nb.append(psi[q])
            elif psi.boundary == "periodic":
                q[z] %= lat.M
                nb.append(psi[q])
            else:
                nb.append(0j)
        total += (nb[0] - 2 * centre + nb[1]) / d2
    return total


def apply_laplacian(psi: WaveFunction) -> np.ndarray:
    plus, minus = neighbor_tables(psi.lattice, psi.boundary)
    d2 = float(psi.lattice.delta) ** 2
    return _laplacian_flat(psi.flat(), plus, minus, d2).reshape(psi.lattice.shape)


def apply_hamiltonian(psi: WaveFunction, H: HamiltonianSpec) -> np.ndarray:
    lat = psi.lattice
    plus, minus = neighbor_tables(lat, psi.boundary)
    kin = H.hbar ** 2 / (2 * H.mass)
    out = _hamiltonian_flat(psi.flat(), plus, minus, float(lat.delta) ** 2, potential_array(lat, H), kin)
    return out.reshape(lat.shape)


def energy_expectation(psi: WaveFunction, H: HamiltonianSpec) -> float:
    hpsi = apply_hamiltonian(psi, H)
    return float(np.vdot(psi.amplitudes, hpsi).real / psi.norm2())


def schrodinger_step(psi: WaveFunction, H: HamiltonianSpec, dt: float) -> WaveFunction:
    if not dt > 0:
        raise ValueError("dt must be positive")
    new = psi.amplitudes - (1j * dt / H.hbar) * apply_hamiltonian(psi, H)
    return WaveFunction(psi.lattice, new, psi.boundary)


def dense_hamiltonian(lat: Lattice, H: HamiltonianSpec, boundary: str = "periodic",
                      site_cap: int = DEFAULT_SITE_CAP) -> np.ndarray:
    N = lat.n_space
    if N > site_cap:
        raise LatticeTooLarge(f"{N} sites exceeds the dense-matrix cap of {site_cap}")
    plus, minus = neighbor_tables(lat, boundary)
    d2 = float(lat.delta) ** 2
    kin = H.hbar ** 2 / (2 * H.mass)
    mat = np.diag(potential_array(lat, H) + kin * 2 * lat.D / d2).astype(complex)
    rows = np.arange(N)
    for z in range(lat.D):
        for table in (plus[z], minus[z]):
            ok = table < N
            np.add.at(mat, (rows[ok], table[ok]), -kin / d2)
    return mat


def unitary_propagator(lat: Lattice, H: HamiltonianSpec, dt: float, boundary: str = "periodic",
                       site_cap: int = DEFAULT_SITE_CAP) -> np.ndarray:
    """exp(-i dt H / hbar) as a dense matrix; a comparison reference only."""
    return expm(-1j * dt / H.hbar * dense_hamiltonian(lat, H, boundary, site_cap))


# ---------------------------------------------------------------------------
# evolution


@dataclass(frozen=True)
class StepRecord:
    step: int
    norm2: float
    energy: float
    max_amplitude: float
    norm2_growth_expected: float
    ref_norm2: Optional[float] = None
    ref_error: Optional[float] = None

    def to_record(self) -> dict:
        rec = {
            "step": self.step,
            "norm2": self.norm2,
            "energy": self.energy,
            "max_amplitude": self.max_amplitude,
            "norm2_growth_expected": self.norm2_growth_expected,
        }
        if self.ref_norm2 is not None:
            rec["ref_norm2"] = self.ref_norm2
            rec["ref_error"] = self.ref_error
        return rec


@dataclass
class Trajectory:
    lattice: Lattice
    states: list[np.ndarray]
    records: list[StepRecord]
    reference: Optional[list[np.ndarray]] = None

    def wavefunction(self, step: int, boundary: str = "periodic") -> WaveFunction:
        return WaveFunction(self.lattice, self.states[step], boundary)


def _diagnose(step, psi, hpsi, dt, hbar, ref=None) -> StepRecord:
    n2 = float(np.vdot(psi, psi).real)
    energy = float(np.vdot(psi, hpsi).real / n2) if n2 > 0 else 0.0
    growth = (dt / hbar) ** 2 * float(np.vdot(hpsi, hpsi).real)
    amax = float(np.max(np.abs(psi))) if psi.size else 0.0
    if ref is None:
        return StepRecord(step, n2, energy, amax, growth)
    return StepRecord(step, n2, energy, amax, growth,
                      float(np.vdot(ref, ref).real), float(np.linalg.norm(psi - ref)))


def _run(psi0: WaveFunction, H: HamiltonianSpec, dt: float, n_steps: int, plus, minus,
         unitary_reference: bool, site_cap: int) -> Trajectory:
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if not dt > 0:
        raise ValueError("dt must be positive")
    lat = psi0.lattice
    d2 = float(lat.delta) ** 2
    V = potential_array(lat, H)
    kin = H.hbar ** 2 / (2 * H.mass)
    U = unitary_propagator(lat, H, dt, psi0.boundary, site_cap) if unitary_reference else None
    psi = psi0.flat().copy()
    ref = psi.copy() if U is not None else None
    states, refs, records = [psi], ([ref] if U is not None else None), []
    for step in range(n_steps + 1):
        hpsi = _hamiltonian_flat(psi, plus, minus, d2, V, kin)
        records.append(_diagnose(step, psi, hpsi, dt, H.hbar, ref))
        if step == n_steps:
            break
        psi = psi - (1j * dt / H.hbar) * hpsi
        states.append(psi)
        if U is not None:
            ref = U @ ref
            refs.append(ref)
    shape = lat.shape
    return Trajectory(lat, [s.reshape(shape) for s in states], records,
                      None if refs is None else [r.reshape(shape) for r in refs])


def evolve(psi0: WaveFunction, H: HamiltonianSpec, dt: float, n_steps: int,
           unitary_reference: bool = False, site_cap: int = DEFAULT_SITE_CAP) -> Trajectory:
    """Repeat :func:`schrodinger_step`; record norm^2, <H> and max |psi| per step."""
    plus, minus = neighbor_tables(psi0.lattice, psi0.boundary)
    return _run(psi0, H, dt, n_steps, plus, minus, unitary_reference, site_cap)


# ---------------------------------------------------------------------------
# parent-frame (image) coordinates


def image_neighbor_tables(image: LatticeImage, boundary: str) -> tuple[np.ndarray, np.ndarray]:
    """Neighbor tables built from hybrid states: s_x +_A 1 and s_x -_A 1.

    A successor that leaves S_{k,L,m} (carry out of the string, or a
    negative predecessor) is off the lattice: periodic wraps it by M * delta,
    fixed-zero drops it.
    """
    lat = image.lattice
    N = lat.n_space
    span = lat.M * lat.delta
    plus = np.empty((lat.D, N), dtype=np.int64)
    minus = np.empty((lat.D, N), dtype=np.int64)

    def locate(states: list[NumeralState]) -> int:
        out = []
        for s in states:
            v = value(s)
            if s.L != lat.L or not 0 <= v < span:
                if boundary != "periodic":
                    return N
                v = v % span
                s = image.coordinate_state(int(v / lat.delta))
            out.append(image.coordinate_index(s))
        return int(np.ravel_multi_index(tuple(out), lat.shape))

    for i, sp in enumerate(lat.space_points()):
        states = list(image.space_image(sp))
        for z in range(lat.D):
            for table, move in ((plus, succ_ulp), (minus, pred_ulp)):
                moved = states.copy()
                moved[z] = move(states[z])
                table[z, i] = locate(moved)
    return plus, minus


@dataclass
class ImageTrajectory:
    """Amplitudes labelled by the space states of the parent-frame image."""

    image: LatticeImage
    labels: list[tuple[NumeralState, ...]]
    trajectory: Trajectory
    dt: float

    def amplitudes(self, step: int) -> dict[tuple[NumeralState, ...], complex]:
        flat = self.trajectory.states[step].reshape(-1)
        return {lab: complex(c) for lab, c in zip(self.labels, flat)}

    def time_label(self, step: int) -> Optional[NumeralState]:
        """The time hybrid state s_t for a step, when dt equals the lattice spacing."""
        lat = self.image.lattice
        if Fraction(self.dt).limit_denominator(lat.k ** (lat.m + 8)) == lat.delta and step < lat.M:
            return self.image.coordinate_state(step)
        return None


def image_evolution(psi0: WaveFunction, H: HamiltonianSpec, dt: float, n_steps: int,
                    image: LatticeImage, check: bool = True) -> ImageTrajectory:
    """Evolve in image labels; with ``check`` compare against :func:`evolve` exactly."""
    lat = psi0.lattice
    if image.lattice != lat:
        raise ImageMismatch("image was generated from a different lattice")
    plus, minus = image_neighbor_tables(image, psi0.boundary)
    traj = _run(psi0, H, dt, n_steps, plus, minus, False, DEFAULT_SITE_CAP)
    if check:
        direct = evolve(psi0, H, dt, n_steps)
        for a, b in zip(traj.states, direct.states):
            if not np.array_equal(a, b):
                raise ImageMismatch("image trajectory differs from the stage-j trajectory")
    labels = [image.space_image(sp) for sp in lat.space_points()]
    return ImageTrajectory(image, labels, traj, dt)


# ---------------------------------------------------------------------------
# initial states and potentials


def point_state(lat: Lattice, index: Sequence[int], boundary: str = "periodic") -> WaveFunction:
    a = np.zeros(lat.shape, dtype=complex)
    a[tuple(index)] = 1.0
    return WaveFunction(lat, a, boundary)


def plane_wave(lat: Lattice, q: Sequence[int], boundary: str = "periodic") -> WaveFunction:
    """exp(i kappa . x) with kappa_z = 2 pi q_z / (M delta), normalized."""
    q = tuple(q) if not isinstance(q, int) else (q,)
    x = locations(lat)
    span = lat.M * float(lat.delta)
    kappa = 2 * np.pi * np.asarray(q, dtype=float) / span
    a = np.exp(1j * (x @ kappa)) / math.sqrt(lat.n_space)
    return WaveFunction(lat, a, boundary)


def gaussian(lat: Lattice, center: Sequence[float], width: float, q: Sequence[int] | None = None,
             boundary: str = "periodic") -> WaveFunction:
    x = locations(lat)
    c = np.asarray(center, dtype=float)
    a = np.exp(-np.sum((x - c) ** 2, axis=1) / (4 * width ** 2)).astype(complex)
    if q is not None:
        span = lat.M * float(lat.delta)
        a = a * np.exp(1j * (x @ (2 * np.pi * np.asarray(q, dtype=float) / span)))
    a /= math.sqrt(float(np.vdot(a, a).real))
    return WaveFunction(lat, a, boundary)


def well_potential(depth: float, lo: float, hi: float) -> Callable[[tuple[float, ...]], float]:
    return lambda x: -depth if all(lo <= xi <= hi for xi in x) else 0.0


def harmonic_potential(stiffness: float, center: Sequence[float]) -> Callable[[tuple[float, ...]], float]:
    c = tuple(center)
    return lambda x: 0.5 * stiffness * sum((xi - ci) ** 2 for xi, ci in zip(x, c))


# ---------------------------------------------------------------------------
# two hybrid systems


@dataclass
class TwoSystemHamiltonian:
    """H = H_{0,1} + H_{0,2} + H_int on the product of two copies of a lattice.

    Each H_{0,i} is the kinetic stencil with that system's mass, the shared
    external potential, and the internal energy of the system's number
    state.  ``interaction(x1, x2)`` is an optional potential between the
    two positions.
    """

    systems: tuple[HybridSystem, HybridSystem]
    lattice: Lattice
    boundary: str = "periodic"
    potential: Optional[Callable[[tuple[float, ...]], float]] = None
    interaction: Optional[Callable[[tuple[float, ...], tuple[float, ...]], float]] = None
    hbar: float = 1.0
    site_cap: int = DEFAULT_SITE_CAP

    def single(self, i: int) -> np.ndarray:
        s = self.systems[i]
        spec = HamiltonianSpec(s.mass, self.potential, self.hbar)
        return dense_hamiltonian(self.lattice, spec, self.boundary, self.site_cap) + s.internal_energy() * np.eye(
            self.lattice.n_space
        )

    def interaction_array(self) -> np.ndarray:
        N = self.lattice.n_space
        if self.interaction is None:
            return np.zeros((N, N))
        x = locations(self.lattice)
        return np.array([[self.interaction(tuple(a), tuple(b)) for b in x] for a in x], dtype=float)

    def internal_energy(self) -> float:
        return self.systems[0].internal_energy() + self.systems[1].internal_energy()

    def apply(self, psi2: np.ndarray) -> np.ndarray:
        """H applied to a joint amplitude array of shape (n_space, n_space)."""
        return self.single(0) @ psi2 + psi2 @ self.single(1).T + self.interaction_array() * psi2

    def expectation(self, psi2: np.ndarray) -> float:
        return float(np.vdot(psi2, self.apply(psi2)).real / np.vdot(psi2, psi2).real)

    def matrix(self) -> np.ndarray:
        N = self.lattice.n_space
        if N * N > self.site_cap:
            raise LatticeTooLarge(f"{N * N} joint sites exceeds the dense-matrix cap of {self.site_cap}")
        eye = np.eye(N)
        return (np.kron(self.single(0), eye) + np.kron(eye, self.single(1))
                + np.diag(self.interaction_array().reshape(-1)))

    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix())


def two_system_hamiltonian(a: HybridSystem, b: HybridSystem, lattice: Lattice, interaction=None,
                           potential=None, boundary: str = "periodic", hbar: float = 1.0) -> TwoSystemHamiltonian:
    for s in (a, b):
        if s.j != lattice.frame.j:
            raise LatticeMismatch(f"system at stage {s.j} cannot move on a stage-{lattice.frame.j} lattice")
    roles = {a.role, b.role}
    if ("r" in roles or "i" in roles) and roles != {"r", "i"}:
        raise LatticeMismatch("real/imaginary role tags must come as an (r, i) pair")
    return TwoSystemHamiltonian((a, b), lattice, boundary, potential, interaction, hbar)
