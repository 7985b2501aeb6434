"""Request models for every command; shared by the HTTP service and the CLI."""
from __future__ import annotations

from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

Base = Annotated[int, Field(ge=2, le=36)]
NonNeg = Annotated[int, Field(ge=0)]


class Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class CommandRequest(Strict):
    seed: int = 0


# -- sequences ---------------------------------------------------------------


class ConstantSeq(Strict):
    family: Literal["constant"]
    state: str


class TruncationSeq(Strict):
    family: Literal["truncation"]
    value: str
    extra_zeros: NonNeg = 0


class AlternatingSeq(Strict):
    family: Literal["alternating"]
    a: str
    b: str


class SuperposedSeq(Strict):
    family: Literal["superposed"]
    weights: list[float] = Field(min_length=1)
    components: list[Union[ConstantSeq, TruncationSeq, AlternatingSeq]] = Field(min_length=1)

    @model_validator(mode="after")
    def _lengths(self):
        if len(self.weights) != len(self.components):
            raise ValueError("need one weight per component")
        return self


SequenceSpec = Annotated[
    Union[ConstantSeq, TruncationSeq, AlternatingSeq, SuperposedSeq], Field(discriminator="family")
]


# -- numeral-core --------------------------------------------------------------


class EncodeRequest(CommandRequest):
    k: Base
    text: Optional[str] = None
    value: Optional[str] = None

    @model_validator(mode="after")
    def _one_input(self):
        if (self.text is None) == (self.value is None):
            raise ValueError("give exactly one of text or value")
        return self


class ArithRequest(CommandRequest):
    k: Base
    op: Literal["add", "sub", "abs", "cmp", "eq", "succ", "pred", "trim", "pad"]
    a: str
    b: Optional[str] = None
    L: Optional[NonNeg] = None
    m: Optional[NonNeg] = None

    @model_validator(mode="after")
    def _operands(self):
        if self.op in ("add", "sub", "cmp", "eq") and self.b is None:
            raise ValueError(f"op {self.op} needs operand b")
        if self.op == "pad" and (self.L is None or self.m is None):
            raise ValueError("op pad needs L and m")
        return self


class ConvertRequest(CommandRequest):
    k: Base
    a: str
    to: Base
    prefix_digits: Optional[NonNeg] = None


# -- cauchy-engine -------------------------------------------------------------


class CauchyRequest(CommandRequest):
    k: Base
    mode: Literal["test", "prob", "canonical", "equivalent"] = "test"
    sequence: SequenceSpec
    other: Optional[SequenceSpec] = None
    ell_max: Annotated[int, Field(ge=1, le=64)] = 8
    p_max: Annotated[int, Field(ge=2, le=512)] = 32
    n: Optional[Annotated[int, Field(ge=0, le=256)]] = None

    @model_validator(mode="after")
    def _mode_args(self):
        if self.mode == "equivalent" and self.other is None:
            raise ValueError("mode equivalent needs an 'other' sequence")
        if self.mode == "canonical" and self.n is None:
            raise ValueError("mode canonical needs precision n")
        return self


# -- frame-field ---------------------------------------------------------------


class LatticeRequest(CommandRequest):
    k: Base
    L: Annotated[int, Field(ge=0, le=64)]
    m: int
    D: Annotated[int, Field(ge=1, le=8)] = 1
    j: int = 0
    g: str = "g0"


class ImageRequest(LatticeRequest):
    include_time: bool = True
    limit: Optional[Annotated[int, Field(ge=1)]] = None


class FrameSpec(Strict):
    j: int
    k: Base
    g: str = "g0"


class TopologySpec(Strict):
    kind: Literal["finite-chain", "one-way-infinite", "two-way-infinite", "cyclic"] = "two-way-infinite"
    j_min: Optional[int] = None
    j_max: Optional[int] = None
    anchor: Optional[int] = None
    direction: Optional[Literal["descending", "ascending"]] = None
    period: Optional[Annotated[int, Field(ge=1)]] = None


class VisibilityQuery(Strict):
    observer: FrameSpec
    target: FrameSpec


class FramesRequest(CommandRequest):
    topology: TopologySpec = TopologySpec()
    frames: list[FrameSpec] = Field(min_length=1)
    queries: Optional[list[VisibilityQuery]] = None


# -- hybrid-dynamics -----------------------------------------------------------


class LatticeShape(Strict):
    k: Base = 2
    L: Annotated[int, Field(ge=0, le=24)] = 4
    m: int = 0
    D: Annotated[int, Field(ge=1, le=4)] = 1


class PointInit(Strict):
    family: Literal["point"]
    index: list[NonNeg]


class PlaneWaveInit(Strict):
    family: Literal["plane-wave"]
    q: list[int]


class GaussianInit(Strict):
    family: Literal["gaussian"]
    center: list[float]
    width: Annotated[float, Field(gt=0)]
    q: Optional[list[int]] = None


class RandomInit(Strict):
    family: Literal["random"]


InitSpec = Annotated[Union[PointInit, PlaneWaveInit, GaussianInit, RandomInit], Field(discriminator="family")]


class ZeroPotential(Strict):
    family: Literal["zero"] = "zero"


class WellPotential(Strict):
    family: Literal["well"]
    depth: float
    lo: float
    hi: float


class HarmonicPotential(Strict):
    family: Literal["harmonic"]
    stiffness: float
    center: list[float]


PotentialSpec = Annotated[Union[ZeroPotential, WellPotential, HarmonicPotential], Field(discriminator="family")]


class EvolveRequest(CommandRequest):
    lattice: LatticeShape = LatticeShape()
    initial: InitSpec
    potential: PotentialSpec = ZeroPotential()
    dt: Annotated[float, Field(gt=0)] = 0.01
    steps: Annotated[int, Field(ge=1, le=100000)] = 10
    boundary: Literal["periodic", "fixed-zero"] = "periodic"
    mass: Annotated[float, Field(gt=0)] = 1.0
    hbar: Annotated[float, Field(gt=0)] = 1.0
    energy_model: Literal["magnitude", "digit-sum"] = "magnitude"
    unitary_reference: bool = False
    image_labels: bool = False
    dump_states: bool = False
    site_cap: Annotated[int, Field(ge=1)] = 4096


class EnergyRequest(CommandRequest):
    k: Base
    model: Literal["magnitude", "digit-sum"] = "magnitude"
    scale: Annotated[float, Field(gt=0)] = 1.0
    states: Optional[list[str]] = None
    tuple_states: Optional[list[str]] = None
    sequence: Optional[SequenceSpec] = None
    n_max: Annotated[int, Field(ge=2, le=512)] = 32

    @model_validator(mode="after")
    def _some_input(self):
        if self.states is None and self.tuple_states is None and self.sequence is None:
            raise ValueError("give states, tuple_states or sequence")
        return self


REQUESTS: dict[str, type[CommandRequest]] = {
    "encode": EncodeRequest,
    "arith": ArithRequest,
    "convert": ConvertRequest,
    "cauchy": CauchyRequest,
    "lattice": LatticeRequest,
    "image": ImageRequest,
    "evolve": EvolveRequest,
    "energy": EnergyRequest,
    "frames": FramesRequest,
}


class RunResponse(BaseModel):
    command: str
    records: list[dict]


class ErrorResponse(BaseModel):
    error: str
    detail: str
