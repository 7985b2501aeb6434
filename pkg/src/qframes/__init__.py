"""Quantum numeral states, Cauchy-sequence reals, iterated frames and lattice dynamics."""
__version__ = "0.1.0"

from .errors import QFramesError
from .numeral import (
    ComplexNumeral,
    NumeralState,
    PeriodicExpansion,
    abs_A,
    add_A,
    cmp_A,
    convert_base,
    encode,
    eq_arith,
    format_compact,
    pad,
    parse_compact,
    pred_ulp,
    sub_A,
    succ_ulp,
    trim,
    value,
)
from .qstate import GaugeMap, StringSuperposition, inner_product, prob_arith_close
from .cauchy import NumeralSequence, Status, canonical, cauchy_prob, cauchy_test, equivalent
from .frames import FrameGraph, FrameId, Lattice, make_lattice, parent_image_lattice, visible
from .dynamics import HamiltonianSpec, WaveFunction, evolve, image_evolution, schrodinger_step

__all__ = [name for name in dir() if not name.startswith("_")]
