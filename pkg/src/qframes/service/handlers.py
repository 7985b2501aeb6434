"""Command dispatch: validated request in, list of JSON-ready records out.

Both the HTTP app and the CLI go through :func:`run_command`, so a command
produces the same records however it is invoked.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable

import numpy as np
from pydantic import ValidationError

from .. import cauchy as ce
from .. import dynamics as dyn
from .. import frames as ff
from ..errors import IndexOutOfRange, ParseError
from ..numeral import (
    NumeralState,
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
from . import schemas as sc


class ConfigError(Exception):
    """Request rejected before dispatch (unknown keys, bad ranges, unknown command)."""


def _frac(v: Fraction) -> str:
    return str(v)


def _parse_value(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {text!r}") from None


def state_record(s: NumeralState) -> dict:
    return {
        "state": format_compact(s),
        "k": s.k,
        "gamma": s.gamma,
        "digits": list(s.digits),
        "L": s.L,
        "m": s.m,
        "value": _frac(value(s)),
    }


# ---------------------------------------------------------------------------


def _encode(req: sc.EncodeRequest) -> list[dict]:
    if req.text is not None:
        s = parse_compact(req.text, req.k)
    else:
        s = encode(_parse_value(req.value), req.k)
    rec = state_record(s)
    rec["trimmed"] = format_compact(trim(s))
    return [rec]


_BINARY = {"add": add_A, "sub": sub_A}


def _arith(req: sc.ArithRequest) -> list[dict]:
    a = parse_compact(req.a, req.k)
    b = parse_compact(req.b, req.k) if req.b is not None else None
    rec: dict = {"op": req.op, "a": req.a}
    if b is not None:
        rec["b"] = req.b
    if req.op in _BINARY:
        res = _BINARY[req.op](a, b)
    elif req.op == "abs":
        res = abs_A(a)
    elif req.op == "succ":
        res = succ_ulp(a)
    elif req.op == "pred":
        res = pred_ulp(a)
    elif req.op == "trim":
        res = trim(a)
    elif req.op == "pad":
        res = pad(a, req.L, req.m)
    elif req.op == "cmp":
        rec["result"] = cmp_A(a, b)
        return [rec]
    else:
        rec["result"] = eq_arith(a, b)
        return [rec]
    rec["result"] = format_compact(res)
    rec["value"] = _frac(value(res))
    return [rec]


def _convert(req: sc.ConvertRequest) -> list[dict]:
    a = parse_compact(req.a, req.k)
    out = convert_base(a, req.to)
    if isinstance(out, NumeralState):
        rec = {"kind": "finite", **state_record(out)}
    else:
        rec = {
            "kind": "periodic",
            "k": out.k,
            "gamma": out.gamma,
            "text": str(out),
            "integer_digits": list(out.integer_digits),
            "preperiod": list(out.preperiod),
            "period": list(out.period),
            "value": _frac(out.value()),
        }
    if req.prefix_digits is not None:
        rep = ce.real_convert_base(a, req.to)
        rec["prefix"] = format_compact(rep.prefix(req.prefix_digits))
    return [rec]


def build_sequence(spec, k: int) -> ce.NumeralSequence:
    if isinstance(spec, sc.ConstantSeq):
        return ce.constant(parse_compact(spec.state, k))
    if isinstance(spec, sc.TruncationSeq):
        return ce.truncation(_parse_value(spec.value), k, spec.extra_zeros)
    if isinstance(spec, sc.AlternatingSeq):
        return ce.alternating(parse_compact(spec.a, k), parse_compact(spec.b, k))
    return ce.superposed(spec.weights, [build_sequence(c, k) for c in spec.components])


def _cauchy(req: sc.CauchyRequest) -> list[dict]:
    seq = build_sequence(req.sequence, req.k)
    if req.mode == "test":
        return [{"mode": "test", **ce.cauchy_test(seq, req.ell_max, req.p_max).to_record()}]
    if req.mode == "prob":
        return [{"mode": "prob", **ce.cauchy_prob(seq, req.ell_max, req.p_max).to_record()}]
    if req.mode == "equivalent":
        other = build_sequence(req.other, req.k)
        return [{"mode": "equivalent", **ce.equivalent(seq, other, req.ell_max, req.p_max).to_record()}]
    out = []
    p_max = None if "p_max" not in req.model_fields_set else req.p_max
    for n in range(req.n + 1):
        s = ce.canonical(seq, n, p_max)
        out.append({"mode": "canonical", "n": n, **state_record(s), **({"p_max": p_max} if p_max else {})})
    return out


def _lattice_from(req) -> ff.Lattice:
    return ff.make_lattice(ff.FrameId(req.j, req.k, req.g), req.L, req.m, req.D)


def _lattice(req: sc.LatticeRequest) -> list[dict]:
    return [_lattice_from(req).to_record()]


def _image(req: sc.ImageRequest) -> list[dict]:
    lat = _lattice_from(req)
    image = ff.parent_image_lattice(lat)
    out = []
    times = range(lat.M) if req.include_time else (0,)
    for t in times:
        for sp in lat.space_points():
            p = ff.LatticePoint(sp, t)
            img = image[p]
            xs, xt = ff.point_location(lat, p)
            rec = {
                "space": list(sp),
                "location": [_frac(x) for x in xs],
                "states": [format_compact(s) for s in img.space],
            }
            if req.include_time:
                rec.update(time=t, time_location=_frac(xt), time_state=format_compact(img.time))
            out.append(rec)
            if req.limit is not None and len(out) >= req.limit:
                return out
    return out


def _frames(req: sc.FramesRequest) -> list[dict]:
    graph = ff.FrameGraph.from_config(
        {"topology": req.topology.model_dump(exclude_none=True), "frames": [f.model_dump() for f in req.frames]}
    )
    if req.queries is None:
        ids = sorted(graph.frames)
        pairs = [(a, b) for a in ids for b in ids]
    else:
        pairs = [(ff.FrameId(**q.observer.model_dump()), ff.FrameId(**q.target.model_dump())) for q in req.queries]
    return [
        {"observer": a.to_record(), "target": b.to_record(), "visible": ff.visible(a, b, graph)} for a, b in pairs
    ]


def _initial(req: sc.EvolveRequest, lat: ff.Lattice) -> dyn.WaveFunction:
    init, bnd = req.initial, req.boundary
    if isinstance(init, sc.PointInit):
        if len(init.index) != lat.D or any(i >= lat.M for i in init.index):
            raise IndexOutOfRange(f"point {init.index} outside lattice of shape {lat.shape}")
        return dyn.point_state(lat, init.index, bnd)
    if isinstance(init, sc.PlaneWaveInit):
        return dyn.plane_wave(lat, init.q, bnd)
    if isinstance(init, sc.GaussianInit):
        return dyn.gaussian(lat, init.center, init.width, init.q, bnd)
    rng = np.random.default_rng(req.seed)
    a = rng.normal(size=lat.shape) + 1j * rng.normal(size=lat.shape)
    return dyn.WaveFunction(lat, a / np.sqrt(np.vdot(a, a).real), bnd)


def _potential(spec) -> Callable | None:
    if isinstance(spec, sc.WellPotential):
        return dyn.well_potential(spec.depth, spec.lo, spec.hi)
    if isinstance(spec, sc.HarmonicPotential):
        return dyn.harmonic_potential(spec.stiffness, spec.center)
    return None


def _complex_pair(c: complex) -> list[float]:
    return [float(c.real), float(c.imag)]


def _evolve(req: sc.EvolveRequest) -> list[dict]:
    shape = req.lattice
    lat = ff.make_lattice(ff.FrameId(0, shape.k), shape.L, shape.m, shape.D)
    psi0 = _initial(req, lat)
    H = dyn.HamiltonianSpec(req.mass, _potential(req.potential), req.hbar)
    dt = req.dt
    if req.image_labels:
        image = ff.parent_image_lattice(lat)
        itraj = dyn.image_evolution(psi0, H, dt, req.steps, image)
        traj = itraj.trajectory
    else:
        traj = dyn.evolve(psi0, H, dt, req.steps, req.unitary_reference, req.site_cap)
        itraj = None
    if req.unitary_reference and itraj is not None:
        ref = dyn.evolve(psi0, H, dt, req.steps, True, req.site_cap)
        records = [r.to_record() for r in ref.records]
    else:
        records = [r.to_record() for r in traj.records]
    model = dyn.get_model(req.energy_model)
    out = []
    for rec, state in zip(records, traj.states):
        rec = {"dt": dt, **rec}
        if itraj is not None:
            amps = itraj.amplitudes(rec["step"])
            weights = {lab: abs(c) ** 2 for lab, c in amps.items()}
            total = sum(weights.values())
            rec["location_energy"] = sum(
                w * sum(dyn.energy_of(s, model) for s in lab) for lab, w in weights.items()
            ) / total
            t_label = itraj.time_label(rec["step"])
            if t_label is not None:
                rec["time_state"] = format_compact(t_label)
        if req.dump_states:
            if itraj is not None:
                rec["state"] = {
                    ",".join(format_compact(s) for s in lab): _complex_pair(c)
                    for lab, c in itraj.amplitudes(rec["step"]).items()
                }
            else:
                rec["state"] = [_complex_pair(c) for c in state.reshape(-1)]
        out.append(rec)
    return out


def _energy(req: sc.EnergyRequest) -> list[dict]:
    model = dyn.get_model(req.model, req.scale)
    out = []
    for text in req.states or []:
        s = parse_compact(text, req.k)
        out.append({"kind": "state", "state": text, "trimmed": format_compact(trim(s)),
                    "energy": dyn.energy_of(s, model)})
    if req.tuple_states is not None:
        comps = tuple(parse_compact(t, req.k) for t in req.tuple_states)
        img = ff.HybridTupleImage(comps, comps[0])
        out.append({"kind": "tuple", "states": req.tuple_states, "energy": dyn.tuple_energy(img, model)})
    if req.sequence is not None:
        seq = build_sequence(req.sequence, req.k)
        out.append({"kind": "sequence", "model": model.name, **dyn.energy_sequence(seq, model, req.n_max).to_record()})
    return out


HANDLERS: dict[str, Callable] = {
    "encode": _encode,
    "arith": _arith,
    "convert": _convert,
    "cauchy": _cauchy,
    "lattice": _lattice,
    "image": _image,
    "evolve": _evolve,
    "energy": _energy,
    "frames": _frames,
}

COMMANDS = tuple(HANDLERS)


def validate(command: str, payload: dict) -> sc.CommandRequest:
    if command not in sc.REQUESTS:
        raise ConfigError(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
    try:
        return sc.REQUESTS[command].model_validate(payload)
    except ValidationError as exc:
        raise ConfigError(_summarize(exc)) from None


def _summarize(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(x) for x in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def run_command(command: str, payload: dict) -> list[dict]:
    """Validate ``payload`` for ``command`` and return its records.

    Raises :class:`ConfigError` for rejected requests and a
    :class:`~qframes.errors.QFramesError` subclass for domain errors.
    """
    req = validate(command, payload)
    records = HANDLERS[command](req)
    return [{"command": command, **r} for r in records]
