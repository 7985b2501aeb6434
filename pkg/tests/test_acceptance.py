"""Acceptance criteria, one test per criterion.

Each test prints a single ``ACCEPT <n> PASS|FAIL ...`` line; the same lines
are repeated in the pytest terminal summary. Run standalone with
``python3 tests/test_acceptance.py``.
"""
import math
import time
from fractions import Fraction
from itertools import product
from random import Random

import numpy as np
import pytest

from oracles import finite_in_base, long_division, state_value, text_value
from qframes.cauchy import (
    Status,
    alternating,
    canonical,
    cauchy_prob,
    cauchy_test,
    superposed,
    truncation,
)
from qframes.dynamics import (
    HamiltonianSpec,
    digit_sum_model,
    energy_expectation,
    energy_of,
    energy_sequence,
    evolve,
    gaussian,
    image_evolution,
    magnitude_model,
    plane_wave,
    tuple_energy,
)
from qframes.frames import HybridTupleImage, LatticePoint, make_lattice, parent_image_lattice, point_location
from qframes.numeral import (
    NumeralState,
    PeriodicExpansion,
    abs_A,
    add_A,
    all_states,
    cmp_A,
    convert_base,
    encode,
    eq_arith,
    format_compact,
    is_initial_part,
    parse_compact,
    sub_A,
    succ_ulp,
    trim,
    value,
)
from qframes.qstate import inner_product

RESULTS: list[str] = []


def report(n, ok, detail):
    line = f"ACCEPT {n} {'PASS' if ok else 'FAIL'} {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _states(k, L_max=4):
    return [s for L in range(L_max + 1) for s in all_states(k, L)]


def _check_pairs(S):
    vals = [state_value(s) for s in S]
    bad = 0
    for a, va in zip(S, vals):
        for b, vb in zip(S, vals):
            bad += state_value(add_A(a, b)) != va + vb
            bad += state_value(sub_A(a, b)) != va - vb
            bad += cmp_A(a, b) != (va > vb) - (va < vb)
    return bad, len(S) ** 2


def test_1_numeral_oracle():
    t0 = time.perf_counter()
    bad, pairs, unary = 0, 0, 0
    for k in (2, 3):
        for s in _states(k):
            v = state_value(s)
            unary += 1
            bad += value(s) != v
            bad += encode(v, k) != trim(s) or state_value(encode(v, k)) != v
            bad += state_value(abs_A(s)) != abs(v)
    # k = 2: every pair of states of every shape
    b, n = _check_pairs(_states(2))
    bad, pairs = bad + b, pairs + n
    # k = 3: every pair for L <= 3, and every pair within each (L = 4, m) shape
    b, n = _check_pairs(_states(3, 3))
    bad, pairs = bad + b, pairs + n
    for m in range(5):
        b, n = _check_pairs(list(all_states(3, 4, m)))
        bad, pairs = bad + b, pairs + n
    dt = time.perf_counter() - t0
    report(1, bad == 0 and dt < 30, f"states={unary} pairs={pairs} mismatches={bad} time={dt:.1f}s (<30s)")


def test_2_literals():
    checks = []
    for text in ("3720+", "-0474", "12-71"):
        s = parse_compact(text, 10)
        checks.append(format_compact(s) == text and value(s) == text_value(text, 10))
    a, b = parse_compact("013-470", 10), parse_compact("13-47", 10)
    checks.append(eq_arith(a, b) and inner_product(a, b) == 0)
    checks.append(format_compact(succ_ulp(parse_compact("100+111", 2))) == "101+000")
    report(2, all(checks), f"checks={checks}")


def test_3_cauchy():
    t0 = time.perf_counter()
    third = truncation(Fraction(1, 3), 2)
    v = cauchy_test(third, 8, 32)
    ok_third = v.status is Status.PASS and v.moduli == {ell: ell for ell in range(1, 9)}
    alt = alternating(parse_compact("0+", 2), parse_compact("1+", 2))
    va = cauchy_test(alt, 8, 32)
    ok_alt = va.status is Status.FAIL and va.failed_ells[0] == 1

    prefixes = [canonical(third, n) for n in range(17)]
    ok_prefix = all(is_initial_part(prefixes[n], prefixes[n2]) for n in range(17) for n2 in range(n + 1, 17))
    ok_prefix &= all(list(reversed(p.digits[: p.m])) == long_division(Fraction(1, 3), 2, p.m) for p in prefixes)

    w = 2 ** -0.5
    mixed = superposed([w, w], [third, alt])
    est = cauchy_prob(mixed, 8, 32).estimate
    # product-measure oracle on Fraction values
    terms = [[(state_value(third.state(n)), 0.5), (state_value(alt.state(n)), 0.5)] for n in range(33)]

    def pair(j, h, ell):
        return sum(x * y for va_, x in terms[j] for vb_, y in terms[h] if abs(va_ - vb_) <= Fraction(1, 2 ** ell))

    brute = min(max(min(pair(j, h, ell) for j in range(p + 1, 33) for h in range(p + 1, 33)) for p in range(17))
                for ell in range(1, 9))
    ok_prob = abs(est - 0.25) <= 1e-12 and abs(est - brute) <= 1e-12
    dt = time.perf_counter() - t0
    ok = ok_third and ok_alt and ok_prefix and ok_prob and dt < 10
    report(3, ok, f"third={v.status.value} alt={va.status.value}@{va.failed_ells[:1]} prefix={ok_prefix} "
                  f"prob={est:.15f} brute={brute} time={dt:.1f}s (<10s)")


def test_4_conversion():
    out = convert_base(encode(Fraction(1, 6), 6), 10)
    ok_sixth = isinstance(out, PeriodicExpansion) and out.preperiod == (1,) and out.period == (6,)
    rng = Random(20240)
    bad = total = 0
    for k in range(2, 13):
        grid = dict.fromkeys(Fraction(rng.randint(-999, 999), k ** rng.randint(0, 4)) for _ in range(400))
        grid = list(grid)[:50]
        for v in grid:
            src = encode(v, k)
            for k2 in range(2, 13):
                total += 1
                res = convert_base(src, k2)
                if finite_in_base(v, k2):
                    bad += not (isinstance(res, NumeralState) and state_value(res) == v)
                else:
                    bad += not (isinstance(res, PeriodicExpansion) and res.value() == v)
    report(4, ok_sixth and bad == 0, f"1/6->{out} pairs={total} mismatches={bad}")


def test_5_lattice_image():
    t0 = time.perf_counter()
    lat = make_lattice(2, 3, 3, 2)
    image = parent_image_lattice(lat)
    seen, bad = set(), 0
    for sp in lat.space_points():
        p = LatticePoint(sp, 0)
        img = image[p]
        xs, _ = point_location(lat, p)
        bad += tuple(value(s) for s in img.space) != xs
        bad += tuple(state_value(s) for s in img.space) != xs
        bad += not all(s.gamma == "+" and s.L == 3 and s.m == 3 for s in img.space)
        bad += image.inverse(img) != p
        seen.add(img.space)
    dt = time.perf_counter() - t0
    ok = bad == 0 and len(seen) == 64 == lat.n_space and dt < 1
    report(5, ok, f"points={lat.n_space} distinct_images={len(seen)} mismatches={bad} time={dt:.2f}s (<1s)")


def test_6_dynamics():
    t0 = time.perf_counter()
    lat = make_lattice(2, 4, 0)
    H = HamiltonianSpec(1.0, None, 1.0)
    pw_err = max(abs(energy_expectation(plane_wave(lat, [q]), H) - 2 * math.sin(math.pi * q / 16) ** 2)
                 for q in range(16))
    psi0 = gaussian(lat, [8.0], 1.0, [4])
    traj = evolve(psi0, H, 0.01, 100)
    rel_inc = rel_norm = 0.0
    for a, b in zip(traj.records, traj.records[1:]):
        diff = abs((b.norm2 - a.norm2) - a.norm2_growth_expected)
        rel_inc = max(rel_inc, diff / a.norm2_growth_expected)
        rel_norm = max(rel_norm, diff / b.norm2)
    it = image_evolution(psi0, H, 0.01, 100, parent_image_lattice(lat), check=False)
    same = all(np.array_equal(x, y) for x, y in zip(it.trajectory.states, traj.states))
    dt = time.perf_counter() - t0
    ok = pw_err <= 1e-10 and rel_inc <= 1e-12 and same and dt < 5
    report(6, ok, f"plane_wave_err={pw_err:.1e} norm_identity_rel_to_increase={rel_inc:.1e} (<=1e-12) "
                  f"rel_to_norm2={rel_norm:.1e} image_identical={same} time={dt:.2f}s (<5s)")


def test_7_unitary_reference():
    t0 = time.perf_counter()
    lat = make_lattice(2, 3, 0)
    H = HamiltonianSpec()
    psi0 = gaussian(lat, [4.0], 1.0)
    ref = evolve(psi0, H, 0.01, 100, unitary_reference=True)
    drift = max(abs(r.ref_norm2 - 1.0) for r in ref.records)
    errs = [evolve(psi0, H, 1.0 / n, n, unitary_reference=True).records[-1].ref_error for n in (100, 200, 400)]
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    dt = time.perf_counter() - t0
    ok = drift <= 1e-10 and all(r >= 3.5 for r in ratios) and dt < 5
    report(7, ok, f"ref_norm_drift={drift:.1e} (<=1e-10) halving_ratios={[round(r, 3) for r in ratios]} "
                  f"(>=3.5) time={dt:.2f}s (<5s)")


def test_8_energy_models():
    bad = 0
    for model in (magnitude_model(), digit_sum_model()):
        for L in range(6):
            for s in all_states(2, L):
                bad += energy_of(s, model) != energy_of(trim(s), model)
    model = magnitude_model(1.0)
    a, b = parse_compact("10+1", 2), parse_compact("1+11", 2)
    additive = tuple_energy(HybridTupleImage((a, b), a), model) == energy_of(a, model) + energy_of(b, model)
    third = truncation(Fraction(1, 3), 2)
    mag = energy_sequence(third, model, 32, tail_start=16)
    digit = energy_sequence(third, digit_sum_model(), 32, tail_start=16)
    strictly_up = all(y > x for x, y in zip(digit.energies[16::2], digit.energies[18::2]))
    ok = (bad == 0 and additive and mag.status == "CONVERGENT" and mag.tail_spread < 2 ** -10
          and digit.status == "DIVERGENT" and strictly_up)
    report(8, ok, f"padding_mismatches={bad} additive={additive} magnitude={mag.status} "
                  f"spread={mag.tail_spread:.1e} digit_sum={digit.status}")


if __name__ == "__main__":
    for name, fn in sorted((n, f) for n, f in globals().items() if n.startswith("test_")):
        try:
            fn()
        except AssertionError:
            pass
