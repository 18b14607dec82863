"""Acceptance criteria, one test each, at the stated tolerances.

Each test prints a ``[PASS]`` or ``[FAIL]`` line (visible in ``pytest -v``
output) before asserting.
"""

import math
import time

import numpy as np
import pytest

from mixnorm import (
    RECURRENT,
    TRANSIENT,
    RateFunction,
    SystemSpec,
    WavenumberSet,
    altered_baker_oracle,
    classify_recurrence,
    cos1,
    cross_q_comparison,
    duality_witness,
    energy_fraction_series,
    evolve,
    fit_decay_rate,
    inner_product,
    make_field,
    mixnorm_series,
    shell_decomposition,
    sign_state_witness,
    sine_flow_period,
    sobolev_norm,
    to_grid,
    transient_witness,
    verify_witness,
)
from mixnorm.classification import mode_energies, threshold_q
from mixnorm.dynamics import gamma
from mixnorm.rates import mixnorm_rate, sobolev_series
from mixnorm.witness import bound_chain, duality_witness_at, transient_cross_terms


@pytest.fixture
def report(capsys):
    def emit(tag, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {tag}: {detail}")
        assert ok, f"{tag}: {detail}"

    return emit


def rel_err(x, ref):
    return abs(x - ref) / abs(ref) if ref else abs(x)


def close_or_underflow(x, ref, rel):
    """Relative agreement, treating values below the map's drop level as 0."""
    if abs(ref) < 1e-300:
        return abs(x) < 1e-300
    return rel_err(x, ref) <= rel


# ---------------------------------------------------------------------------


def test_ac1_coefficient_tables(report):
    start = time.perf_counter()
    worst = 0.0
    ok = True
    for a, b in ((0.8, 0.6), (math.sqrt(2) / 2, math.sqrt(2) / 2)):
        s = evolve(SystemSpec("altered_baker", a=a, b=b), cos1(), 10)
        for n, f in enumerate(s.fields):
            expected = {1: a**n}
            expected.update({2**j: a ** (n - j) * b for j in range(1, n + 1)})
            ok &= set(k[0] for k in f.wavevectors) == set(expected)
            for k, v in expected.items():
                worst = max(worst, rel_err(f.get((k,)), v))
    kappa = 1e-3
    a = b = math.sqrt(2) / 2
    s = evolve(SystemSpec("pulsed_diffusion", a=a, b=b, kappa=kappa), cos1(), 10)
    g1 = gamma(1, kappa)
    for n, f in enumerate(s.fields):
        expected = {1: (a * g1) ** n}
        for j in range(1, n + 1):
            expected[2**j] = (a * g1) ** (n - j) * b * math.prod(gamma(2**i, kappa) for i in range(1, j + 1))
        for k, v in expected.items():
            ok &= close_or_underflow(f.get((k,)).real, v, 1e-12)
            if abs(v) >= 1e-300:
                worst = max(worst, rel_err(f.get((k,)), v))
        ok &= all(k[0] in expected for k in f.wavevectors)
    dt = time.perf_counter() - start
    ok &= worst <= 1e-12 and dt < 1
    report("AC1 coefficient tables", ok, f"max rel err {worst:.2e}, {dt:.3f}s")


def test_ac2_oracle_agreement(report):
    start = time.perf_counter()
    e1_err = egt_err = 0.0
    for a in (0.5, 0.6, 0.8):
        b = math.sqrt(1 - a * a)
        s = evolve(SystemSpec("altered_baker", a=a, b=b), cos1(), 60)
        for q in (1.0, 2.0):
            for n, f in enumerate(s.fields):
                e1, egt1 = mode_energies(f, q)
                orc = altered_baker_oracle(a, b, q, n, 0)
                e1_err = max(e1_err, rel_err(e1, orc.E1))
                if n:
                    egt_err = max(egt_err, rel_err(egt1, orc.Egt1))
    dt = time.perf_counter() - start
    ok = e1_err <= 1e-12 and egt_err <= 1e-10 and dt < 1
    report("AC2 oracle agreement", ok, f"E1 {e1_err:.2e}, E>1 {egt_err:.2e}, {dt:.3f}s")


def test_ac3_phase_diagram(report):
    start = time.perf_counter()
    mismatches, checked = [], 0
    for a in (0.4, 0.5, 0.6, 0.8):
        s = evolve(SystemSpec("altered_baker", a=a), cos1(), 100)
        for q in (0.5, 1.0, 1.5, 2.0):
            if abs(q - threshold_q(a)) < 0.05:
                continue
            checked += 1
            verdict = classify_recurrence(s, q).verdict
            want = RECURRENT if q > threshold_q(a) else TRANSIENT
            if verdict != want:
                mismatches.append((a, q, verdict))
    baker = evolve(SystemSpec("baker"), cos1(), 100)
    for q in (0.5, 1.0, 1.5, 2.0):
        verdict = classify_recurrence(baker, q).verdict
        if verdict != TRANSIENT:
            mismatches.append(("baker", q, verdict))
    dt = time.perf_counter() - start
    ok = not mismatches and dt < 5
    report("AC3 phase diagram", ok, f"{checked} grid points + 4 baker, mismatches {mismatches}, {dt:.3f}s")


def test_ac4_ratio_limit(report):
    start = time.perf_counter()
    a, b, q, R = 0.8, 0.6, 1.0, 3
    s = evolve(SystemSpec("altered_baker", a=a, b=b), cos1(), 100)
    frac = energy_fraction_series(s, WavenumberSet.ball(2**R), q).values[100] ** 2
    orc = altered_baker_oracle(a, b, q, 100, R)
    limit = orc.c_Rqa / (1 + orc.c_qa)
    dt = time.perf_counter() - start
    ok = abs(frac - limit) <= 1e-6 and dt < 1
    report("AC4 ratio limit", ok, f"|{frac:.12f} - {limit:.12f}| = {abs(frac - limit):.2e}, {dt:.3f}s")


def test_ac5_pulsed_diffusion_rates(report):
    start = time.perf_counter()
    a = b = math.sqrt(2) / 2
    kappa = 1e-3
    s = evolve(SystemSpec("pulsed_diffusion", a=a, b=b, kappa=kappa), cos1(), 60)
    target = -math.log(a * gamma(1, kappa))
    errs = {}
    for beta in (-2.0, -1.0, 0.0, 1.0):
        fit = fit_decay_rate(sobolev_series(s, beta), window=(30, 60))
        errs[beta] = abs(fit.lambda_ - target)
    dt = time.perf_counter() - start
    ok = max(errs.values()) <= 1e-6 and dt < 1
    report("AC5 pulsed-diffusion rate", ok, f"target {target:.10f}, max |err| {max(errs.values()):.2e}, {dt:.3f}s")


def test_ac6_duality_suite(report):
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst_cs = worst_eq = worst_norm = 0.0
    def sparse(dims, sym, n_modes):
        entries = {}
        while len(entries) < n_modes:
            k = tuple(int(x) for x in rng.integers(1 if dims == 1 else -20, 21, size=dims))
            if any(k):
                entries[k] = complex(*rng.normal(size=2))
        return entries

    for _ in range(1000):
        dims = int(rng.integers(1, 3))
        sym = "one_sided" if dims == 1 else "full_lattice"
        fe = sparse(dims, sym, int(rng.integers(1, 9)))
        ge = sparse(dims, sym, int(rng.integers(1, 9)))
        # share some support so the pairing is not trivially zero
        for k in list(fe)[:2]:
            ge[k] = complex(*rng.normal(size=2))
        f = make_field(fe, dims=dims, symmetry=sym)
        g = make_field(ge, dims=dims, symmetry=sym)
        for q in (0.5, 1.0, 2.0):
            bound = sobolev_norm(f, -q) * sobolev_norm(g, q)
            worst_cs = max(worst_cs, abs(inner_product(f, g)) / bound - 1)
            w = duality_witness(f, q)
            worst_eq = max(worst_eq, rel_err(abs(inner_product(f, w.g)), sobolev_norm(f, -q)))
            worst_norm = max(worst_norm, abs(w.norm() - 1))
    dt = time.perf_counter() - start
    ok = worst_cs <= 1e-12 and worst_eq <= 1e-10 and worst_norm <= 1e-12 and dt < 5
    report(
        "AC6 duality suite", ok,
        f"CS excess {worst_cs:.2e}, equality {worst_eq:.2e}, |g|-1 {worst_norm:.2e}, {dt:.3f}s",
    )


def test_ac7_transient_construction_on_baker(report):
    start = time.perf_counter()
    q, delta = 1.0, 0.25
    s = evolve(SystemSpec("baker"), cos1(), 40)
    h = RateFunction.sampled(s.t, [2.0**-n / (n + 2) for n in range(41)])
    w = transient_witness(s, shell_decomposition(s, q, h, delta), q, h, delta)
    ok = bool(w.selected_times)
    lows = []
    for t in w.selected_times:
        f = s.fields[s.index_of(t)]
        val = inner_product(f, w.g).real
        lows.append(val / h(t))
        ok &= val >= (1 - 3 * delta) * h(t)
    gsq = w.norm() ** 2
    ok &= gsq <= delta**2
    cross = transient_cross_terms(s, w, h)
    ok &= all(c.E1 <= delta * c.h and c.E2 <= delta * c.h for c in cross)
    dt = time.perf_counter() - start
    ok &= dt < 1
    report(
        "AC7 transient witness on baker", ok,
        f"T={list(w.selected_times)}, <f,g>/h={lows}, |g|^2={gsq:.4g}, "
        f"max E1,E2={max((max(c.E1, c.E2) for c in cross), default=0):.1e}, {dt:.3f}s",
    )


def test_ac8_sign_state_recurrent(report):
    start = time.perf_counter()
    q = 2.0
    s = evolve(SystemSpec("altered_baker", a=0.8), cos1(), 100)
    h = mixnorm_rate(s, q)
    w = sign_state_witness(s, WavenumberSet.explicit([1]), q, h, 0.1)
    ver = verify_witness(s, w, h=h)
    slack = 0.0
    for t in w.selected_times:
        chain = bound_chain(s.fields[s.index_of(t)], w)
        for hi, lo in zip(chain, chain[1:]):
            slack = max(slack, (lo - hi) / max(lo, 1e-300))
    dt = time.perf_counter() - start
    ok = ver.limsup_ratio >= 0.1 and slack <= 1e-12 and ver.passed and dt < 1
    report("AC8 sign-state witness", ok, f"limsup ratio {ver.limsup_ratio:.4f}, chain slack {slack:.1e}, {dt:.3f}s")


def test_ac9_sine_flow_rates(report):
    start = time.perf_counter()
    s = evolve(SystemSpec("sine_flow", N=128, D=1e-5, rng_seed=7), cos1("sine_flow"), 40)
    lams = {q: fit_decay_rate(mixnorm_series(s, q), window=(10, 40)).lambda_ for q in (0.5, 1.0, 2.0)}
    vals = list(lams.values())
    spread = max(
        abs(x - y) / max(abs(x), abs(y)) for i, x in enumerate(vals) for y in vals[i + 1:]
    )
    cross = cross_q_comparison(s, 0.5, 2.0).tail_max_ratio
    dt = time.perf_counter() - start
    ok = spread <= 0.15 and cross >= 0.05 and dt < 120
    report(
        "AC9 sine-flow rates", ok,
        f"lambda {', '.join(f'q={q:g}: {v:.4f}' for q, v in lams.items())}; "
        f"pairwise spread {spread:.3%}; cross-q tail max {cross:.3f}; {dt:.1f}s",
    )


def test_ac10_splitting_convergence(report):
    start = time.perf_counter()
    grid = to_grid(cos1("sine_flow"), 128)
    psi1, psi2 = 1.1, 4.2
    ref = sine_flow_period(grid, 1e-5, psi1, psi2, n_sub=256)
    errs = [
        math.sqrt(np.mean((sine_flow_period(grid, 1e-5, psi1, psi2, n_sub=m) - ref) ** 2))
        for m in (8, 16, 32)
    ]
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    dt = time.perf_counter() - start
    ok = all(3.5 <= r <= 4.5 for r in ratios) and dt < 60
    report("AC10 splitting convergence", ok, f"errors {errs}, ratios {ratios}, {dt:.1f}s")


def test_ac11_envelope(report):
    start = time.perf_counter()
    q = 1.0
    s = evolve(SystemSpec("altered_baker", a=0.8), cos1(), 30)
    mix = mixnorm_series(s, q).values
    ok = True
    worst_touch = worst_over = 0.0
    for t0 in (0, 5, 10):
        w = duality_witness_at(s, t0, q)
        corr = np.array([abs(inner_product(f, w.g)) for f in s.fields])
        worst_over = max(worst_over, float(np.max(corr / mix - 1)))
        ok &= bool(np.all(corr <= mix * (1 + 1e-12)))
        worst_touch = max(worst_touch, rel_err(corr[t0], mix[t0]))
    dt = time.perf_counter() - start
    ok &= worst_touch <= 1e-10 and dt < 1
    report("AC11 envelope", ok, f"max corr/mix - 1 {worst_over:.2e}, touch err {worst_touch:.2e}, {dt:.3f}s")
