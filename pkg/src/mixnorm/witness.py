"""Witness observables: test functions ``g`` whose correlation with ``f^t``
provably tracks a prescribed rate, and a verifier for those guarantees.

Three constructions are provided:

* :func:`duality_witness` -- the pairing equals the mix-norm at one time;
* :func:`sign_state_witness` -- for a finite mode set that keeps a share of
  the rate ``h``, a quadrant-sign pattern that recurs in the coefficients;
* :func:`transient_witness` -- for mix-norm mass that escapes to high modes,
  shell-wise copies of ``f`` at well separated times (built on
  :func:`shell_decomposition`).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateNorm,
    HorizonExhausted,
    NoCandidateTimes,
    ParameterConstraintViolated,
    StateCapExceeded,
    SubsequenceUnavailable,
)
from .rates import DEFAULT_TAIL, RateFunction, mixnorm_rate, mixnorm_series, tail_count
from .spectral import (
    FourierField,
    SpectrumSeries,
    WavenumberSet,
    inner_product,
    sobolev_norm,
)

DUALITY = "duality"
SIGN_STATE = "sign_state"
TRANSIENT = "transient"
STATE_CAP = 8


@dataclass(frozen=True)
class WitnessObservable:
    """A test function ``g`` with the inequality it is certified to satisfy.

    ``lower_bounds[i]`` is the guaranteed lower bound on ``|<f^t, g>|`` at
    ``selected_times[i]``.
    """

    g: FourierField
    mode: str
    q: float
    delta: float | None
    selected_times: tuple[float, ...]
    lower_bounds: tuple[float, ...]
    guaranteed_bound: str
    meta: dict = field(default_factory=dict)

    def norm(self, beta: float | None = None) -> float:
        return sobolev_norm(self.g, self.q if beta is None else beta)

    def metadata(self) -> dict:
        return {
            "mode": self.mode,
            "q": self.q,
            "delta": self.delta,
            "selected_times": list(self.selected_times),
            "lower_bounds": list(self.lower_bounds),
            "guaranteed_bound": self.guaranteed_bound,
            "g_norm_Hq": self.norm(),
            **self.meta,
        }


def _k_power(f: FourierField, p: float) -> np.ndarray:
    """``|k|^p`` for every stored wavevector."""
    with np.errstate(under="ignore"):
        return np.power(f.ksq, 0.5 * p)


# ---------------------------------------------------------------------------
# Duality witness


def duality_witness(f: FourierField, q: float, t0: float | None = None) -> WitnessObservable:
    """``g_k = f_k |k|^(-2q) / ||f||_{H^-q}``.

    Then ``||g||_{H^q} = 1`` and ``<f, g> = ||f||_{H^-q}``.
    """
    m = sobolev_norm(f, -q)
    if m <= 0:
        raise DegenerateNorm("duality witness needs a nonzero mix-norm")
    g = f.replace(f.wavevectors, f.amplitudes * (_k_power(f, -2 * q) / m))
    times = () if t0 is None else (float(t0),)
    bounds = () if t0 is None else (m,)
    return WitnessObservable(
        g, DUALITY, float(q), None, times, bounds,
        "|<f^t0, g>| = ||f^t0||_{H^-q} with ||g||_{H^q} = 1",
    )


def duality_witness_at(series: SpectrumSeries, t0: float, q: float) -> WitnessObservable:
    return duality_witness(series.fields[series.index_of(t0)], q, t0)


# ---------------------------------------------------------------------------
# Sign-state witness


def _sgn(x: float) -> int:
    return 1 if x >= 0 else -1


def _projected_energy(f: FourierField, members, q: float) -> float:
    terms = []
    for k in members:
        v = f.get(k)
        if v:
            ksq = float(sum(c * c for c in k))
            terms.append(abs(v) ** 2 * ksq**-q)
    return math.fsum(terms)


def sign_state_witness(
    series: SpectrumSeries,
    wavenumbers: WavenumberSet,
    q: float,
    h: RateFunction,
    c: float,
    state_cap: int = STATE_CAP,
) -> WitnessObservable:
    """Observable ``g_k = (c_k + i d_k) |k|^-q`` on the finite set ``I``.

    Candidate times are those with ``||P_I f^t||_{H^-q} >= c h(t)``.  At
    each candidate the pattern ``(sgn Re f_k, sgn Im f_k)`` over ``I`` is
    recorded (``sgn 0 = +1``); the most frequent pattern wins, ties going to
    the lexicographically smallest.  At every time showing that pattern
    ``|<f^t, g>| >= ||P_I f^t||_{H^-q} >= c h(t)``.
    """
    members = wavenumbers.enumerate(series.dims, series.symmetry)
    if len(members) > state_cap:
        raise StateCapExceeded(f"|I| = {len(members)} exceeds the state cap {state_cap}")
    if not members:
        raise NoCandidateTimes("the mode set is empty")
    hv = h.at(series.t)
    proj = np.array([math.sqrt(_projected_energy(f, members, q)) for f in series.fields])
    cand = [i for i in range(len(series)) if proj[i] >= c * hv[i]]
    if not cand:
        raise NoCandidateTimes(f"no sample has ||P_I f|| >= {c} h(t)")
    states = {}
    for i in cand:
        f = series.fields[i]
        states[i] = tuple((_sgn(f.get(k).real), _sgn(f.get(k).imag)) for k in members)
    counts = Counter(states.values())
    top = max(counts.values())
    state = min(s for s, n in counts.items() if n == top)
    chosen = [i for i in cand if states[i] == state]
    amps = [
        complex(cs, ds) * float(sum(x * x for x in k)) ** (-q / 2)
        for k, (cs, ds) in zip(members, state)
    ]
    g = FourierField(members, amps, series.dims, series.symmetry, False)
    return WitnessObservable(
        g, SIGN_STATE, float(q), None,
        tuple(series.times[i] for i in chosen),
        tuple(float(proj[i]) for i in chosen),
        f"|<f^t, g>| >= ||P_I f^t||_{{H^-q}} >= {c} h(t) at selected times",
        {
            "c": c,
            "modes": [list(k) for k in members],
            "state": [list(s) for s in state],
            "candidates": len(cand),
            "h": h.description,
        },
    )


def bound_chain(f: FourierField, w: WitnessObservable) -> tuple[float, float, float, float]:
    """The four quantities of the sign-state lower-bound chain at one time:
    ``|<f, g>|``, ``sum (|Re f_k| + |Im f_k|) k^-q``, ``sum |f_k| k^-q`` and
    ``(sum |f_k|^2 k^-2q)^(1/2)`` over the witness support."""
    pairing = abs(inner_product(f, w.g))
    l1_parts, l1, l2 = [], [], []
    for k in w.g.wavevectors:
        v = f.get(k)
        kq = float(sum(c * c for c in k)) ** (-w.q / 2)
        l1_parts.append((abs(v.real) + abs(v.imag)) * kq)
        l1.append(abs(v) * kq)
        l2.append((abs(v) * kq) ** 2)
    return pairing, math.fsum(l1_parts), math.fsum(l1), math.sqrt(math.fsum(l2))


# ---------------------------------------------------------------------------
# Shell decomposition


@dataclass(frozen=True)
class Shell:
    """Annulus ``J_prev < |k| <= J`` paired with the sample time ``T``."""

    J_prev: int
    J: int
    T: float
    sample: int
    captured: float
    property1: bool
    property2: bool

    @property
    def wavenumbers(self) -> WavenumberSet:
        return WavenumberSet.annulus(self.J_prev, self.J)

    def to_dict(self) -> dict:
        return {
            "J_prev": self.J_prev,
            "J": self.J,
            "T": self.T,
            "captured_fraction": self.captured,
            "property1": self.property1,
            "property2": self.property2,
        }


@dataclass(frozen=True)
class ShellDecomposition:
    delta: float
    q: float
    shells: tuple[Shell, ...]
    horizon: float

    def __len__(self) -> int:
        return len(self.shells)

    def __iter__(self):
        return iter(self.shells)

    def __getitem__(self, i) -> Shell:
        return self.shells[i]

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "q": self.q,
            "horizon": self.horizon,
            "shells": [s.to_dict() for s in self.shells],
        }


def _ceil_sqrt(n: int) -> int:
    r = math.isqrt(n)
    return r if r * r == n else r + 1


def _smallest_capturing_radius(f: FourierField, q: float, j_prev: int, target: float) -> int | None:
    """Smallest integer ``J > j_prev`` with energy on ``j_prev < |k| <= J``
    reaching ``target``; None when even the full tail falls short."""
    w = f.weighted_energy(-q)
    lo = j_prev * j_prev if j_prev > 0 else 0
    radii: dict[int, list[float]] = {}
    for ksq, e in zip(f.ksq_exact, w.tolist()):
        if ksq > lo:
            radii.setdefault(max(_ceil_sqrt(ksq), j_prev + 1), []).append(e)
    acc: list[float] = []
    for J in sorted(radii):
        acc.extend(radii[J])
        if math.fsum(acc) >= target * (1 - 1e-12):
            return J
    return None


def _low_energy(f: FourierField, q: float, J: int) -> float:
    if J <= 0:
        return 0.0
    w = f.weighted_energy(-q)
    lim = J * J
    return math.fsum(e for ksq, e in zip(f.ksq_exact, w.tolist()) if ksq <= lim)


def shell_decomposition(
    series: SpectrumSeries,
    q: float,
    h: RateFunction,
    delta: float,
    c_bound: float = 1.0,
    min_shells: int = 2,
) -> ShellDecomposition:
    """Annuli ``I_i`` and times ``T_i`` that capture escaping mix-norm mass.

    ``T_1`` is the first sample and ``J_1`` the smallest radius holding a
    ``1 - delta`` share of the squared mix-norm.  Each later ``T_i`` is the
    earliest sample at least one time unit after ``T_{i-1}`` from which the
    energy on ``|k| <= J_{i-1}`` stays below ``min(delta, delta/c^2) h(t)^2``
    for every remaining sample; ``J_i`` is then the smallest radius for which
    the new annulus captures ``1 - delta`` of the squared mix-norm at ``T_i``.
    The "for all later times" condition is checked over the available
    horizon only.

    Raises :class:`HorizonExhausted` (carrying the partial result) when fewer
    than ``min_shells`` shells could be built.
    """
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if c_bound <= 0:
        raise ValueError("c_bound must be > 0")
    if not len(series):
        raise HorizonExhausted("empty series", ShellDecomposition(delta, q, (), 0.0))
    t = series.t
    mix = mixnorm_series(series, q).values
    if np.any(mix <= 0):
        raise DegenerateNorm("mix-norm vanishes at some sample")
    hv = h.at(t)
    if np.any(hv > c_bound * mix * (1 + 1e-12)):
        raise ParameterConstraintViolated(f"h exceeds {c_bound} * mix-norm on the horizon")
    low_tol = min(delta, delta / c_bound**2)

    shells: list[Shell] = []
    J0 = _smallest_capturing_radius(series.fields[0], q, 0, (1 - delta) * mix[0] ** 2)
    cap0 = _low_energy(series.fields[0], q, J0) / mix[0] ** 2
    shells.append(Shell(0, J0, float(t[0]), 0, cap0, True, True))
    while True:
        prev = shells[-1]
        start = int(np.searchsorted(t, prev.T + 1.0 - 1e-12))
        if start >= len(series):
            break
        ok = np.array(
            [_low_energy(f, q, prev.J) <= low_tol * hv[i] ** 2 for i, f in enumerate(series.fields)]
        )
        # suffix[i]: property 2 holds at every sample from i on
        suffix = np.logical_and.accumulate(ok[::-1])[::-1]
        hits = np.nonzero(suffix[start:])[0]
        if not hits.size:
            break
        s = start + int(hits[0])
        f = series.fields[s]
        J = _smallest_capturing_radius(f, q, prev.J, (1 - delta) * mix[s] ** 2)
        if J is None:
            break
        captured = (_low_energy(f, q, J) - _low_energy(f, q, prev.J)) / mix[s] ** 2
        shells.append(Shell(prev.J, J, float(t[s]), s, captured, True, True))

    decomp = ShellDecomposition(delta, float(q), tuple(shells), float(t[-1]))
    if len(shells) < min_shells:
        raise HorizonExhausted(
            f"only {len(shells)} shell(s) before the horizon t = {t[-1]:g} ran out", decomp
        )
    return decomp


# ---------------------------------------------------------------------------
# Transient witness


def transient_witness(
    series: SpectrumSeries,
    shells: ShellDecomposition,
    q: float,
    h: RateFunction,
    delta: float,
) -> WitnessObservable:
    """Observable tracking a rate ``h = o(mix-norm)`` on a transient trajectory.

    Shells are picked greedily: the first with ``r = h(T)/||f^T||_{H^-q}
    <= delta/2``, then each next one with ``r <= (delta^2/2) r_prev``.  This
    keeps ``sum r <= delta`` and every tail ``sum_{l>L} r_l <= delta^2 r_L``.
    On a selected shell ``g_k = f^T_k |k|^-2q ||f^T||^-2 h(T)``.  Certified:
    ``||g||_{H^q}^2 <= sum r^2 <= delta^2`` and
    ``<f^T, g> >= (1 - 3 delta) h(T)`` at every selected ``T``.
    """
    if not 0 < delta < 1 / 3:
        raise ValueError(f"delta must lie in (0, 1/3), got {delta}")
    if len(shells) < 2:
        raise ValueError("the shell decomposition needs at least 2 shells")
    mix = mixnorm_series(series, q).values
    hv = h.at(series.t)
    chosen: list[tuple[Shell, float]] = []
    for sh in shells:
        if not (sh.property1 and sh.property2):
            continue
        r = hv[sh.sample] / mix[sh.sample]
        limit = delta / 2 if not chosen else (delta * delta / 2) * chosen[-1][1]
        if r <= limit:
            chosen.append((sh, float(r)))
    if not chosen:
        raise SubsequenceUnavailable(
            f"no shell has h/mix-norm <= {delta / 2:g} within the horizon; "
            "h may not be o(mix-norm) here"
        )
    keys, amps = [], []
    for sh, _ in chosen:
        f = series.fields[sh.sample]
        m = sh.wavenumbers.mask(f)
        scale = hv[sh.sample] / mix[sh.sample] ** 2
        keys.extend(k for k, keep in zip(f.wavevectors, m) if keep)
        amps.append(f.amplitudes[m] * _k_power(f, -2 * q)[m] * scale)
    g = FourierField(
        keys, np.concatenate(amps) if amps else [], series.dims, series.symmetry, False
    )
    ratios = [r for _, r in chosen]
    return WitnessObservable(
        g, TRANSIENT, float(q), float(delta),
        tuple(sh.T for sh, _ in chosen),
        tuple((1 - 3 * delta) * float(hv[sh.sample]) for sh, _ in chosen),
        "Re <f^T, g> >= (1 - 3 delta) h(T) at selected shell times; ||g||_{H^q}^2 <= delta^2",
        {
            "h": h.description,
            "ratios": ratios,
            "sum_ratio_sq": math.fsum(r * r for r in ratios),
            "shells": [sh.to_dict() for sh, _ in chosen],
        },
    )


@dataclass(frozen=True)
class CrossTerms:
    T: float
    pairing: complex
    S: float
    E1: float
    E2: float
    h: float


def transient_cross_terms(
    series: SpectrumSeries, w: WitnessObservable, h: RateFunction
) -> list[CrossTerms]:
    """Split ``<f^T, g>`` at each selected time into the diagonal shell term
    ``S`` and the absolute off-diagonal sums ``E1`` (earlier shells) and
    ``E2`` (later shells), recomputed directly from the series."""
    if w.mode != TRANSIENT:
        raise ValueError("cross terms are defined for transient witnesses")
    shells = [
        Shell(s["J_prev"], s["J"], s["T"], series.index_of(s["T"]), 0.0, True, True)
        for s in w.meta["shells"]
    ]
    out = []
    for i, sh in enumerate(shells):
        f = series.fields[sh.sample]
        S = E1 = E2 = 0.0
        for j, other in enumerate(shells):
            gpart = w.g.replace(
                [k for k, keep in zip(w.g.wavevectors, other.wavenumbers.mask(w.g)) if keep],
                w.g.amplitudes[other.wavenumbers.mask(w.g)],
            )
            if j == i:
                S = inner_product(f, gpart).real
                continue
            acc = math.fsum(abs(f.get(k)) * abs(v) for k, v in gpart)
            if j < i:
                E1 += acc
            else:
                E2 += acc
        out.append(CrossTerms(sh.T, inner_product(f, w.g), S, E1, E2, float(h.at([sh.T])[0])))
    return out


# ---------------------------------------------------------------------------
# Verification


@dataclass(frozen=True)
class WitnessVerification:
    rows: tuple[tuple[float, float, float, float, bool | None], ...]
    limsup_ratio: float
    passed: bool
    failures: tuple[float, ...]

    header = ("t", "corr", "h", "mixnorm", "pass")

    def to_dict(self) -> dict:
        return {
            "limsup_ratio": self.limsup_ratio,
            "passed": self.passed,
            "failures": list(self.failures),
            "samples": len(self.rows),
        }


def verify_witness(
    series: SpectrumSeries,
    w: WitnessObservable,
    q: float | None = None,
    h: RateFunction | None = None,
    tail_fraction: float = DEFAULT_TAIL,
    rtol: float = 1e-10,
) -> WitnessVerification:
    """Evaluate ``|<f^t, g>|`` along the series against ``h`` and the mix-norm.

    ``limsup_ratio`` is the tail max of ``|<f^t, g>| / h(t)``.  The witness
    passes when every selected time meets its certified lower bound (to
    relative slack ``rtol``); a witness without selected times fails.
    """
    q = w.q if q is None else q
    h = mixnorm_rate(series, q) if h is None else h
    mix = mixnorm_series(series, q).values
    hv = h.at(series.t)
    corr = np.array([abs(inner_product(f, w.g)) for f in series.fields])
    required = dict(zip(w.selected_times, w.lower_bounds))
    rows, failures = [], []
    for t, c_, hh, m in zip(series.times, corr, hv, mix):
        ok = None
        if t in required:
            ok = bool(c_ >= required[t] * (1 - rtol))
            if not ok:
                failures.append(t)
        rows.append((t, float(c_), float(hh), float(m), ok))
    n = tail_count(len(series), tail_fraction)
    tail_h = hv[-n:]
    limsup = float(np.max(corr[-n:] / tail_h)) if np.all(tail_h > 0) else float("nan")
    missing = [t for t in w.selected_times if t not in set(series.times)]
    passed = bool(w.selected_times) and not failures and not missing
    return WitnessVerification(tuple(rows), limsup, passed, tuple(failures + missing))


def envelope_dataset(series: SpectrumSeries, q: float, t0s) -> tuple[list[str], list[list[float]]]:
    """Correlation curves of duality witnesses built at each ``t0`` next to the
    mix-norm: every curve stays under the mix-norm and touches it at its
    ``t0``."""
    mix = mixnorm_series(series, q).values
    witnesses = [duality_witness_at(series, t0, q) for t0 in t0s]
    header = ["t", "mixnorm"] + [f"corr_t0_{t0:g}" for t0 in t0s]
    rows = []
    for (t, f), m in zip(series, mix):
        rows.append([t, float(m)] + [abs(inner_product(f, w.g)) for w in witnesses])
    return header, rows
