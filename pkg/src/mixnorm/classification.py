"""Empirical q-recurrence / q-transience classification.

A trajectory is q-recurrent when some finite mode set keeps a positive share
of the mix-norm at arbitrarily late times.  At a finite horizon the share's
limsup is estimated by a tail maximum and a verdict is only issued when the
estimate is stable under halving the horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateNorm, InsufficientHorizon, ParameterConstraintViolated
from .rates import TimeSeriesReal, tail_max
from .spectral import SpectrumSeries, WavenumberSet

RECURRENT = "recurrent"
TRANSIENT = "transient"
INCONCLUSIVE = "inconclusive"

DEFAULT_RADII = tuple(2**i for i in range(7))
DEFAULT_THRESHOLD = 1e-3
DEFAULT_TAIL = 0.25
STABILITY_FACTOR = 3.0
MIN_SAMPLES = 8


def energy_fraction_series(
    series: SpectrumSeries, wavenumbers: WavenumberSet, q: float
) -> TimeSeriesReal:
    """``||P_I f^t||_{H^-q} / ||f^t||_{H^-q}`` at every sample."""
    if q <= 0:
        raise ValueError(f"q must be > 0, got {q}")
    ratios = []
    for t, f in series:
        w = f.weighted_energy(-q)
        total = math.fsum(w)
        if total <= 0:
            raise DegenerateNorm(f"mix-norm vanishes at t = {t}")
        inside = math.fsum(w[wavenumbers.mask(f)])
        ratios.append(min(1.0, math.sqrt(inside / total)))
    return TimeSeriesReal(series.t, ratios, name="energy_fraction")


@dataclass(frozen=True)
class RadiusStats:
    radius: int
    tail_max: float
    half_tail_max: float
    running: tuple[float, ...]
    fractions: TimeSeriesReal = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "tail_max": self.tail_max,
            "half_tail_max": self.half_tail_max,
            "running_tail_max": list(self.running),
        }


@dataclass(frozen=True)
class RecurrenceReport:
    q: float
    radii: tuple[int, ...]
    stats: tuple[RadiusStats, ...]
    verdict: str
    horizon: int
    threshold: float
    tail_fraction: float

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "verdict": self.verdict,
            "horizon": self.horizon,
            "threshold": self.threshold,
            "tail_fraction": self.tail_fraction,
            "radii": list(self.radii),
            "per_radius": [s.to_dict() for s in self.stats],
        }


def _non_increasing(seq, rtol: float = 1e-12) -> bool:
    return all(b <= a * (1 + rtol) + 1e-300 for a, b in zip(seq, seq[1:]))


def classify_recurrence(
    series: SpectrumSeries,
    q: float,
    radii=DEFAULT_RADII,
    tail_fraction: float = DEFAULT_TAIL,
    threshold: float = DEFAULT_THRESHOLD,
) -> RecurrenceReport:
    """Recurrent / transient / inconclusive verdict for one ``q``.

    For every ball radius the energy-fraction series is reduced to its tail
    maximum over the full horizon and over the first half.  The running
    sequence of tail maxima for horizons from half to full is kept as well.

    * recurrent: some radius has ``tail_max >= threshold`` and its
      half-horizon tail max is at most 3x the full-horizon one;
    * transient: for every radius the running tail max is non-increasing and
      ends below ``threshold``;
    * otherwise inconclusive.
    """
    n = len(series)
    if n < MIN_SAMPLES:
        raise InsufficientHorizon(f"need at least {MIN_SAMPLES} samples, got {n}")
    if not 0 < tail_fraction <= 0.5:
        raise ValueError(f"tail_fraction must be in (0, 1/2], got {tail_fraction}")
    if threshold <= 0:
        raise ValueError("threshold must be > 0")
    half = n // 2
    stats = []
    for r in radii:
        fr = energy_fraction_series(series, WavenumberSet.ball(int(r)), q)
        v = fr.values
        running = tuple(tail_max(v[:h], tail_fraction) for h in range(half, n + 1))
        stats.append(
            RadiusStats(int(r), running[-1], tail_max(v[:half], tail_fraction), running, fr)
        )

    if any(s.tail_max >= threshold and s.half_tail_max <= STABILITY_FACTOR * s.tail_max for s in stats):
        verdict = RECURRENT
    elif all(_non_increasing(s.running) and s.tail_max < threshold for s in stats):
        verdict = TRANSIENT
    else:
        verdict = INCONCLUSIVE
    return RecurrenceReport(
        float(q), tuple(int(r) for r in radii), tuple(stats), verdict, n, threshold, tail_fraction
    )


# ---------------------------------------------------------------------------
# Closed forms for the altered baker map started from {1: 1}


@dataclass(frozen=True)
class AlteredBakerOracle:
    E1: float
    Egt1: float
    c_qa: float | None
    c_Rqa: float
    limit_ratio_sq: float

    def to_dict(self) -> dict:
        return {
            "E1": self.E1,
            "Egt1": self.Egt1,
            "c_qa": self.c_qa,
            "c_Rqa": self.c_Rqa,
            "limit_ratio_sq": self.limit_ratio_sq,
        }


def is_threshold_case(a: float, q: float) -> bool:
    """True when ``a == 2**-q`` (to 1e-12 relative)."""
    return math.isclose(a, 2.0**-q, rel_tol=1e-12)


def altered_baker_oracle(a: float, b: float, q: float, n: int, R: int) -> AlteredBakerOracle:
    """Exact mix-norm energies of the altered baker iterate ``f^n``.

    ``E1`` is the energy on mode 1 and ``Egt1`` the energy on modes
    ``k > 1``.  ``c_Rqa`` is ``||P_I f^n||^2 / a^{2n}`` for the ball
    ``I = [0, 2^R]`` (valid once ``n > R``) and ``limit_ratio_sq`` the
    ``n -> infinity`` limit of the squared energy fraction on that ball.
    """
    if not 0 < a <= 1 or b < 0 or abs(a * a + b * b - 1) > 1e-12:
        raise ParameterConstraintViolated(f"need a^2 + b^2 = 1 with a in (0, 1], got {a}, {b}")
    if q <= 0 or n < 0 or R < 0:
        raise ValueError("need q > 0, n >= 0 and R >= 0")
    E1 = a ** (2 * n)
    if is_threshold_case(a, q):
        return AlteredBakerOracle(E1, b * b * E1 * n, None, 1 + b * b * R, 0.0)
    c = b * b / (a * a * 2.0 ** (2 * q) - 1)
    Egt1 = c * (E1 - 2.0 ** (-2 * q * n))
    c_R = 1 + c * (1 - a ** (-2 * R) * 2.0 ** (-2 * q * R))
    limit = c_R / (1 + c) if a > 2.0**-q else 0.0
    return AlteredBakerOracle(E1, Egt1, c, c_R, limit)


def mode_energies(field_, q: float) -> tuple[float, float]:
    """Split the mix-norm energy of a one-sided 1-D field into ``k = 1`` and
    ``k > 1`` parts, summed directly from the coefficients."""
    w = field_.weighted_energy(-q)
    ks = np.array([k[0] == 1 for k in field_.wavevectors], dtype=bool)
    return math.fsum(w[ks]), math.fsum(w[~ks])


def threshold_q(a: float) -> float:
    """The recurrence threshold ``log2(1/a)``."""
    return math.log2(1.0 / a)


__all__ = [
    "RECURRENT",
    "TRANSIENT",
    "INCONCLUSIVE",
    "RadiusStats",
    "RecurrenceReport",
    "AlteredBakerOracle",
    "energy_fraction_series",
    "classify_recurrence",
    "altered_baker_oracle",
    "mode_energies",
    "threshold_q",
]
