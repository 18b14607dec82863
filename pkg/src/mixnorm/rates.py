"""Rate-of-decay analytics on real time series.

Every ``limsup`` is replaced by a finite-horizon surrogate: the maximum over
the trailing ``tail_fraction`` of the samples.  Checks that need stability
also report the same statistic on the first half of the horizon.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateDenominator,
    MisalignedSeries,
    NonPositiveValues,
    WindowTooSmall,
)
from .spectral import SpectrumSeries, sobolev_norm

DEFAULT_TAIL = 0.25
# A tail statistic may grow by at most this factor between half and full
# horizon and still count as stable.
STABILITY_FACTOR = 3.0


@dataclass(frozen=True)
class TimeSeriesReal:
    """Real values sampled at strictly increasing times."""

    t: np.ndarray
    values: np.ndarray
    name: str = "value"

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.float64).reshape(-1)
        v = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if t.shape != v.shape:
            raise MisalignedSeries(f"{t.size} times but {v.size} values")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_pairs(cls, pairs, name: str = "value") -> TimeSeriesReal:
        pairs = list(pairs)
        return cls([p[0] for p in pairs], [p[1] for p in pairs], name)

    def __len__(self) -> int:
        return self.t.size

    def __iter__(self):
        return iter(zip(self.t.tolist(), self.values.tolist()))

    def head(self, n: int) -> TimeSeriesReal:
        return TimeSeriesReal(self.t[:n], self.values[:n], self.name)

    @property
    def degenerate(self) -> np.ndarray:
        """Mask of samples whose value is exactly zero."""
        return self.values == 0.0


def _check_aligned(a: TimeSeriesReal, b: TimeSeriesReal) -> None:
    if a.t.shape != b.t.shape or not np.array_equal(a.t, b.t):
        raise MisalignedSeries(f"series {a.name!r} and {b.name!r} are sampled at different times")


def tail_count(n: int, tail_fraction: float) -> int:
    if not 0 < tail_fraction <= 1:
        raise ValueError(f"tail_fraction must be in (0, 1], got {tail_fraction}")
    return max(1, min(n, math.ceil(tail_fraction * n)))


def tail_max(values: Sequence[float] | np.ndarray, tail_fraction: float = DEFAULT_TAIL) -> float:
    """Maximum over the trailing ``tail_fraction`` of ``values``."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("empty series")
    return float(np.max(v[-tail_count(v.size, tail_fraction):]))


# ---------------------------------------------------------------------------
# Rate functions


class RateFunction:
    """A strictly positive rate ``h(t)``.

    Either a closed form (callable on any time) or a table evaluated only at
    its own sample times; tables are never interpolated.
    """

    def __init__(
        self,
        func: Callable[[np.ndarray], np.ndarray] | None = None,
        times=None,
        values=None,
        description: str = "",
    ):
        if (func is None) == (times is None):
            raise ValueError("give either a closed form or a sampled table")
        self._func = func
        self.description = description
        if times is not None:
            t = np.asarray(times, dtype=np.float64).reshape(-1)
            v = np.asarray(values, dtype=np.float64).reshape(-1)
            if t.shape != v.shape:
                raise MisalignedSeries("rate table times and values differ in length")
            if np.any(np.diff(t) <= 0):
                raise ValueError("rate table times must be strictly increasing")
            if np.any(~np.isfinite(v)) or np.any(v <= 0):
                raise NonPositiveValues("rate values must be finite and strictly positive")
            self._table = dict(zip(t.tolist(), v.tolist()))
            self.times, self.values = t, v
        else:
            self._table = None
            self.times = self.values = None

    @property
    def is_sampled(self) -> bool:
        return self._table is not None

    @classmethod
    def sampled(cls, times, values, description: str = "table") -> RateFunction:
        return cls(times=times, values=values, description=description)

    @classmethod
    def from_series(cls, ts: TimeSeriesReal, description: str | None = None) -> RateFunction:
        return cls.sampled(ts.t, ts.values, description or ts.name)

    @classmethod
    def exponential(cls, rate: float, scale: float = 1.0) -> RateFunction:
        """``scale * exp(-rate * t)``."""
        return cls(lambda t: scale * np.exp(-rate * t), description=f"{scale}*exp(-{rate}*t)")

    @classmethod
    def power(cls, exponent: float, scale: float = 1.0, offset: float = 1.0) -> RateFunction:
        """``scale * (t + offset) ** exponent``."""
        return cls(
            lambda t: scale * np.power(t + offset, exponent),
            description=f"{scale}*(t+{offset})^{exponent}",
        )

    @classmethod
    def from_callable(cls, func, description: str = "callable") -> RateFunction:
        return cls(func, description=description)

    def __call__(self, t):
        arr = np.asarray(t, dtype=np.float64)
        if self._table is None:
            out = np.asarray(self._func(arr), dtype=np.float64)
        else:
            try:
                out = np.array([self._table[float(x)] for x in arr.reshape(-1)]).reshape(arr.shape)
            except KeyError as exc:
                raise MisalignedSeries(f"rate table has no sample at t = {exc.args[0]}") from None
        return float(out) if out.ndim == 0 else out

    def at(self, times) -> np.ndarray:
        return np.atleast_1d(np.asarray(self(np.asarray(times, dtype=np.float64)), dtype=np.float64))

    def __repr__(self) -> str:
        kind = "sampled" if self.is_sampled else "closed"
        return f"RateFunction({kind}: {self.description})"


# ---------------------------------------------------------------------------
# Series-level analytics


def mixnorm_series(series: SpectrumSeries, q: float) -> TimeSeriesReal:
    """``||f^t||_{H^-q}`` for every sample.  Empty fields give 0, see
    :attr:`TimeSeriesReal.degenerate`."""
    if q <= 0:
        raise ValueError(f"q must be > 0, got {q}")
    vals = [sobolev_norm(f, -q) for f in series.fields]
    return TimeSeriesReal(series.t, vals, name=f"mixnorm_q{q:g}")


def sobolev_series(series: SpectrumSeries, beta: float) -> TimeSeriesReal:
    """``||f^t||_{H^beta}`` for any real ``beta``."""
    return TimeSeriesReal(series.t, [sobolev_norm(f, beta) for f in series.fields], f"H{beta:g}")


def mixnorm_rate(
    series: SpectrumSeries, q: float, factor: Callable[[np.ndarray], np.ndarray] | None = None,
    description: str = "mixnorm",
) -> RateFunction:
    """Sampled rate ``factor(t) * ||f^t||_{H^-q}`` on the series' own times."""
    m = mixnorm_series(series, q)
    vals = m.values if factor is None else m.values * np.asarray(factor(m.t), dtype=np.float64)
    return RateFunction.sampled(m.t, vals, description)


def empirical_limsup(
    num: TimeSeriesReal, den: TimeSeriesReal, tail_fraction: float = DEFAULT_TAIL
) -> float:
    """Tail maximum of ``num / den``."""
    _check_aligned(num, den)
    n = tail_count(len(num), tail_fraction)
    d = den.values[-n:]
    if np.any(d <= 0):
        raise DegenerateDenominator("denominator vanishes on the tail")
    return float(np.max(num.values[-n:] / d))


@dataclass(frozen=True)
class DecayFit:
    lambda_: float
    r_squared: float
    intercept: float
    n_points: int
    window: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "lambda": self.lambda_,
            "r_squared": self.r_squared,
            "intercept": self.intercept,
            "n_points": self.n_points,
            "window": list(self.window),
        }


def fit_decay_rate(
    ts: TimeSeriesReal,
    window: tuple[float, float] | None = None,
    skip_fraction: float = 0.25,
) -> DecayFit:
    """Least-squares fit of ``log(value) = c - lambda * t`` over ``window``.

    Without a window the first ``skip_fraction`` of the samples is dropped as
    an initial transient.  ``lambda`` is per unit of ``t``.
    """
    if window is None:
        start = int(math.floor(skip_fraction * len(ts)))
        if len(ts) == 0:
            raise WindowTooSmall("empty series")
        start = min(start, len(ts) - 1)
        window = (float(ts.t[start]), float(ts.t[-1]))
    lo, hi = window
    sel = (ts.t >= lo) & (ts.t <= hi)
    t, v = ts.t[sel], ts.values[sel]
    if t.size < 4:
        raise WindowTooSmall(f"need at least 4 points in window {window}, got {t.size}")
    if np.any(v <= 0):
        raise NonPositiveValues("log-linear fit needs strictly positive values")
    y = np.log(v)
    slope, intercept = np.polyfit(t, y, 1)
    resid = y - (slope * t + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return DecayFit(float(-slope), r2, float(intercept), int(t.size), (float(lo), float(hi)))


def geometric_mean_rate(rho: TimeSeriesReal, mixnorm: TimeSeriesReal) -> TimeSeriesReal:
    """Pointwise ``sqrt(rho * mixnorm)``: a rate between ``rho`` and the
    mix-norm that is still little-o of the mix-norm when ``rho`` is."""
    _check_aligned(rho, mixnorm)
    if np.any(rho.values < 0) or np.any(mixnorm.values < 0):
        raise NonPositiveValues("geometric mean needs nonnegative inputs")
    return TimeSeriesReal(rho.t, np.sqrt(rho.values * mixnorm.values), name="geometric_mean")


@dataclass(frozen=True)
class RateCheck:
    mode: str
    passed: bool
    tail_max: float | None = None
    half_tail_max: float | None = None
    tau: float | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "passed": self.passed,
            "tail_max": self.tail_max,
            "half_tail_max": self.half_tail_max,
            "tau": self.tau,
            "detail": self.detail,
        }


def check_rate_definition(
    corr: TimeSeriesReal,
    rate: RateFunction,
    g_norm: float = 1.0,
    mode: str = "uniform",
    tau_search: Sequence[float] | None = None,
    tail_fraction: float = DEFAULT_TAIL,
    rtol: float = 1e-12,
) -> RateCheck:
    """Test sampled correlations against one of the three rate notions.

    ``uniform``
        ``corr(t) <= rate(t) * g_norm`` at every sample.
    ``asymptotic``
        tail max of ``corr / rate`` is finite and grows by no more than
        :data:`STABILITY_FACTOR` between half and full horizon.
    ``translational``
        the smallest ``tau`` in ``tau_search`` with
        ``corr(t) <= rate(t - tau) * g_norm`` for every sample ``t > tau``.
    """
    if mode == "uniform":
        r = rate.at(corr.t) * g_norm
        ok = bool(np.all(corr.values <= r * (1 + rtol)))
        excess = float(np.max(corr.values - r)) if len(corr) else 0.0
        return RateCheck(mode, ok, detail=f"max excess {excess:.3e}")
    if mode == "asymptotic":
        r = rate.at(corr.t)
        if np.any(r <= 0):
            raise DegenerateDenominator("rate must be positive")
        ratio = corr.values / r
        full = tail_max(ratio, tail_fraction)
        half = tail_max(ratio[: max(1, len(ratio) // 2)], tail_fraction)
        ok = math.isfinite(full) and full <= STABILITY_FACTOR * half * (1 + rtol) + 1e-300
        return RateCheck(mode, bool(ok), tail_max=full, half_tail_max=half)
    if mode == "translational":
        if tau_search is None:
            raise ValueError("translational mode needs tau_search")
        for tau in sorted(float(x) for x in tau_search):
            sel = corr.t > tau
            if not np.any(sel):
                continue
            bound = rate.at(corr.t[sel] - tau) * g_norm
            if np.all(corr.values[sel] <= bound * (1 + rtol)):
                return RateCheck(mode, True, tau=tau)
        return RateCheck(mode, False, detail="no tau in the search range works")
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class CrossQResult:
    q: float
    q_prime: float
    tail_max_ratio: float
    half_tail_max_ratio: float
    monotone_ok: bool
    ratios: TimeSeriesReal = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "q_prime": self.q_prime,
            "tail_max_ratio": self.tail_max_ratio,
            "half_tail_max_ratio": self.half_tail_max_ratio,
            "monotone_ok": self.monotone_ok,
        }


def cross_q_comparison(
    series: SpectrumSeries, q: float, q_prime: float, tail_fraction: float = DEFAULT_TAIL
) -> CrossQResult:
    """Tail max of ``||f||_{H^-q'} / ||f||_{H^-q}`` for ``q' > q``, plus a
    check that the ratio never exceeds 1."""
    if not q_prime > q > 0:
        raise ValueError(f"need q_prime > q > 0, got q={q}, q_prime={q_prime}")
    lo = mixnorm_series(series, q)
    hi = mixnorm_series(series, q_prime)
    if np.any(lo.values <= 0):
        raise DegenerateDenominator("mix-norm vanishes at some sample")
    ratio = TimeSeriesReal(lo.t, hi.values / lo.values, name=f"ratio_q{q_prime:g}_q{q:g}")
    full = tail_max(ratio.values, tail_fraction)
    half = tail_max(ratio.values[: max(1, len(ratio) // 2)], tail_fraction)
    ok = bool(np.all(ratio.values <= 1 + 1e-12))
    return CrossQResult(q, q_prime, full, half, ok, ratio)


def _read_table(path: str) -> tuple[np.ndarray, np.ndarray]:
    import csv

    ts, vs = [], []
    with open(path, encoding="utf-8") as fp:
        for row in csv.reader(fp):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                ts.append(float(row[0]))
                vs.append(float(row[1]))
            except (ValueError, IndexError):
                if ts:
                    raise
    return np.array(ts), np.array(vs)


def rate_from_descriptor(desc: str, series: SpectrumSeries, q: float) -> RateFunction:
    """Build ``h`` from the small descriptor grammar used on the command line.

    ``mixnorm``
        the mix-norm itself;
    ``pow:p``
        ``(1 + t)^p`` times the mix-norm;
    ``exp:r``
        ``exp(r t)`` times the mix-norm;
    ``table:PATH``
        a CSV of ``t,value`` rows;
    ``<any of the above>*geom``
        the geometric mean of that rate and the mix-norm.
    """
    desc = desc.strip()
    geom = desc.endswith("*geom")
    base = desc[: -len("*geom")] if geom else desc
    m = mixnorm_series(series, q)
    if base == "mixnorm":
        vals = m.values
    elif base.startswith("pow:"):
        vals = np.power(1.0 + m.t, float(base[4:])) * m.values
    elif base.startswith("exp:"):
        vals = np.exp(float(base[4:]) * m.t) * m.values
    elif base.startswith("table:"):
        t, v = _read_table(base[6:])
        table = RateFunction.sampled(t, v, base)
        vals = table.at(m.t)
    else:
        raise ValueError(f"unknown rate descriptor {desc!r}")
    if geom:
        vals = np.sqrt(vals * m.values)
    return RateFunction.sampled(m.t, vals, desc)
