"""Evolution systems producing :class:`SpectrumSeries`.

Three discrete-time maps act directly on one-sided 1-D coefficient maps:
the baker map (``k -> 2k``), the altered baker map (mode 1 keeps a fraction
``a`` and sends ``b`` to mode 2), and pulsed diffusion (altered baker followed
by heat-kernel damping ``exp(-kappa (2 pi k)^2)``).  The fourth system, the
random-phase sine flow, advances a real field on an ``N x N`` grid under
advection-diffusion with alternating shears.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import (
    ConventionMismatch,
    GridTooSmall,
    NegativeDiffusivity,
    ParameterConstraintViolated,
)
from .spectral import (
    FULL_LATTICE,
    ONE_SIDED,
    FourierField,
    SpectrumSeries,
    to_grid,
    to_spectrum,
)

logger = logging.getLogger(__name__)

KINDS = ("baker", "altered_baker", "pulsed_diffusion", "sine_flow")
SINE_AMPLITUDE = math.sqrt(2.0)
# Amplitudes below this are removed from coefficient maps (gamma_k underflow).
DROP_BELOW = 1e-300


def _check_ab(a: float, b: float) -> None:
    if not 0.0 < a <= 1.0 or b < 0.0:
        raise ParameterConstraintViolated(f"need 0 < a <= 1 and b >= 0, got a={a}, b={b}")
    if abs(a * a + b * b - 1.0) > 1e-12:
        raise ParameterConstraintViolated(f"a^2 + b^2 = {a * a + b * b!r}, expected 1")


def _require_1d_one_sided(f: FourierField) -> None:
    if f.dims != 1 or f.symmetry != ONE_SIDED:
        raise ConventionMismatch(
            f"coefficient maps act on one-sided 1-D fields, got ({f.dims}, {f.symmetry})"
        )


def gamma(k: int, kappa: float) -> float:
    """Heat-kernel factor ``exp(-kappa (2 pi k)^2)``; 0 once it underflows."""
    if kappa == 0:
        return 1.0
    try:
        arg = kappa * (2.0 * math.pi * float(k)) ** 2
    except OverflowError:
        return 0.0
    return math.exp(-arg)


def baker_step(f: FourierField) -> FourierField:
    """Move every amplitude from ``k`` to ``2k``."""
    _require_1d_one_sided(f)
    keys = [(2 * k[0],) for k in f.wavevectors]
    return f.replace(keys, f.amplitudes)


def _altered(f: FourierField, a: float, b: float) -> dict[int, complex]:
    out: dict[int, complex] = {}
    for (k,), v in f:
        if k == 1:
            out[1] = out.get(1, 0) + a * v
            out[2] = out.get(2, 0) + b * v
        else:
            out[2 * k] = out.get(2 * k, 0) + v
    return out


def _finish(f: FourierField, coeffs: dict[int, complex]) -> FourierField:
    items = sorted((k, v) for k, v in coeffs.items() if abs(v) >= DROP_BELOW)
    return f.replace([(k,) for k, _ in items], [v for _, v in items])


def altered_baker_step(f: FourierField, a: float, b: float) -> FourierField:
    """One application of the altered baker coefficient map.

    ``g_1 = a f_1``, ``g_2 = b f_1`` and ``g_{2k} = f_k`` for ``k >= 2``.
    The map is an isometry of l^2.
    """
    _check_ab(a, b)
    _require_1d_one_sided(f)
    return _finish(f, _altered(f, a, b))


def pulsed_diffusion_step(f: FourierField, a: float, b: float, kappa: float) -> FourierField:
    """Altered baker step followed by damping every mode by ``gamma_k``."""
    _check_ab(a, b)
    if kappa < 0:
        raise NegativeDiffusivity(f"kappa must be >= 0, got {kappa}")
    _require_1d_one_sided(f)
    coeffs = _altered(f, a, b)
    return _finish(f, {k: gamma(k, kappa) * v for k, v in coeffs.items()})


# ---------------------------------------------------------------------------
# Sine flow


def _wavenumbers(n: int) -> np.ndarray:
    return np.fft.fftfreq(n, 1.0 / n)


def sine_flow_period(
    f: np.ndarray,
    D: float,
    psi1: float,
    psi2: float,
    n_sub: int = 8,
    amplitude: float = SINE_AMPLITUDE,
) -> np.ndarray:
    """Advance a real ``N x N`` grid through one unit period of the sine flow.

    For ``0 <= t < 1/2`` the velocity is ``(0, A sin(2 pi x + psi1))``, then
    ``(A sin(2 pi y + psi2), 0)``, with ``A = sqrt(2)``.  Each half period is
    split into ``n_sub`` Strang substeps: half a diffusion step in full
    Fourier space, an exact shear shift as a phase factor in the mixed
    representation (physical along the shear's dependence, Fourier across
    it), and another half diffusion step.  The mean and the Nyquist slice
    across the shear are zeroed before each phase multiplication; phase
    content generated past the grid's Nyquist mode is truncated.

    ``amplitude`` exists so tests can switch the flow off.
    """
    f = np.asarray(f, dtype=np.float64)
    if f.ndim != 2 or f.shape[0] != f.shape[1]:
        raise ValueError(f"expected an N x N grid, got shape {f.shape}")
    n = f.shape[0]
    if n < 4 or n & (n - 1):
        raise GridTooSmall(f"grid size must be a power of two >= 4, got {n}")
    if D < 0:
        raise NegativeDiffusivity(f"D must be >= 0, got {D}")
    if n_sub < 1:
        raise ValueError("n_sub must be >= 1")

    k = _wavenumbers(n)
    x = np.arange(n) / n
    dt = 0.5 / n_sub
    ksq = k[:, None] ** 2 + k[None, :] ** 2
    half_diffusion = np.exp(-D * (2.0 * np.pi) ** 2 * ksq * (0.5 * dt))
    nyq = n // 2

    spec = np.fft.fft2(f)
    spec[0, 0] = 0.0
    # axis = Fourier direction of the mixed representation
    for axis, psi in ((1, psi1), (0, psi2)):
        u = amplitude * np.sin(2.0 * np.pi * x + psi)
        if axis == 1:
            phase = np.exp(-2j * np.pi * dt * u[:, None] * k[None, :])
        else:
            phase = np.exp(-2j * np.pi * dt * k[:, None] * u[None, :])
        other = 1 - axis
        for _ in range(n_sub):
            spec *= half_diffusion
            spec[0, 0] = 0.0
            if axis == 1:
                spec[:, nyq] = 0.0
            else:
                spec[nyq, :] = 0.0
            mixed = np.fft.ifft(spec, axis=other)
            mixed *= phase
            spec = np.fft.fft(mixed, axis=other)
            spec *= half_diffusion
            spec[0, 0] = 0.0
    return np.fft.ifft2(spec).real


# ---------------------------------------------------------------------------
# System descriptor and driver


@dataclass(frozen=True)
class SystemSpec:
    """Parameters of one of the four evolution systems."""

    kind: str
    a: float = 0.8
    b: float | None = None
    kappa: float = 0.0
    D: float = 1e-5
    N: int = 128
    n_sub: int = 8
    rng_seed: int = 0
    amplitude: float = SINE_AMPLITUDE

    def __post_init__(self):
        kind = {"sineflow": "sine_flow", "alteredbaker": "altered_baker"}.get(self.kind, self.kind)
        object.__setattr__(self, "kind", kind)
        if kind not in KINDS:
            raise ValueError(f"unknown system {self.kind!r}; expected one of {KINDS}")
        if self.b is None:
            object.__setattr__(self, "b", math.sqrt(max(0.0, 1.0 - self.a * self.a)))
        if kind in ("altered_baker", "pulsed_diffusion"):
            _check_ab(self.a, self.b)
        if self.kappa < 0:
            raise NegativeDiffusivity(f"kappa must be >= 0, got {self.kappa}")
        if kind == "sine_flow":
            if self.D < 0:
                raise NegativeDiffusivity(f"D must be >= 0, got {self.D}")
            if self.N < 4 or self.N & (self.N - 1):
                raise GridTooSmall(f"N must be a power of two >= 4, got {self.N}")
            if self.n_sub < 1:
                raise ValueError("n_sub must be >= 1")

    def params(self) -> dict:
        if self.kind == "baker":
            return {}
        if self.kind == "altered_baker":
            return {"a": self.a, "b": self.b}
        if self.kind == "pulsed_diffusion":
            return {"a": self.a, "b": self.b, "kappa": self.kappa}
        p = {k: v for k, v in asdict(self).items() if k in ("D", "N", "n_sub", "rng_seed")}
        if self.amplitude != SINE_AMPLITUDE:
            p["amplitude"] = self.amplitude
        return p

    def step(self, f: FourierField) -> FourierField:
        if self.kind == "baker":
            return baker_step(f)
        if self.kind == "altered_baker":
            return altered_baker_step(f, self.a, self.b)
        if self.kind == "pulsed_diffusion":
            return pulsed_diffusion_step(f, self.a, self.b, self.kappa)
        raise TypeError("sine flow advances grids, use evolve()")


def evolve(spec: SystemSpec, f0: FourierField, steps: int) -> SpectrumSeries:
    """Run ``steps`` map iterations (or flow periods) and sample every one.

    Samples sit at ``t = 0, 1, ..., steps``.  For the sine flow the phase
    pair of each period is drawn from ``numpy.random.default_rng(rng_seed)``
    and logged under ``params['phases']``.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if spec.kind != "sine_flow":
        _require_1d_one_sided(f0)
        fields = [f0]
        for _ in range(steps):
            fields.append(spec.step(fields[-1]))
        return SpectrumSeries(tuple(range(steps + 1)), tuple(fields), spec.kind, spec.params())

    if f0.dims != 2 or f0.symmetry != FULL_LATTICE:
        raise ConventionMismatch("sine flow needs a full-lattice 2-D initial field")
    grid = to_grid(f0, spec.N)
    if np.iscomplexobj(grid):
        raise ConventionMismatch("sine flow needs a real initial field")
    rng = np.random.default_rng(spec.rng_seed)
    fields = [to_spectrum(grid)]
    phases = []
    for period in range(steps):
        psi1, psi2 = rng.random(2) * (2.0 * np.pi)
        phases.append([float(psi1), float(psi2)])
        grid = sine_flow_period(grid, spec.D, psi1, psi2, spec.n_sub, spec.amplitude)
        fields.append(to_spectrum(grid))
        logger.debug("sine flow period %d done", period + 1)
    params = spec.params()
    params["real"] = True
    params["phases"] = phases
    return SpectrumSeries(tuple(range(steps + 1)), tuple(fields), spec.kind, params)


def cos1(system: str = "baker") -> FourierField:
    """The standard cosine initial condition.

    For the coefficient maps this is ``2 cos(2 pi x)``, one-sided ``{1: 1}``;
    for the sine flow it is ``sqrt(2) cos(2 pi x)`` on the full 2-D lattice.
    """
    from .spectral import make_field

    if system in ("sine_flow", "sineflow"):
        c = math.sqrt(2.0) / 2.0
        return make_field({(1, 0): c, (-1, 0): c}, dims=2, symmetry=FULL_LATTICE, real=True)
    return make_field({1: 1.0}, dims=1, symmetry=ONE_SIDED)
