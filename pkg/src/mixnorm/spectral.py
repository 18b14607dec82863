"""Fourier-side representation of mean-zero fields on the torus.

A :class:`FourierField` is a sparse map from nonzero integer wavevectors to
complex amplitudes.  Two storage conventions exist and are never mixed:

``one_sided``
    Only wavevectors whose leading nonzero component is positive are stored.
    A stored amplitude ``f_k`` stands for the real function
    ``2 Re sum_k f_k exp(2 pi i k.x)``, so ``{1: 1}`` is ``2 cos(2 pi x)``.
    Norms and inner products count each stored mode once.
``full_lattice``
    Any nonzero wavevector may be stored; ``f(x) = sum_k f_k exp(2 pi i k.x)``.

Wavevector components are Python ints, so coefficient maps that double
their wavenumber every step stay exact far beyond 2**53.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import (
    ConventionMismatch,
    DimensionMismatch,
    DuplicateWavevector,
    GridTooSmall,
    ZeroModePresent,
)

ONE_SIDED = "one_sided"
FULL_LATTICE = "full_lattice"
SYMMETRIES = (ONE_SIDED, FULL_LATTICE)

# Relative tolerance for the Hermitian check on fields declared real.
_REAL_TOL = 1e-12

Wavevector = tuple[int, ...]


def _as_wavevector(k: Any) -> Wavevector:
    if isinstance(k, (int, np.integer)):
        return (int(k),)
    out = []
    for c in k:
        if isinstance(c, (float, np.floating)):
            if not float(c).is_integer():
                raise ValueError(f"non-integer wavevector component {c!r}")
        out.append(int(c))
    return tuple(out)


def _leading_positive(k: Wavevector) -> bool:
    for c in k:
        if c != 0:
            return c > 0
    return False


def _neg(k: Wavevector) -> Wavevector:
    return tuple(-c for c in k)


class FourierField:
    """Immutable sparse set of Fourier coefficients of a mean-zero field.

    Build instances with :func:`make_field`; the constructor itself trusts its
    input and is used internally where validity holds by construction.
    """

    __slots__ = ("_dims", "_symmetry", "_real", "_keys", "_amps", "_index", "_ksq", "_ksq_int")

    def __init__(self, keys, amps, dims: int, symmetry: str, real: bool = False):
        self._dims = int(dims)
        self._symmetry = symmetry
        self._real = bool(real) or symmetry == ONE_SIDED
        self._keys: tuple[Wavevector, ...] = tuple(keys)
        amps = np.array(amps, dtype=np.complex128).reshape(len(self._keys))
        amps.setflags(write=False)
        self._amps = amps
        self._index: dict[Wavevector, int] | None = None
        self._ksq: np.ndarray | None = None
        self._ksq_int: list[int] | None = None

    # -- basic accessors ---------------------------------------------------
    @property
    def dims(self) -> int:
        return self._dims

    @property
    def symmetry(self) -> str:
        return self._symmetry

    @property
    def real(self) -> bool:
        """True for one-sided fields and for full-lattice fields declared real."""
        return self._real

    @property
    def wavevectors(self) -> tuple[Wavevector, ...]:
        return self._keys

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amps

    def __len__(self) -> int:
        return len(self._keys)

    def __iter__(self) -> Iterator[tuple[Wavevector, complex]]:
        return iter(zip(self._keys, self._amps.tolist()))

    def items(self):
        return list(self)

    @property
    def index(self) -> dict[Wavevector, int]:
        if self._index is None:
            self._index = {k: i for i, k in enumerate(self._keys)}
        return self._index

    def __contains__(self, k) -> bool:
        return _as_wavevector(k) in self.index

    def get(self, k, default: complex = 0.0) -> complex:
        i = self.index.get(_as_wavevector(k))
        return default if i is None else complex(self._amps[i])

    def __getitem__(self, k) -> complex:
        i = self.index.get(_as_wavevector(k))
        if i is None:
            raise KeyError(k)
        return complex(self._amps[i])

    def to_dict(self) -> dict[Wavevector, complex]:
        return dict(self)

    @property
    def ksq_exact(self) -> list[int]:
        """Exact integer ``|k|^2`` for every stored wavevector."""
        if self._ksq_int is None:
            self._ksq_int = [sum(c * c for c in k) for k in self._keys]
        return self._ksq_int

    @property
    def ksq(self) -> np.ndarray:
        """``|k|^2`` as float64, aligned with :attr:`amplitudes`."""
        if self._ksq is None:
            arr = np.array([float(v) for v in self.ksq_exact], dtype=np.float64)
            arr.setflags(write=False)
            self._ksq = arr
        return self._ksq

    @property
    def max_component(self) -> int:
        return max((abs(c) for k in self._keys for c in k), default=0)

    def weighted_energy(self, alpha: float) -> np.ndarray:
        """Per-mode terms ``|k|^(2 alpha) |f_k|^2``."""
        if not len(self):
            return np.zeros(0)
        with np.errstate(over="ignore", under="ignore"):
            return np.power(self.ksq, alpha) * (self._amps.real**2 + self._amps.imag**2)

    def same_convention(self, other: FourierField) -> bool:
        return self._dims == other._dims and self._symmetry == other._symmetry

    def replace(self, keys, amps) -> FourierField:
        return FourierField(keys, amps, self._dims, self._symmetry, self._real)

    def scaled(self, factor: complex) -> FourierField:
        return FourierField(self._keys, self._amps * factor, self._dims, self._symmetry, self._real)

    def allclose(self, other: FourierField, rtol: float = 1e-12, atol: float = 0.0) -> bool:
        """Coefficientwise comparison; a missing entry counts as zero."""
        if not self.same_convention(other):
            return False
        for k in set(self._keys) | set(other._keys):
            a, b = self.get(k), other.get(k)
            if abs(a - b) > atol + rtol * max(abs(a), abs(b)):
                return False
        return True

    def __repr__(self) -> str:
        body = ", ".join(
            f"{k[0] if self._dims == 1 else k}: {v:.6g}" for k, v in list(self)[:6]
        )
        more = "" if len(self) <= 6 else f", ... ({len(self)} modes)"
        return f"FourierField(dims={self._dims}, {self._symmetry}, {{{body}{more}}})"


def make_field(
    entries: Iterable[tuple[Any, complex]] | Mapping[Any, complex] = (),
    dims: int = 1,
    symmetry: str = ONE_SIDED,
    real: bool = False,
) -> FourierField:
    """Validate ``(wavevector, amplitude)`` pairs and build a :class:`FourierField`.

    Raises
    ------
    ZeroModePresent
        An entry sits at ``k = 0``.
    DuplicateWavevector
        The same wavevector appears twice.
    DimensionMismatch
        A wavevector does not have ``dims`` components.
    ConventionMismatch
        A one-sided entry has a non-positive leading component, or a field
        declared real violates ``f_{-k} = conj(f_k)``.
    """
    if dims not in (1, 2):
        raise DimensionMismatch(f"dims must be 1 or 2, got {dims}")
    if symmetry not in SYMMETRIES:
        raise ValueError(f"unknown symmetry {symmetry!r}")
    if isinstance(entries, Mapping):
        entries = entries.items()
    keys: list[Wavevector] = []
    amps: list[complex] = []
    seen: set[Wavevector] = set()
    for raw_k, v in entries:
        k = _as_wavevector(raw_k)
        if len(k) != dims:
            raise DimensionMismatch(f"wavevector {k} has {len(k)} components, expected {dims}")
        if not any(k):
            raise ZeroModePresent("mean-zero field cannot carry a k = 0 entry")
        if k in seen:
            raise DuplicateWavevector(f"wavevector {k} given twice")
        if symmetry == ONE_SIDED and not _leading_positive(k):
            raise ConventionMismatch(f"one-sided field cannot store {k}")
        v = complex(v)
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise ValueError(f"non-finite amplitude at {k}")
        seen.add(k)
        keys.append(k)
        amps.append(v)
    f = FourierField(keys, amps, dims, symmetry, real)
    if real and symmetry == FULL_LATTICE:
        scale = float(np.max(np.abs(f.amplitudes))) if len(f) else 0.0
        for k, v in f:
            partner = f.get(_neg(k))
            if abs(partner - v.conjugate()) > _REAL_TOL * scale:
                raise ConventionMismatch(f"real field needs f[{_neg(k)}] = conj(f[{k}])")
    return f


def zero_field(dims: int = 1, symmetry: str = ONE_SIDED, real: bool = False) -> FourierField:
    return FourierField((), (), dims, symmetry, real)


# ---------------------------------------------------------------------------
# Wavenumber sets


@dataclass(frozen=True)
class WavenumberSet:
    """A set of wavevectors: an explicit list, a ball ``|k| <= R`` or an
    annulus ``lo < |k| <= hi``.  Radii are integers and membership is decided
    on exact integer ``|k|^2``."""

    kind: str
    points: frozenset = field(default_factory=frozenset)
    lo: int = 0
    hi: int = 0

    def __post_init__(self):
        if self.kind not in ("explicit", "ball", "annulus"):
            raise ValueError(f"unknown wavenumber-set kind {self.kind!r}")
        if self.kind == "annulus" and not self.lo < self.hi:
            raise ValueError(f"annulus needs lo < hi, got ({self.lo}, {self.hi})")

    @classmethod
    def explicit(cls, points: Iterable[Any]) -> WavenumberSet:
        return cls("explicit", frozenset(_as_wavevector(p) for p in points))

    @classmethod
    def ball(cls, radius: int) -> WavenumberSet:
        return cls("ball", hi=int(radius))

    @classmethod
    def annulus(cls, lo: int, hi: int) -> WavenumberSet:
        return cls("annulus", lo=int(lo), hi=int(hi))

    @property
    def radius(self) -> int:
        return self.hi

    def _contains_sq(self, k: Wavevector, ksq: int) -> bool:
        if self.kind == "explicit":
            return k in self.points
        if self.kind == "ball":
            return self.hi >= 0 and ksq <= self.hi * self.hi
        below = self.lo < 0 or ksq > self.lo * self.lo
        return below and ksq <= self.hi * self.hi

    def __contains__(self, k) -> bool:
        k = _as_wavevector(k)
        return self._contains_sq(k, sum(c * c for c in k))

    def mask(self, f: FourierField) -> np.ndarray:
        """Boolean mask over ``f.wavevectors`` selecting members of the set."""
        return np.fromiter(
            (self._contains_sq(k, s) for k, s in zip(f.wavevectors, f.ksq_exact)),
            dtype=bool,
            count=len(f),
        )

    def enumerate(self, dims: int, symmetry: str = ONE_SIDED) -> list[Wavevector]:
        """All member wavevectors admissible under ``(dims, symmetry)``, sorted."""
        if self.kind == "explicit":
            pts = [p for p in self.points if len(p) == dims and any(p)]
            if symmetry == ONE_SIDED:
                pts = [p for p in pts if _leading_positive(p)]
            return sorted(pts)
        r = self.hi
        if r < 0:
            return []
        rng = range(-r, r + 1)
        cands = [(i,) for i in rng] if dims == 1 else [(i, j) for i in rng for j in rng]
        out = [k for k in cands if any(k) and k in self]
        if symmetry == ONE_SIDED:
            out = [k for k in out if _leading_positive(k)]
        return sorted(out)


# ---------------------------------------------------------------------------
# Norms, inner products, projections


def sobolev_norm(f: FourierField, alpha: float) -> float:
    """Homogeneous Sobolev norm ``(sum_k |k|^(2 alpha) |f_k|^2)^(1/2)`` over
    the stored entries.  ``alpha = -q`` gives the mix-norm."""
    if not len(f):
        return 0.0
    return float(math.sqrt(math.fsum(f.weighted_energy(alpha))))


def mixnorm(f: FourierField, q: float) -> float:
    return sobolev_norm(f, -q)


def inner_product(f: FourierField, g: FourierField) -> complex:
    """``sum_k f_k conj(g_k)`` over the union of stored wavevectors."""
    if not f.same_convention(g):
        raise ConventionMismatch(
            f"cannot pair ({f.dims}, {f.symmetry}) with ({g.dims}, {g.symmetry})"
        )
    small, large = (f, g) if len(f) <= len(g) else (g, f)
    idx = large.index
    pos_small, pos_large = [], []
    for i, k in enumerate(small.wavevectors):
        j = idx.get(k)
        if j is not None:
            pos_small.append(i)
            pos_large.append(j)
    if not pos_small:
        return 0j
    a = small.amplitudes[pos_small]
    b = large.amplitudes[pos_large]
    if small is f:
        return complex(np.sum(a * np.conj(b)))
    return complex(np.sum(b * np.conj(a)))


def project(f: FourierField, wavenumbers: WavenumberSet) -> FourierField:
    """Keep exactly the entries of ``f`` whose wavevector lies in the set."""
    m = wavenumbers.mask(f)
    keys = [k for k, keep in zip(f.wavevectors, m) if keep]
    return f.replace(keys, f.amplitudes[m])


# ---------------------------------------------------------------------------
# Physical-grid transforms


def _check_grid_size(n: int) -> int:
    n = int(n)
    if n < 2 or n & (n - 1):
        raise ValueError(f"grid size must be a power of two >= 2, got {n}")
    return n


def to_grid(f: FourierField, grid_size: int) -> np.ndarray:
    """Synthesize samples ``f(j/N)`` on an ``N`` (or ``N x N``) grid.

    One-sided and real fields give a real array; other full-lattice fields
    give a complex one.  Every stored component must satisfy
    ``|k_j| < N/2`` so that no two modes alias.
    """
    n = _check_grid_size(grid_size)
    if 2 * f.max_component >= n:
        raise GridTooSmall(f"grid of {n} points cannot resolve |k_j| = {f.max_component}")
    shape = (n,) * f.dims
    dense = np.zeros(shape, dtype=np.complex128)
    for k, v in f:
        dense[tuple(c % n for c in k)] += v
        if f.symmetry == ONE_SIDED:
            dense[tuple(-c % n for c in k)] += v.conjugate()
    grid = np.fft.ifftn(dense) * dense.size
    if f.real:
        return np.ascontiguousarray(grid.real)
    return grid


def dense_to_field(
    coeffs: np.ndarray,
    symmetry: str = FULL_LATTICE,
    real: bool = False,
    tol: float = 0.0,
) -> FourierField:
    """Wrap an FFT-ordered coefficient array as a field.

    The ``k = 0`` entry and every Nyquist index are dropped, as are entries
    with ``|f_k| <= tol`` when ``tol > 0``.
    """
    n = coeffs.shape[0]
    dims = coeffs.ndim
    freqs = np.fft.fftfreq(n, 1.0 / n).astype(np.int64)
    if dims == 1:
        kk = [freqs]
    else:
        k1, k2 = np.meshgrid(freqs, freqs, indexing="ij")
        kk = [k1, k2]
    keep = np.ones(coeffs.shape, dtype=bool)
    for comp in kk:
        keep &= comp != -(n // 2)
    nonzero = np.zeros(coeffs.shape, dtype=bool)
    for comp in kk:
        nonzero |= comp != 0
    keep &= nonzero
    if symmetry == ONE_SIDED:
        lead = kk[0] if dims == 1 else np.where(kk[0] != 0, kk[0], kk[1])
        keep &= lead > 0
    if tol > 0:
        keep &= np.abs(coeffs) > tol
    stacked = np.stack([c[keep] for c in kk], axis=-1).tolist()
    keys = [tuple(row) for row in stacked]
    return FourierField(keys, coeffs[keep], dims, symmetry, real)


def to_spectrum(
    grid: np.ndarray, symmetry: str = FULL_LATTICE, tol: float = 0.0
) -> FourierField:
    """Fourier coefficients ``f_k = N^-d sum_x f(x) exp(-2 pi i k.x)`` of a grid.

    The grid mean (``k = 0``) and Nyquist indices are discarded.  A real grid
    yields a field declared real whose Hermitian symmetry holds exactly.
    """
    grid = np.asarray(grid)
    if grid.ndim not in (1, 2) or len(set(grid.shape)) != 1:
        raise DimensionMismatch(f"expected an N or N x N grid, got shape {grid.shape}")
    _check_grid_size(grid.shape[0])
    is_real = not np.iscomplexobj(grid)
    coeffs = np.fft.fftn(grid) / grid.size
    if is_real:
        mirrored = np.conj(np.roll(np.flip(coeffs), 1, axis=tuple(range(grid.ndim))))
        coeffs = 0.5 * (coeffs + mirrored)
    elif symmetry == ONE_SIDED:
        raise ConventionMismatch("a one-sided field needs a real grid")
    return dense_to_field(coeffs, symmetry=symmetry, real=is_real, tol=tol)


def grid_transform(obj, direction: str, grid_size: int | None = None, **kwargs):
    """Dispatch to :func:`to_grid` (``direction='to_grid'``) or
    :func:`to_spectrum` (``direction='to_spectrum'``)."""
    if direction == "to_grid":
        if grid_size is None:
            raise ValueError("to_grid needs grid_size")
        return to_grid(obj, grid_size)
    if direction == "to_spectrum":
        grid = np.asarray(obj)
        if grid_size is not None and grid.shape[0] != grid_size:
            raise DimensionMismatch(f"grid has {grid.shape[0]} points, expected {grid_size}")
        return to_spectrum(grid, **kwargs)
    raise ValueError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------------------
# Trajectories


@dataclass(frozen=True)
class SpectrumSeries:
    """Time-ordered samples ``(t, f^t)`` from one evolution run."""

    times: tuple[float, ...]
    fields: tuple[FourierField, ...]
    system: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "fields", tuple(self.fields))
        if len(self.times) != len(self.fields):
            raise ValueError("times and fields differ in length")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("sample times must be strictly increasing")
        if any(t < 0 for t in self.times):
            raise ValueError("sample times must be >= 0")
        if self.fields:
            ref = self.fields[0]
            for f in self.fields[1:]:
                if not f.same_convention(ref):
                    raise ConventionMismatch("all samples must share dims and symmetry")

    @classmethod
    def from_samples(cls, samples, system: str = "", params: dict | None = None):
        samples = list(samples)
        return cls(
            tuple(t for t, _ in samples), tuple(f for _, f in samples), system, dict(params or {})
        )

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self):
        return iter(zip(self.times, self.fields))

    def __getitem__(self, i):
        if isinstance(i, slice):
            return SpectrumSeries(self.times[i], self.fields[i], self.system, self.params)
        return self.times[i], self.fields[i]

    def head(self, n: int) -> SpectrumSeries:
        """The first ``n`` samples, used for horizon-halving checks."""
        return self[:n]

    @property
    def t(self) -> np.ndarray:
        return np.asarray(self.times)

    @property
    def dims(self) -> int:
        return self.fields[0].dims if self.fields else 0

    @property
    def symmetry(self) -> str:
        return self.fields[0].symmetry if self.fields else ""

    def index_of(self, t: float) -> int:
        try:
            return self.times.index(float(t))
        except ValueError:
            raise KeyError(f"no sample at t = {t}") from None
