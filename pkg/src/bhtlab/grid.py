"""Uniform periodic grids, discrete Fourier analysis, and L^p / FL^p norms.

A function is carried as its complex samples on a uniform grid over one
period [x0, x0 + L).  Frequencies are the integer multiples m/L with
m in [-M/2, M/2), stored in FFT order, the Nyquist index assigned to -M/2.
The forward transform is the h-weighted Riemann sum approximating the
continuous Fourier integral; it is exact for band-limited periodic data and
the inverse reverses it exactly, so round trips are lossless up to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform sampling of one period [x0, x0 + L) with M points.

    M must be a power of two (>= 8) so transforms stay fast and the
    frequency set is symmetric about 0 up to the single Nyquist index.
    """

    M: int
    L: float
    x0: float = 0.0

    def __post_init__(self):
        if not isinstance(self.M, (int, np.integer)) or not _is_power_of_two(int(self.M)):
            raise ValueError(f"M must be a power of two, got {self.M!r}")
        if self.M < 8:
            raise ValueError(f"M must be at least 8, got {self.M}")
        if not (np.isfinite(self.L) and self.L > 0):
            raise ValueError(f"period L must be positive and finite, got {self.L!r}")
        if not np.isfinite(self.x0):
            raise ValueError(f"x0 must be finite, got {self.x0!r}")

    @property
    def h(self) -> float:
        """Sample spacing L / M."""
        return self.L / self.M

    @property
    def nyquist(self) -> float:
        """Largest representable frequency magnitude M / (2 L)."""
        return self.M / (2.0 * self.L)

    @cached_property
    def points(self) -> np.ndarray:
        x = self.x0 + self.h * np.arange(self.M)
        x.setflags(write=False)
        return x

    @cached_property
    def freqs(self) -> np.ndarray:
        """Frequencies m / L in FFT order (0, positive, Nyquist at -M/2, negative)."""
        f = np.fft.fftfreq(self.M, d=self.h)
        f.setflags(write=False)
        return f

    def sample(self, fn: Callable[[np.ndarray], np.ndarray]) -> "SampledFunction":
        return SampledFunction(self, np.asarray(fn(self.points), dtype=complex))


def _locked_complex(values, expected_len: int) -> np.ndarray:
    v = np.array(values, dtype=complex, copy=True)
    if v.ndim != 1 or v.shape[0] != expected_len:
        raise ValueError(f"expected {expected_len} samples, got shape {v.shape}")
    if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
        raise ValueError("samples must be finite (no NaN/Inf)")
    v.setflags(write=False)
    return v


@dataclass(frozen=True)
class SampledFunction:
    """Complex samples of a function on a Grid; value j is f(x0 + j h).

    Immutable after construction.  ``warning`` carries a non-fatal flag set
    by operations whose preconditions were only approximately met.
    """

    grid: Grid
    values: np.ndarray
    warning: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _locked_complex(self.values, self.grid.M))

    def with_warning(self, message: str) -> "SampledFunction":
        return SampledFunction(self.grid, self.values, warning=message)

    def _check_same_grid(self, other: "SampledFunction"):
        if self.grid != other.grid:
            raise ValueError("operands live on different grids")

    def __add__(self, other: "SampledFunction") -> "SampledFunction":
        self._check_same_grid(other)
        return SampledFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "SampledFunction") -> "SampledFunction":
        self._check_same_grid(other)
        return SampledFunction(self.grid, self.values - other.values)

    def __mul__(self, other):
        if isinstance(other, SampledFunction):
            self._check_same_grid(other)
            return SampledFunction(self.grid, self.values * other.values)
        return SampledFunction(self.grid, self.values * complex(other))

    __rmul__ = __mul__

    def __neg__(self) -> "SampledFunction":
        return SampledFunction(self.grid, -self.values)


@dataclass(frozen=True)
class Spectrum:
    """Fourier coefficients on a Grid, indexed by frequency m / L in FFT order.

    coeffs[m] approximates the integral of f(x) e^{-2 pi i (m/L) x} over one
    period, so a forward/inverse round trip reproduces samples to rounding.
    """

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _locked_complex(self.coeffs, self.grid.M))

    @property
    def freqs(self) -> np.ndarray:
        return self.grid.freqs


def forward_transform(f: SampledFunction) -> Spectrum:
    g = f.grid
    phase = np.exp(-2j * np.pi * g.freqs * g.x0)
    return Spectrum(g, g.h * np.fft.fft(f.values) * phase)


def inverse_transform(s: Spectrum) -> SampledFunction:
    g = s.grid
    phase = np.exp(2j * np.pi * g.freqs * g.x0)
    return SampledFunction(g, np.fft.ifft(s.coeffs * phase) / g.h)


def from_spectrum(grid: Grid, coeffs) -> SampledFunction:
    return inverse_transform(Spectrum(grid, np.asarray(coeffs, dtype=complex)))


def _window_mask(grid: Grid, window) -> np.ndarray:
    lo, hi = float(window[0]), float(window[1])
    if not (lo < hi):
        raise ValueError(f"window must satisfy lo < hi, got ({lo}, {hi})")
    x = grid.points
    if lo < grid.x0 - 1e-9 * grid.L or hi > grid.x0 + grid.L + 1e-9 * grid.L:
        raise ValueError("window not contained in the grid domain")
    return (x >= lo) & (x <= hi)


def lp_quasinorm(f: SampledFunction, p: float, window=None) -> float:
    """(h * sum_{x_j in window} |f(x_j)|^p)^(1/p); quasi-norm for p < 1.

    window is a closed sub-interval (lo, hi) of the domain, or None for the
    whole period.
    """
    if not (p > 0):
        raise ValueError(f"p must be positive, got {p}")
    if window is None:
        vals = np.abs(f.values)
    else:
        mask = _window_mask(f.grid, window)
        if not np.any(mask):
            raise ValueError(f"window {window} contains no grid points")
        vals = np.abs(f.values[mask])
    return float((f.grid.h * np.sum(vals**p)) ** (1.0 / p))


def flp_norm(f: SampledFunction, q: float) -> float:
    """L^q norm of the Fourier transform, with frequency weight 1/L."""
    if not (q >= 1):
        raise ValueError(f"q must be at least 1, got {q}")
    c = np.abs(forward_transform(f).coeffs)
    return float((np.sum(c**q) / f.grid.L) ** (1.0 / q))


def inner_product(f: SampledFunction, g: SampledFunction) -> complex:
    """Discrete L^2 inner product h * sum f conj(g)."""
    f._check_same_grid(g)
    return complex(f.grid.h * np.sum(f.values * np.conj(g.values)))


def active_indices(coeffs: np.ndarray, rel_tol: float = 1e-14) -> np.ndarray:
    """Indices of coefficients above rel_tol times the largest magnitude."""
    mags = np.abs(coeffs)
    top = mags.max()
    if top == 0.0:
        return np.zeros(0, dtype=int)
    return np.nonzero(mags > rel_tol * top)[0]


def max_active_frequency(f: SampledFunction, rel_tol: float = 1e-12) -> float:
    s = forward_transform(f)
    idx = active_indices(s.coeffs, rel_tol)
    if idx.size == 0:
        return 0.0
    return float(np.max(np.abs(s.freqs[idx])))


def band_energy_fraction(f: SampledFunction, frac_of_range: float = 0.9) -> float:
    """Fraction of spectral energy at |frequency| >= frac_of_range * Nyquist."""
    s = forward_transform(f)
    e = np.abs(s.coeffs) ** 2
    total = e.sum()
    if total == 0.0:
        return 0.0
    high = e[np.abs(s.freqs) >= frac_of_range * f.grid.nyquist].sum()
    return float(high / total)


def evaluate_at(f: SampledFunction, points, rel_tol: float = 1e-14,
                chunk: int = 1 << 16) -> np.ndarray:
    """Trigonometric (spectral) interpolation of f at arbitrary points.

    Uses only the active frequencies, so the cost is O(len(points) * K) for a
    K-banded function.  Evaluates the periodic extension.
    """
    pts = np.asarray(points, dtype=float)
    s = forward_transform(f)
    idx = active_indices(s.coeffs, rel_tol)
    if idx.size == 0:
        return np.zeros(pts.shape, dtype=complex)
    c = s.coeffs[idx] / f.grid.L
    xi = s.freqs[idx]
    flat = pts.ravel()
    out = np.empty(flat.shape, dtype=complex)
    step = max(1, chunk // max(1, idx.size))
    for a in range(0, flat.size, step):
        b = min(a + step, flat.size)
        out[a:b] = np.exp(2j * np.pi * np.outer(flat[a:b], xi)) @ c
    return out.reshape(pts.shape)
