"""Spectral evaluation of bilinear multipliers and a p.v. quadrature oracle.

apply_bilinear_multiplier computes

    g(x) = sum_{m1} sum_{m2} m(xi_1, xi_2) f1^(xi_1) f2^(xi_2)
           e^{2 pi i x (xi_1 + xi_2)} / L^2

by the factorized scheme: for each active xi_1, weight f2's spectrum by
m(xi_1, .), inverse-transform, modulate by e^{2 pi i x xi_1} and accumulate.
Cost is O(K M log M) for K active frequencies in f1.

bht_timedomain is an independent cross-check for the jump symbol: the
antisymmetrized principal-value quadrature

    int_eta^tmax [f1(x-t) f2(x+t) - f1(x+t) f2(x-t)] k(t) dt

where k is by default the periodized kernel (pi/L) cot(pi t / L), the exact
torus analogue of 1/t (their difference is O(t / L^2), which would otherwise
dominate the error budget).  The multiplier convention and the p.v.
convention differ by the frozen constant PV_TO_MULTIPLIER = i / pi, pinned
by a single-tone calibration (see tests).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .grid import (
    Grid,
    SampledFunction,
    Spectrum,
    active_indices,
    band_energy_fraction,
    forward_transform,
    max_active_frequency,
)
from .symbols import Symbol

# Multiplier-convention BHT equals PV_TO_MULTIPLIER times the odd-kernel
# p.v. quadrature: for tones e^{2 pi i a x}, e^{2 pi i b x} the quadrature
# gives i pi sgn(b - a) e^{2 pi i (a+b) x} while the sgn(xi1 - xi2)
# multiplier gives sgn(a - b) e^{2 pi i (a+b) x}.  Pinned by the
# single-tone calibration test and frozen here.
PV_TO_MULTIPLIER = 1j / math.pi

_CHUNK = 64  # active-frequency chunk size; fixed so results do not depend on worker count


def worker_count(max_workers: Optional[int] = None) -> int:
    """Worker cap: explicit argument wins, else BHT_LAB_THREADS, else 1."""
    if max_workers is not None:
        n = int(max_workers)
    else:
        env = os.environ.get("BHT_LAB_THREADS", "")
        try:
            n = int(env) if env else 1
        except ValueError:
            raise ValueError(f"BHT_LAB_THREADS must be a positive integer, got {env!r}")
    if n < 1:
        raise ValueError(f"worker count must be positive, got {n}")
    return n


def apply_bilinear_multiplier(
    sym: Symbol,
    f1: SampledFunction,
    f2: SampledFunction,
    rel_tol: float = 1e-14,
    max_workers: Optional[int] = None,
) -> SampledFunction:
    """Apply the bilinear multiplier operator with symbol sym to (f1, f2).

    Both inputs must share one grid and be effectively band-limited (top 10%
    of the frequency range carrying < 1e-10 of energy); a violation is
    flagged on the result rather than raised.  Accumulation order is fixed
    by chunk index, so results are identical for any worker count.
    """
    if f1.grid != f2.grid:
        raise ValueError("f1 and f2 must share one grid")
    g = f1.grid
    warn = None
    if band_energy_fraction(f1) >= 1e-10 or band_energy_fraction(f2) >= 1e-10:
        warn = "band-limit precondition violated: top 10% of frequency range carries >= 1e-10 of energy"

    s1 = forward_transform(f1)
    s2 = forward_transform(f2)
    act = active_indices(s1.coeffs, rel_tol)
    x = g.points
    freqs = g.freqs
    phase0 = np.exp(2j * np.pi * freqs * g.x0)  # inverse-transform phase for x0 offset

    def _chunk_sum(idx: np.ndarray) -> np.ndarray:
        xi1 = freqs[idx]
        # rows: m(xi_1, .) weighted spectrum of f2 for each active xi_1
        w = sym(xi1[:, None], freqs[None, :]) * s2.coeffs[None, :]
        inner = np.fft.ifft(w * phase0[None, :], axis=1) / g.h  # (1/L) sum over xi_2
        mod = np.exp(2j * np.pi * np.outer(xi1, x))
        return (s1.coeffs[idx][:, None] * mod * inner).sum(axis=0) / g.L

    chunks = [act[a:a + _CHUNK] for a in range(0, act.size, _CHUNK)]
    out = np.zeros(g.M, dtype=complex)
    nw = worker_count(max_workers)
    if nw == 1 or len(chunks) <= 1:
        for idx in chunks:
            out += _chunk_sum(idx)
    else:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            for part in pool.map(_chunk_sum, chunks):
                out += part  # map preserves chunk order, so the sum order is fixed
    return SampledFunction(g, out, warning=warn)


@dataclass(frozen=True)
class PvQuadratureConfig:
    """Quadrature plan for the principal-value oracle.

    The inner panel [eta, t_switch] is log-spaced with ``nodes`` points per
    decade (the integrand is smooth and non-oscillatory there); the outer
    panel [t_switch, tmax] is uniform with a step sized to resolve the
    fastest active oscillation.  periodic_kernel selects the torus kernel
    (pi/L) cot(pi t/L) instead of raw 1/t.
    """

    eta: float = 1e-6
    tmax: float = 8.0
    nodes: int = 256
    t_switch: float = 0.1
    periodic_kernel: bool = True

    def __post_init__(self):
        if not (0 < self.eta < self.tmax):
            raise ValueError(f"need 0 < eta < tmax, got eta={self.eta}, tmax={self.tmax}")
        if self.nodes < 16:
            raise ValueError(f"nodes per decade must be >= 16, got {self.nodes}")
        if not (self.eta < self.t_switch <= self.tmax):
            raise ValueError("t_switch must lie strictly between eta and tmax")


def _trapezoid_nodes(cfg: PvQuadratureConfig, max_freq: float):
    """Composite nodes and weights for int F(t) dt over [eta, tmax]."""
    n_log = max(2, int(math.ceil(cfg.nodes * math.log10(cfg.t_switch / cfg.eta))) + 1)
    u = np.linspace(math.log(cfg.eta), math.log(cfg.t_switch), n_log)
    t_log = np.exp(u)
    w_log = np.full(n_log, u[1] - u[0])
    w_log[0] *= 0.5
    w_log[-1] *= 0.5
    w_log *= t_log  # du = dt / t

    dt_target = 0.05 / max(max_freq, 1e-9)
    n_uni = max(2, int(math.ceil((cfg.tmax - cfg.t_switch) / dt_target)) + 1)
    t_uni = np.linspace(cfg.t_switch, cfg.tmax, n_uni)
    w_uni = np.full(n_uni, t_uni[1] - t_uni[0])
    w_uni[0] *= 0.5
    w_uni[-1] *= 0.5

    t = np.concatenate([t_log, t_uni])
    w = np.concatenate([w_log, w_uni])
    return t, w


def _active_expansion(f: SampledFunction, rel_tol: float = 1e-14):
    s = forward_transform(f)
    idx = active_indices(s.coeffs, rel_tol)
    return s.freqs[idx], s.coeffs[idx] / f.grid.L


def bht_timedomain(
    f1: SampledFunction,
    f2: SampledFunction,
    cfg: PvQuadratureConfig,
    points: Sequence[float],
) -> np.ndarray:
    """Antisymmetrized p.v. quadrature of the bilinear singular integral.

    Returns, per evaluation point x, the quadrature of
    [f1(x-t) f2(x+t) - f1(x+t) f2(x-t)] k(t) over [eta, tmax]; the odd
    symmetry makes the p.v. limit a proper integral.  Off-grid values come
    from trigonometric interpolation.  Matches the spectral jump-symbol
    operator up to the global constant PV_TO_MULTIPLIER.
    """
    if f1.grid != f2.grid:
        raise ValueError("f1 and f2 must share one grid")
    g = f1.grid
    if cfg.tmax > 0.5 * g.L:
        raise ValueError(f"tmax={cfg.tmax} exceeds half the period L={g.L}")
    nu_max = max(max_active_frequency(f1), max_active_frequency(f2))
    if cfg.eta * nu_max > 0.1:
        raise ValueError(
            f"eta={cfg.eta} too large to resolve oscillation at frequency {nu_max:g} "
            f"(need eta * max_active_frequency <= 0.1)"
        )

    pts = np.asarray(points, dtype=float)
    t, w = _trapezoid_nodes(cfg, 2.0 * nu_max)
    if cfg.periodic_kernel:
        kernel = (np.pi / g.L) / np.tan(np.pi * t / g.L)
    else:
        kernel = 1.0 / t
    wk = w * kernel

    xi1, c1 = _active_expansion(f1)
    xi2, c2 = _active_expansion(f2)
    # f(x -+ t) = sum_k [c_k e^{2 pi i xi_k x}] e^{-+ 2 pi i xi_k t}
    d1 = c1[:, None] * np.exp(2j * np.pi * np.outer(xi1, pts))  # (K1, P)
    d2 = c2[:, None] * np.exp(2j * np.pi * np.outer(xi2, pts))  # (K2, P)
    out = np.zeros(pts.shape, dtype=complex)
    step = max(1, (1 << 22) // max(1, max(xi1.size, xi2.size) * max(1, pts.size)))
    for a in range(0, t.size, step):
        tt = t[a:a + step]
        e1 = np.exp(-2j * np.pi * np.outer(tt, xi1))  # (T, K1)
        e2 = np.exp(-2j * np.pi * np.outer(tt, xi2))
        f1m = e1 @ d1            # f1(x - t)
        f1p = np.conj(e1) @ d1   # f1(x + t); conj valid since e1 has unit modulus
        f2m = e2 @ d2
        f2p = np.conj(e2) @ d2
        integrand = f1m * f2p - f1p * f2m
        out += wk[a:a + step] @ integrand
    return out
