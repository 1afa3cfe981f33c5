"""Bilinear multiplier symbols singular along the frequency diagonal.

A Symbol is an evaluable weight m(xi1, xi2), smooth away from the diagonal
{xi1 = xi2}, together with its decay parameter delta (0 means no exponential
factor is claimed).  Built-ins: the jump symbol sgn(xi1 - xi2), the
exponential-decay family exp(-delta |xi| / dist(xi, diagonal)), and constant
symbols.  verify_symbol_class checks derivative envelopes of the form

    dist^{-|a|} * exp(-delta (1 - |a|/3) |xi| / dist)

by central finite differences up to order two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

SQRT2 = math.sqrt(2.0)

# Largest envelope ratio observed for the built-in symbols over the frozen
# calibration set in verify_symbol_class (delta in {0.5, 1, 2}, radii
# {0.5, 1, 4, 16}, offsets dist/|xi| in {0.7, 0.3, 0.1, 0.02}), then rounded
# up by ~30%.  Reproduced by tests/test_symbols.py::test_envelope_constant.
SYMBOL_ENVELOPE_CONSTANT = 2.5


def dist_to_diagonal(xi1, xi2):
    """Euclidean distance from (xi1, xi2) to the line xi1 = xi2."""
    return np.abs(np.asarray(xi1) - np.asarray(xi2)) / SQRT2


@dataclass(frozen=True)
class Symbol:
    """A bilinear multiplier m(xi1, xi2) with diagonal-singularity metadata.

    eval must be vectorized over numpy arrays and finite off the diagonal;
    built-in kinds are bounded by 1 in modulus and vanish on the diagonal.
    """

    eval: Callable[[np.ndarray, np.ndarray], np.ndarray]
    delta: float = 0.0
    kind: str = "custom"

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError(f"delta must be nonnegative, got {self.delta}")
        if self.kind not in ("sign", "exp-decay", "custom"):
            raise ValueError(f"unknown symbol kind {self.kind!r}")

    def __call__(self, xi1, xi2):
        return self.eval(np.asarray(xi1, dtype=float), np.asarray(xi2, dtype=float))


def sign_symbol() -> Symbol:
    """sgn(xi1 - xi2), zero on the diagonal (the symmetric choice)."""
    return Symbol(lambda a, b: np.sign(a - b).astype(complex), delta=0.0, kind="sign")


def constant_symbol(value: complex = 1.0) -> Symbol:
    c = complex(value)
    return Symbol(lambda a, b: np.full(np.broadcast(a, b).shape, c), delta=0.0, kind="custom")


def exp_decay_symbol(delta: float) -> Symbol:
    """exp(-delta |xi|_2 / dist(xi, diagonal)); zero on the diagonal.

    Since dist <= |xi| for any line through the origin, the exponent is at
    most -delta, so the symbol is bounded by exp(-delta) < 1.
    """
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")

    def _eval(a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        d = np.abs(a - b) / SQRT2
        r = np.hypot(a, b)
        out = np.zeros(np.broadcast(a, b).shape, dtype=complex)
        off = d > 0
        with np.errstate(divide="ignore", over="ignore"):
            out[off] = np.exp(-delta * (r[off] if r.shape else r) / d[off])
        return out

    return Symbol(_eval, delta=delta, kind="exp-decay")


_MULTI_INDICES = {
    0: [(0, 0)],
    1: [(1, 0), (0, 1)],
    2: [(2, 0), (1, 1), (0, 2)],
}


def _central_difference(sym: Symbol, x1: float, x2: float, alpha, h: float) -> complex:
    a1, a2 = alpha
    if (a1, a2) == (0, 0):
        return complex(sym(x1, x2))
    if (a1, a2) == (1, 0):
        return complex(sym(x1 + h, x2) - sym(x1 - h, x2)) / (2 * h)
    if (a1, a2) == (0, 1):
        return complex(sym(x1, x2 + h) - sym(x1, x2 - h)) / (2 * h)
    if (a1, a2) == (2, 0):
        return complex(sym(x1 + h, x2) - 2 * sym(x1, x2) + sym(x1 - h, x2)) / h**2
    if (a1, a2) == (0, 2):
        return complex(sym(x1, x2 + h) - 2 * sym(x1, x2) + sym(x1, x2 - h)) / h**2
    if (a1, a2) == (1, 1):
        return complex(
            sym(x1 + h, x2 + h) - sym(x1 + h, x2 - h) - sym(x1 - h, x2 + h) + sym(x1 - h, x2 - h)
        ) / (4 * h**2)
    raise ValueError(f"unsupported multi-index {alpha}")


@dataclass(frozen=True)
class EnvelopeRow:
    point: tuple
    alpha: tuple
    derivative: float
    envelope: float
    ratio: float


@dataclass(frozen=True)
class SymbolEnvelopeReport:
    rows: tuple
    skipped: tuple
    constant: float
    passed: bool


def envelope_value(delta: float, x1: float, x2: float, order: int) -> float:
    d = float(dist_to_diagonal(x1, x2))
    r = math.hypot(x1, x2)
    return d ** (-order) * math.exp(-delta * (1.0 - order / 3.0) * r / d)


def verify_symbol_class(
    sym: Symbol,
    sample_points: Sequence[tuple],
    max_order: int = 2,
    envelope_constant: float = SYMBOL_ENVELOPE_CONSTANT,
    step_factor: float = 1e-4,
) -> SymbolEnvelopeReport:
    """Finite-difference check of the derivative envelopes at sample points.

    Points on the diagonal are skipped with a notice.  The report passes when
    every ratio |FD derivative| / envelope stays below envelope_constant.
    """
    if not (0 <= max_order <= 2):
        raise ValueError(f"max_order must be 0, 1, or 2, got {max_order}")
    rows = []
    skipped = []
    for pt in sample_points:
        x1, x2 = float(pt[0]), float(pt[1])
        d = float(dist_to_diagonal(x1, x2))
        if d == 0.0:
            skipped.append(((x1, x2), "on the singular diagonal"))
            continue
        h = step_factor * d
        for order in range(max_order + 1):
            for alpha in _MULTI_INDICES[order]:
                fd = abs(_central_difference(sym, x1, x2, alpha, h))
                env = envelope_value(sym.delta, x1, x2, order)
                ratio = fd / env if env > 0 else (0.0 if fd == 0.0 else math.inf)
                rows.append(EnvelopeRow((x1, x2), alpha, fd, env, ratio))
    passed = all(r.ratio <= envelope_constant for r in rows)
    return SymbolEnvelopeReport(tuple(rows), tuple(skipped), envelope_constant, passed)
