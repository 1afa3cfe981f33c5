"""bhtlab: a numerical laboratory for bilinear Hilbert-type multipliers.

Subpackages cover the uniform-grid Fourier substrate, spectral and
time-domain evaluation of bilinear multiplier operators, random-sign
scaling experiments around the frequency-side norm obstruction, the
cone / Whitney / wave-packet decomposition of diagonal-singular symbols,
and the discrete model paraproduct with its maximal / square-function
domination.
"""

__version__ = "0.1.0"

from .grid import (
    Grid,
    SampledFunction,
    Spectrum,
    forward_transform,
    inverse_transform,
    from_spectrum,
    lp_quasinorm,
    flp_norm,
    inner_product,
    evaluate_at,
)
from .symbols import Symbol, sign_symbol, exp_decay_symbol, constant_symbol, dist_to_diagonal
from .engine import PvQuadratureConfig, apply_bilinear_multiplier, bht_timedomain, PV_TO_MULTIPLIER

__all__ = [
    "Grid",
    "SampledFunction",
    "Spectrum",
    "forward_transform",
    "inverse_transform",
    "from_spectrum",
    "lp_quasinorm",
    "flp_norm",
    "inner_product",
    "evaluate_at",
    "Symbol",
    "sign_symbol",
    "exp_decay_symbol",
    "constant_symbol",
    "dist_to_diagonal",
    "PvQuadratureConfig",
    "apply_bilinear_multiplier",
    "bht_timedomain",
    "PV_TO_MULTIPLIER",
]
