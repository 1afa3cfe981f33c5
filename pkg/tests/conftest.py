import numpy as np
import pytest

from bhtlab.grid import Grid


@pytest.fixture(scope="session")
def unit_grid():
    """Period-1 grid for pure-tone checks."""
    return Grid(M=64, L=1.0, x0=0.0)


@pytest.fixture(scope="session")
def wide_grid():
    """Centered period-32 grid resolving Gaussians with negligible wrap-around."""
    return Grid(M=4096, L=32.0, x0=-16.0)


@pytest.fixture(scope="session")
def engine_grid():
    """Grid for multiplier-engine cross-checks (criterion-1 size)."""
    return Grid(M=4096, L=16.0, x0=-8.0)


def random_bandlimited(grid, seed, band=3.0, width=1.5, center=0.0):
    """Random band-limited test function: complex Gaussian spectrum on a band,
    smoothly enveloped, then localized in space by a Gaussian window."""
    rng = np.random.default_rng(seed)
    freqs = grid.freqs
    mask = np.abs(freqs) <= band
    coeffs = np.zeros(grid.M, dtype=complex)
    coeffs[mask] = (rng.standard_normal(mask.sum()) + 1j * rng.standard_normal(mask.sum()))
    coeffs[mask] *= np.exp(-((freqs[mask] / band) ** 2))
    from bhtlab.grid import from_spectrum

    f = from_spectrum(grid, coeffs)
    window = np.exp(-np.pi * ((grid.points - center) / width) ** 2)
    vals = f.values * window
    scale = np.sqrt(grid.h * np.sum(np.abs(vals) ** 2))
    from bhtlab.grid import SampledFunction

    return SampledFunction(grid, vals / scale)
