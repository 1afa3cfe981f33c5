import math

import numpy as np
import pytest

from bhtlab.grid import (
    Grid,
    SampledFunction,
    evaluate_at,
    flp_norm,
    forward_transform,
    from_spectrum,
    inverse_transform,
    lp_quasinorm,
)
from conftest import random_bandlimited


class TestGridConstruction:
    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            Grid(M=100, L=1.0)

    def test_rejects_small_m(self):
        with pytest.raises(ValueError):
            Grid(M=4, L=1.0)

    def test_spacing_identity(self):
        g = Grid(M=256, L=32.0, x0=-16.0)
        assert g.h * g.M == g.L

    def test_frequency_set_symmetric_up_to_nyquist(self):
        g = Grid(M=16, L=2.0)
        f = np.sort(g.freqs)
        # single Nyquist index at -M/2, all others paired
        assert f[0] == -g.nyquist
        assert np.allclose(f[1:], -f[:0:-1])

    def test_sampled_function_rejects_nan(self):
        g = Grid(M=8, L=1.0)
        vals = np.ones(8, dtype=complex)
        vals[3] = np.nan
        with pytest.raises(ValueError):
            SampledFunction(g, vals)


class TestForwardTransform:
    def test_constant_function(self, unit_grid):
        f = unit_grid.sample(lambda x: np.ones_like(x))
        s = forward_transform(f)
        assert abs(s.coeffs[0] - 1.0) < 1e-12
        assert np.max(np.abs(s.coeffs[1:])) < 1e-12

    def test_pure_tone(self, unit_grid):
        f = unit_grid.sample(lambda x: np.exp(2j * np.pi * 3 * x))
        s = forward_transform(f)
        at3 = np.isclose(s.freqs, 3.0)
        assert at3.sum() == 1
        assert abs(s.coeffs[at3][0] - 1.0) < 1e-12
        assert np.max(np.abs(s.coeffs[~at3])) < 1e-12

    def test_gaussian_closed_form(self):
        # e^{-pi x^2} transforms to e^{-pi xi^2}
        g = Grid(M=4096, L=32.0, x0=-16.0)
        f = g.sample(lambda x: np.exp(-np.pi * x**2))
        s = forward_transform(f)
        expected = np.exp(-np.pi * s.freqs**2)
        assert np.max(np.abs(s.coeffs - expected)) < 1e-8

    def test_round_trip(self, wide_grid):
        f = random_bandlimited(wide_grid, seed=1)
        back = inverse_transform(forward_transform(f))
        num = np.linalg.norm(back.values - f.values)
        den = np.linalg.norm(f.values)
        assert num / den < 1e-12


class TestLpQuasinorm:
    def test_constant_half_power(self, unit_grid):
        f = unit_grid.sample(lambda x: np.ones_like(x))
        assert abs(lp_quasinorm(f, 0.5, window=(0.0, 1.0)) - 1.0) < 1e-12

    def test_constant_two(self, unit_grid):
        f = unit_grid.sample(lambda x: 2.0 * np.ones_like(x))
        assert abs(lp_quasinorm(f, 1.0, window=(0.0, 1.0)) - 2.0) < 1e-12

    def test_gaussian_l2(self, wide_grid):
        # ||e^{-pi x^2}||_2 = (int e^{-2 pi x^2} dx)^(1/2) = 2^(-1/4)
        f = wide_grid.sample(lambda x: np.exp(-np.pi * x**2))
        assert abs(lp_quasinorm(f, 2.0) - 2.0 ** (-0.25)) < 1e-6

    def test_rejects_nonpositive_p(self, unit_grid):
        f = unit_grid.sample(lambda x: np.ones_like(x))
        with pytest.raises(ValueError):
            lp_quasinorm(f, 0.0)

    def test_rejects_empty_window(self, wide_grid):
        f = wide_grid.sample(lambda x: np.ones_like(x))
        with pytest.raises(ValueError):
            lp_quasinorm(f, 1.0, window=(0.0001, 0.0002))

    def test_absolute_homogeneity_including_small_p(self, wide_grid):
        f = random_bandlimited(wide_grid, seed=7)
        for p in (0.5, 0.8, 1.0, 2.0, 4.0):
            got = lp_quasinorm(-3.5 * f, p)
            assert abs(got - 3.5 * lp_quasinorm(f, p)) < 1e-10 * got


class TestFlpNorm:
    def test_single_tone(self, unit_grid):
        f = unit_grid.sample(lambda x: np.exp(2j * np.pi * 3 * x))
        assert abs(flp_norm(f, 2.0) - 1.0) < 1e-12

    def test_rejects_q_below_one(self, unit_grid):
        f = unit_grid.sample(lambda x: np.ones_like(x))
        with pytest.raises(ValueError):
            flp_norm(f, 0.9)

    def test_direct_summation_oracle(self, wide_grid):
        f = random_bandlimited(wide_grid, seed=3)
        c = np.abs(forward_transform(f).coeffs)
        expected = (np.sum(c**4) / wide_grid.L) ** 0.25
        assert abs(flp_norm(f, 4.0) - expected) < 1e-12

    def test_disjointly_modulated_copies(self):
        # N spectrally disjoint modulates of one bump: norm scales as N^{1/q}
        g = Grid(M=2048, L=16.0, x0=-8.0)
        base = g.sample(lambda x: np.exp(-np.pi * x**2))
        n = 5
        vals = sum(base.values * np.exp(2j * np.pi * (40 * k) * g.points) for k in range(n))
        f = SampledFunction(g, vals)
        for q in (1.5, 2.0, 4.0):
            single = flp_norm(base, q)
            assert abs(flp_norm(f, q) - n ** (1.0 / q) * single) < 1e-6 * single


class TestParseval:
    def test_parseval_random_ensemble(self, wide_grid):
        for seed in range(100):
            f = random_bandlimited(wide_grid, seed=seed)
            a = lp_quasinorm(f, 2.0)
            b = flp_norm(f, 2.0)
            assert abs(a - b) < 1e-10 * max(a, b)


class TestEvaluateAt:
    def test_matches_grid_samples(self, wide_grid):
        f = random_bandlimited(wide_grid, seed=11)
        pts = wide_grid.points[::97]
        got = evaluate_at(f, pts)
        assert np.max(np.abs(got - f.values[::97])) < 1e-9

    def test_off_grid_tone(self, unit_grid):
        f = unit_grid.sample(lambda x: np.exp(2j * np.pi * 5 * x))
        pts = np.array([0.123456, 0.777])
        got = evaluate_at(f, pts)
        assert np.max(np.abs(got - np.exp(2j * np.pi * 5 * pts))) < 1e-10
