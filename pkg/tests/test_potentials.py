"""Potential variants: evaluation, supports, Fourier transforms, JSON schema."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import scatter1d as s
from conftest import assert_close, corpus


class TestEvaluate:
    def test_barrier_midpoint(self):
        z = 0.7 - 0.3j
        p = s.PiecewiseConstant((0.0, 1.0), (z,))
        assert p.evaluate(0.5) == z

    def test_grating_half_period(self):
        z = 1.1 + 0.2j
        p = s.ExpGrating(z, 1, 2.0)
        assert_close(p.evaluate(1.0), -z, 1e-14, "exp(i*pi) flips sign")

    def test_time_reversed_barrier(self):
        p = s.TimeReversed(s.PiecewiseConstant((0.0, 1.0), (1 + 2j,)))
        assert p.evaluate(0.5) == 1 - 2j

    def test_time_reverse_involution(self):
        inner = s.ExpGrating(0.4 - 0.6j, 2, 1.3, 0.2)
        twice = s.TimeReversed(s.TimeReversed(inner))
        x = np.linspace(0.2, 1.5, 57)
        np.testing.assert_allclose(twice.evaluate(x), inner.evaluate(x), rtol=0, atol=0)

    def test_outside_support_is_zero(self):
        for name, p in corpus().items():
            a, b = p.support()
            width = max(b - a, 1.0)
            xs = np.array([a - 0.37 * width, b + 0.41 * width])
            np.testing.assert_array_equal(p.evaluate(xs), 0, err_msg=name)

    def test_delta_comb_smooth_part_zero(self):
        p = s.DeltaComb([(2j, 0.0), (1.0, 1.0)])
        assert p.evaluate(0.5) == 0
        assert p.delta_terms() == (s.DeltaTerm(2j, 0.0), s.DeltaTerm(1.0, 1.0))


class TestSupport:
    def test_translated_barrier(self):
        p = s.Translated(s.PiecewiseConstant((0.0, 2.0), (1.0,)), 0.7)
        assert p.support() == (0.7, 2.7)

    def test_sum_hull(self):
        p = s.Sum(
            [s.PiecewiseConstant((0.0, 1.0), (1.0,)), s.PiecewiseConstant((2.0, 3.0), (1.0,))]
        )
        assert p.support() == (0.0, 3.0)
        assert not p.overlapping

    def test_smis_support(self):
        p = s.SmisProfile(np.pi, 0.01, 2, 0.0)
        a, b = p.support()
        assert a == 0.0
        assert_close(b, 2.0, 1e-14)

    def test_translation_is_exact(self):
        p = s.ExpGrating(1.0, 1, 1.7, 0.3)
        a, b = p.support()
        q = s.Translated(p, 1.25)
        assert q.support() == (a + 1.25, b + 1.25)

    def test_overlap_flag(self):
        p = s.Sum(
            [s.PiecewiseConstant((0.0, 2.0), (1.0,)), s.PiecewiseConstant((1.0, 3.0), (1.0,))]
        )
        assert p.overlapping

    def test_locally_periodic_requires_room(self):
        cell = s.PiecewiseConstant((0.0, 1.0), (1.0,))
        with pytest.raises(ValueError):
            s.LocallyPeriodic(cell, 3, 0.8)
        s.LocallyPeriodic(cell, 3, 1.0)  # touching is allowed


class TestValidation:
    def test_delta_locations_increasing(self):
        with pytest.raises(ValueError):
            s.DeltaComb([(1.0, 1.0), (1.0, 0.0)])

    def test_delta_strengths_nonzero(self):
        with pytest.raises(ValueError):
            s.DeltaComb([(0.0, 0.0)])

    def test_smis_alpha_domain(self):
        with pytest.raises(ValueError):
            s.SmisProfile(1.0, -0.3, 1)

    def test_breakpoints(self):
        with pytest.raises(ValueError):
            s.PiecewiseConstant((0.0, 0.0), (1.0,))


class TestFourier:
    def test_single_delta_constant(self):
        z = 1.3 - 0.4j
        p = s.DeltaComb([(z, 0.0)])
        for kap in (0.0, 0.7, -3.0, 12.0):
            assert_close(p.fourier(kap), z, 1e-14)

    def test_grating_at_bragg(self):
        # at kappa = 2*pi*n/L the window integral is L exactly
        z, n, L = 0.9 + 0.1j, 2, 1.6
        p = s.ExpGrating(z, n, L)
        assert_close(p.fourier(2 * np.pi * n / L), z * L, 1e-12)

    def test_barrier_dc(self):
        z, L = 1.1 - 0.7j, 1.9
        p = s.PiecewiseConstant((0.0, L), (z,))
        assert_close(p.fourier(0.0), z * L, 1e-12)

    def test_conjugation_symmetry(self):
        # conj(v)~(kappa) = conj(v~(-kappa)) for real kappa
        for name, p in corpus().items():
            pbar = s.TimeReversed(p)
            for kap in (0.0, 1.1, -2.3):
                assert_close(
                    pbar.fourier(kap), np.conj(p.fourier(-kap)), 5e-9, f"{name} kap={kap}"
                )

    def test_sum_additivity(self):
        parts = [
            s.PiecewiseConstant((0.0, 1.0), (0.5 + 0.1j,)),
            s.ExpGrating(0.3, 1, 1.0, 2.0),
        ]
        total = s.Sum(parts)
        for kap in (0.4, -1.7):
            expect = sum(q.fourier(kap) for q in parts)
            assert_close(total.fourier(kap), expect, 1e-11)

    def test_analytic_matches_sampled_quadrature(self):
        # piecewise-constant: compare closed form against the Filon quadrature
        # of a finely sampled copy, 1e-6 relative (linear sampling smears each
        # jump over one cell, so the grid must be deep)
        p = s.PiecewiseConstant((-0.5, 0.2, 1.0), (1.2 - 0.3j, 0.4 + 0.8j))
        grid = np.linspace(-0.5, 1.0, 3_000_001)
        sampled = s.Sampled(-0.5, grid[1] - grid[0], p.evaluate(grid))
        for kap in (0.0, 2.6, 9.0):
            ana = p.fourier(kap)
            quad = sampled.fourier(kap)
            assert abs(ana - quad) <= 1e-6 * max(1.0, abs(ana))

    def test_delta_matches_mollified(self):
        # narrow gaussian of the same area approximates the comb transform
        z, a = 0.8 + 0.5j, 0.3
        comb = s.DeltaComb([(z, a)])
        sig = 1e-4
        grid = np.linspace(a - 8 * sig, a + 8 * sig, 4001)
        vals = z * np.exp(-((grid - a) ** 2) / (2 * sig**2)) / (sig * np.sqrt(2 * np.pi))
        moll = s.Sampled(grid[0], grid[1] - grid[0], vals)
        for kap in (0.0, 1.7):
            ana = comb.fourier(kap)
            assert abs(moll.fourier(kap) - ana) <= 1e-6 * abs(ana)

    def test_locally_periodic_equals_sum(self):
        lp = s.LocallyPeriodic(s.PiecewiseConstant((0.0, 0.4), (0.7j,)), 4, 0.6)
        expanded = lp.as_sum()
        for kap in (0.0, 1.3, 5.2):
            assert_close(lp.fourier(kap), expanded.fourier(kap), 1e-11)


class TestDoubleFourier:
    def test_two_deltas(self):
        z1, a1 = 0.4 + 0.2j, -0.3
        z2, a2 = -0.6j, 0.8
        p = s.DeltaComb([(z1, a1), (z2, a2)])
        k1, k2 = 1.2, -0.5
        expect = z1 * z2 * np.exp(-1j * (k1 * a1 + k2 * a2))
        assert_close(p.double_fourier(k1, k2), expect, 1e-14)

    def test_grating_degenerate_point(self):
        # both arguments at the grating harmonic: value is z^2 L^2 / 2
        z, n, L = 0.5 - 0.3j, 1, 1.3
        p = s.ExpGrating(z, n, L)
        q = 2 * np.pi * n / L
        assert_close(p.double_fourier(q, q), z * z * L * L / 2, 1e-12)

    def test_zero_potential(self):
        assert s.zero_potential().double_fourier(1.0, 2.0) == 0

    def test_against_nested_quadrature(self):
        p = s.ExpGrating(0.8 - 0.3j, 2, 1.7, 0.4)
        k1, k2 = 1.1, -0.7
        xs = np.linspace(0.4, 2.1, 20001)
        v = p.evaluate(xs)
        c = np.exp(-1j * k1 * xs) * v
        inner = np.concatenate([[0], np.cumsum(0.5 * (c[1:] + c[:-1]) * np.diff(xs))])
        brute = np.trapezoid(np.exp(-1j * k2 * xs) * v * inner, xs)
        assert_close(p.double_fourier(k1, k2), brute, 5e-7)

    def test_disjoint_sum_rule(self):
        left = s.PiecewiseConstant((0.0, 0.8), (0.5 + 0.2j,))
        right = s.ExpGrating(0.3, 1, 0.9, 1.5)
        total = s.Sum([left, right])
        k1, k2 = 0.9, 1.4
        expect = (
            left.double_fourier(k1, k2)
            + right.double_fourier(k1, k2)
            + left.fourier(k1) * right.fourier(k2)
        )
        assert_close(total.double_fourier(k1, k2), expect, 1e-10)

    def test_sampled_grid_route(self):
        p = s.Sampled.from_callable(lambda x: 0.4 * np.sin(np.pi * x) ** 2, 0.0, 1.0, 2048)
        xs = p.grid
        v = p.values
        k1, k2 = 2.0, -1.0
        c = np.exp(-1j * k1 * xs) * v
        inner = np.concatenate([[0], np.cumsum(0.5 * (c[1:] + c[:-1]) * np.diff(xs))])
        brute = np.trapezoid(np.exp(-1j * k2 * xs) * v * inner, xs)
        assert_close(p.double_fourier(k1, k2), brute, 1e-6)


class TestPermittivity:
    def test_uniform_is_zero(self):
        grid = np.linspace(-1, 1, 101)
        p = s.from_permittivity(grid, np.ones(101), 2.0)
        assert np.all(p.values == 0)

    def test_slab_maps_to_barrier(self):
        k, z, L = 2.0, 0.7 - 0.2j, 1.0
        grid = np.linspace(-0.5, L + 0.5, 2001)
        eps = np.ones_like(grid, dtype=complex)
        inside = (grid >= 0) & (grid <= L)
        eps[inside] = 1 - z / k**2
        p = s.from_permittivity(grid, eps, k)
        assert_close(p.evaluate(L / 2), z, 1e-12)

    def test_gain_slab(self):
        k = 2 * np.pi
        grid = np.linspace(-0.2, 1.2, 1401)
        eps = np.ones_like(grid, dtype=complex)
        inside = (grid >= 0) & (grid <= 1)
        eps[inside] = 1 + 1e-3j
        p = s.from_permittivity(grid, eps, k)
        assert_close(p.evaluate(0.5), -(2 * np.pi) ** 2 * 1e-3j, 1e-12)

    def test_rejects_nonunit_ends(self):
        grid = np.linspace(0, 1, 11)
        with pytest.raises(ValueError):
            s.from_permittivity(grid, np.full(11, 1.5), 1.0)


class TestJsonSchema:
    def test_roundtrip_all_variants(self):
        for name, p in corpus().items():
            d = s.potential_to_dict(p)
            assert d["schema"] == "v1"
            q = s.potential_from_dict(d)
            a, b = p.support()
            xs = np.linspace(a - 0.1, b + 0.1, 301)
            np.testing.assert_allclose(
                q.evaluate(xs), p.evaluate(xs), rtol=0, atol=1e-15, err_msg=name
            )
            assert q.delta_terms() == p.delta_terms(), name

    def test_json_serializable(self, tmp_path):
        p = corpus()["sum_disjoint"]
        path = tmp_path / "p.json"
        s.save_potential(p, path)
        loaded = s.load_potential(path)
        assert json.loads(path.read_text())["type"] == "sum"
        assert loaded.support() == p.support()

    def test_unknown_type_rejected(self):
        with pytest.raises(ValueError):
            s.potential_from_dict({"type": "wormhole"})


@settings(max_examples=40, deadline=None)
@given(
    z=st.tuples(
        st.floats(-3, 3, allow_nan=False), st.floats(-3, 3, allow_nan=False)
    ).map(lambda t: complex(*t)),
    a=st.floats(-2, 2, allow_nan=False),
    kap=st.floats(-6, 6, allow_nan=False),
)
def test_translated_phase_property(z, a, kap):
    """Fourier transform of a translated potential picks up e^{-i kappa a}."""
    if z == 0:
        z = 1.0
    base = s.DeltaComb([(z, 0.0)])
    shifted = s.Translated(base, a)
    lhs = shifted.fourier(kap)
    rhs = np.exp(-1j * kap * a) * base.fourier(kap)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))
