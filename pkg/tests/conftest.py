"""Shared corpus and helpers."""

import numpy as np
import pytest

import scatter1d as s


def assert_close(a, b, tol, label=""):
    err = abs(a - b)
    assert err <= tol, f"{label}: |{a} - {b}| = {err:.3e} > {tol:.3e}"


def rel_diff(A, B):
    A = np.asarray(A)
    B = np.asarray(B)
    scale = max(np.abs(A).max(), np.abs(B).max(), 1e-300)
    return float(np.abs(A - B).max() / scale)


def corpus():
    """Mixed bag of finite-range potentials used by cross-engine tests."""
    return {
        "delta_single": s.DeltaComb([(0.8 + 0.4j, 0.2)]),
        "delta_double": s.DeltaComb([(1.1 - 0.6j, -0.7), (0.5 + 0.9j, 0.4)]),
        "delta_triple": s.DeltaComb([(0.4, -1.0), (-0.6j, 0.0), (0.3 + 0.3j, 1.2)]),
        "barrier_real": s.PiecewiseConstant.barrier(1.5, 0.0, 1.0),
        "barrier_complex": s.PiecewiseConstant.barrier(1.0 + 0.5j, -0.4, 1.1),
        "bilayer": s.PiecewiseConstant((-0.5, 0.0, 0.5), (2.0 - 1.0j, 1.0 + 0.5j)),
        "grating": s.ExpGrating(0.3 - 0.1j, 1, 2.0),
        "fourier_cell": s.FourierCell({1: 0.2 + 0.1j, -2: 0.1j, 0: 0.05}, 1.5),
        "smis": s.SmisProfile(1.0, 0.02, 2, 0.3),
        "sampled_bump": s.Sampled.from_callable(
            lambda x: (0.7 - 0.2j) * np.sin(np.pi * x / 1.4) ** 2, 0.0, 1.4, 512
        ),
        "sum_disjoint": s.Sum(
            [
                s.PiecewiseConstant.barrier(0.8j, -1.5, -0.7),
                s.ExpGrating(0.2, 1, 1.0, 0.5),
            ]
        ),
        "translated": s.Translated(s.PiecewiseConstant.barrier(0.9 - 0.3j, 0.0, 0.8), 2.2),
        "time_reversed": s.TimeReversed(s.PiecewiseConstant.barrier(0.6 + 0.7j, 0.1, 0.9)),
        "locally_periodic": s.LocallyPeriodic(
            s.PiecewiseConstant.barrier(0.5 + 0.2j, 0.0, 0.4), 3, 0.6
        ),
    }


def smooth_corpus():
    """Delta-free potentials for the S-curve method, winding numbers 0-3 at k=1."""
    return {
        "short_barrier": s.PiecewiseConstant.barrier(0.8 + 0.3j, 0.0, 1.2),  # kL/pi ~ 0.38
        "barrier_w1": s.PiecewiseConstant.barrier(0.5 - 0.2j, 0.0, 3.5),     # ~1.1
        "bilayer_w2": s.PiecewiseConstant((0.0, 3.0, 6.5), (0.4 + 0.1j, -0.3j)),  # ~2.1
        "grating_w1": s.ExpGrating(0.4, 1, np.pi),
        "grating_w2": s.ExpGrating(0.2 + 0.2j, 2, 2 * np.pi),
        "fourier_w1": s.FourierCell({1: 0.3, 2: 0.1j}, np.pi),
        "smis_w2": s.SmisProfile(1.0, 0.05, 2, 0.0),
        "smis_w3": s.SmisProfile(1.0, 0.03, 3, 0.5),
        "sampled_w1": s.Sampled.from_callable(
            lambda x: 0.5 * np.sin(np.pi * x / 3.3) ** 2, 0.0, 3.3, 4096
        ),
        "sum_w3": s.Sum(
            [
                s.PiecewiseConstant.barrier(0.3 + 0.1j, 0.0, 2.0),
                s.PiecewiseConstant.barrier(-0.2j, 5.0, 8.0),
            ]
        ),
    }


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)
