import math

import numpy as np
import pytest
from scipy.special import ive

from ktn.features import (VonMisesParams, bessel_ratio, bessel_ratios,
                          root_feature, scaled_bessel_i, von_mises_eval,
                          von_mises_fourier)
from ktn.lattice import build_lattice
from ktn.rkha import power_n


def bessel_series(j, kappa, terms=200):
    """Oracle: direct series sum_r (kappa/2)^(j+2r) / (r! (r+j)!)."""
    half = kappa / 2.0
    term = half ** j / math.factorial(j)
    total = term
    for r in range(1, terms):
        term *= half * half / (r * (r + j))
        total += term
    return total


def test_ratio_trivial_values():
    assert bessel_ratio(0, 0.0) == 1.0
    assert bessel_ratio(0, 17.3) == 1.0
    assert bessel_ratio(1, 0.0) == 0.0
    assert bessel_ratio(1, 2.0) == pytest.approx(0.697774, abs=1e-6)


def test_ratio_matches_series_oracle():
    for kappa in (0.5, 2.0, 8.0, 20.0):
        for j in (0, 1, 3, 7, 12):
            want = bessel_series(j, kappa) / bessel_series(0, kappa)
            assert bessel_ratio(j, kappa) == pytest.approx(want, rel=1e-12)


def test_ratio_matches_scaled_library_route():
    # second route: exponentially scaled modified Bessel from scipy
    for kappa in (1.0, 50.0, 500.0, 1e4):
        got = bessel_ratios(20, kappa)
        want = ive(np.arange(21), kappa) / ive(0, kappa)
        assert np.allclose(got, want, rtol=1e-11)


def test_scaled_values_normalization():
    # I_0 + 2 sum I_j = e^kappa, i.e. scaled values sum to 1; needs the
    # truncation order well past kappa, where the terms have died off
    for kappa, j_max in ((0.3, 40), (5.0, 60), (300.0, 500)):
        v = scaled_bessel_i(j_max, kappa)
        assert v[0] + 2 * v[1:].sum() == pytest.approx(1.0, abs=1e-10)


def test_ratio_monotonicity():
    r = bessel_ratios(10, 4.0)
    assert np.all(np.diff(r) < 0)
    for j in (1, 3):
        vals = [bessel_ratio(j, k) for k in (0.5, 1.0, 2.0, 4.0)]
        assert all(a < b for a, b in zip(vals, vals[1:]))


def test_ratio_upper_bound():
    # I_j(x) <= (x/2)^j e^{x^2/4} / j! for small arguments
    for x in (0.25, 0.5, 1.0, 2.0):
        scaled = scaled_bessel_i(12, x) * np.exp(x)
        for j in range(13):
            bound = (x / 2.0) ** j * np.exp(x * x / 4.0) / math.factorial(j)
            assert scaled[j] <= bound * (1 + 1e-12)


def test_ratio_tail_bound():
    # sum_{j>=d} I_j(kappa) <= e^{kappa/2} I_d(kappa)
    for kappa in (1.0, 4.0, 8.0):
        r = scaled_bessel_i(400, kappa)
        for d in range(1, 13):
            tail = r[d:].sum()
            assert tail <= np.exp(kappa / 2.0) * r[d] * (1 + 1e-12)


def test_von_mises_validation():
    with pytest.raises(ValueError):
        VonMisesParams(mu=(0.0,), kappa=(0.0, 1.0))
    with pytest.raises(ValueError):
        VonMisesParams(mu=(0.0,), kappa=(-1.0,))


def test_von_mises_eval_uniform_and_peak():
    p = VonMisesParams(mu=(0.3, 1.0), kappa=(0.0, 0.0))
    assert von_mises_eval(p, [2.0, 0.1]) == pytest.approx(1.0)
    p = VonMisesParams(mu=(0.5, 2.0), kappa=(1.0, 6.0))
    peak = von_mises_eval(p, [0.5, 2.0])
    rng = np.random.default_rng(8)
    for x in rng.uniform(0, 2 * np.pi, (20, 2)):
        assert von_mises_eval(p, x) <= peak


def test_von_mises_quadrature_one():
    g = 512
    theta = 2 * np.pi * np.arange(g) / g
    mesh = np.stack(np.meshgrid(theta, theta, indexing="ij"), -1)
    p = VonMisesParams(mu=(0.0, 0.0), kappa=(1.0, 6.0))
    assert von_mises_eval(p, mesh).mean() == pytest.approx(1.0, abs=1e-10)


def test_von_mises_fourier_synthesis_oracle():
    lat = build_lattice(2, 24)
    p = VonMisesParams(mu=(0.7, 4.0), kappa=(1.0, 6.0))
    f = von_mises_fourier(p, lat)
    assert f.coeffs[0] == 1.0
    ix = lat.index_array.astype(float)
    rng = np.random.default_rng(12)
    for x in rng.uniform(0, 2 * np.pi, (8, 2)):
        synth = np.real(np.exp(1j * x @ ix.T) @ f.coeffs)
        assert synth == pytest.approx(von_mises_eval(p, x), abs=1e-8)


def test_von_mises_fourier_real_at_zero_mode():
    lat = build_lattice(2, 8)
    f = von_mises_fourier(VonMisesParams((0.0, 0.0), (2.0, 3.0)), lat)
    assert np.allclose(f.coeffs.imag, 0.0)
    assert np.all(f.coeffs.real > 0)


def test_root_feature_limits():
    lat = build_lattice(2, 8)
    x = np.array([1.0, 2.0])
    r1 = root_feature(x, 5.0, 1, lat)
    direct = von_mises_fourier(VonMisesParams(tuple(x), (5.0, 5.0)), lat)
    assert np.allclose(r1.coeffs, direct.coeffs)
    huge_n = root_feature(x, 5.0, 10 ** 9, lat)
    e0 = np.zeros(lat.m); e0[0] = 1.0
    assert np.allclose(huge_n.coeffs, e0, atol=1e-7)


def test_root_identity_in_coefficient_space():
    lat = build_lattice(2, 32)
    x = np.array([0.9, 3.1])
    kappa = 8.0
    direct = von_mises_fourier(VonMisesParams(tuple(x), (kappa, kappa)), lat)
    for n in (2, 3):
        powered = power_n(root_feature(x, kappa, n, lat), n)
        scale = powered.coeffs[0] / direct.coeffs[0]
        top = np.argsort(-np.abs(direct.coeffs))[:50]
        assert np.allclose(powered.coeffs[top], scale * direct.coeffs[top],
                           rtol=1e-6)
