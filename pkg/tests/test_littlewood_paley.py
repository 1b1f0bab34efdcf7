import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lorlab.littlewood_paley import (
    BumpFamily,
    beta0,
    besov_norm,
    build_beta_family,
    build_psi_kernels,
    decay_profile,
    default_moment_order,
    fitted_slope,
    iter_bands,
    local_mean,
    lp_decompose,
    partition_deviation,
    reconstruction_error,
    smoothness_norms,
    tl_norm,
)
from lorlab.measure import GridFunction, lorentz_norm_of_moduli
from lorlab.oracle import SmoothnessParams

L = 1024


def band_limited(rng, n=L, top=100):
    c = np.zeros(n, dtype=complex)
    c[1:top] = rng.standard_normal(top - 1) + 1j * rng.standard_normal(top - 1)
    c[-top + 1:] = np.conj(c[1:top][::-1])
    c[0] = rng.standard_normal()
    return GridFunction(np.fft.ifft(c).real * n, 1 / n)


def tone(k, n=L):
    # frequency 2^k * 5/4 sits inside the plateau [7/8, 3/2] * 2^k
    x = np.arange(n) / n
    return GridFunction(np.cos(2 * np.pi * 1.25 * 2**k * x), 1 / n)


def test_beta_support_facts():
    fam = build_beta_family(4096)
    xi = fam.frequencies
    b1 = fam.band(1)
    assert np.all(b1[np.abs(xi) <= 1.5] == 0)
    total = sum(fam.band(k)[np.argmin(np.abs(xi - 2.0))] for k in range(fam.K + 1))
    assert total == 1.0
    for k in (1, 3, 6):
        plateau = (np.abs(xi) >= 2**k * 7 / 8) & (np.abs(xi) <= 2**k * 1.5)
        assert np.all(fam.band(k)[plateau] == 1.0)


def test_beta0_values():
    assert beta0(np.array([0.0, 1.5, 1.75, 3.0])).tolist() == [1.0, 1.0, 0.0, 0.0]


def test_partition_of_unity():
    for n, period in ((4096, 1.0), (2**16, 8.0)):
        assert partition_deviation(build_beta_family(n, period=period)) <= 1e-12


def test_family_validation():
    with pytest.raises(ValueError):
        build_beta_family(2)
    with pytest.raises(ValueError):
        build_beta_family(64, K=20)
    with pytest.raises(IndexError):
        build_beta_family(64).band(99)


def test_lazy_bands_match_stacked():
    fam = build_beta_family(256)
    assert np.array_equal(fam.beta[3], fam.band(3))
    assert isinstance(fam, BumpFamily)


def test_constant_lives_in_band_zero():
    fam = build_beta_family(256)
    seq = lp_decompose(GridFunction(np.full(256, 3.0), 1 / 256), fam)
    assert np.allclose(seq.members[0].samples, 3.0, atol=1e-12)
    assert all(np.max(g.modulus()) < 1e-12 for g in seq.members[1:])


@pytest.mark.parametrize("k0", [2, 4, 7])
def test_plateau_tone_is_one_band(k0):
    f = tone(k0)
    fam = build_beta_family(L)
    for k, band in iter_bands(f, fam):
        expected = f.samples if k == k0 else 0.0
        assert np.max(np.abs(band - expected)) < 1e-12


def test_reconstruction(rng):
    fam = build_beta_family(L)
    for _ in range(5):
        assert reconstruction_error(band_limited(rng), fam) <= 1e-10


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        list(iter_bands(GridFunction(np.ones(8)), build_beta_family(16)))


@pytest.mark.parametrize("s,p,r", [(0.5, 2, 2), (1.0, 1, 4), (-0.5, 0.5, 1)])
def test_single_band_besov_norm(s, p, r):
    f = tone(5)
    fam = build_beta_family(L)
    expected = 2 ** (5 * s) * lorentz_norm_of_moduli(f.modulus(), f.cell_mass, p, r)
    # q < 1 would amplify rounding noise in the empty bands
    for q in (1, 2, math.inf):
        assert besov_norm(f, fam, SmoothnessParams("B", s, p, q, r)) == pytest.approx(expected, rel=1e-10)
        assert tl_norm(f, fam, SmoothnessParams("F", s, p, q, r)) == pytest.approx(expected, rel=1e-10)


def test_zero_function_norms():
    fam = build_beta_family(64)
    z = GridFunction(np.zeros(64), 1 / 64)
    assert besov_norm(z, fam, SmoothnessParams("B", 1, 2, 2, 2)) == 0.0
    assert tl_norm(z, fam, SmoothnessParams("F", 1, 2, 2, 2)) == 0.0


def test_scale_mismatch_rejected():
    fam = build_beta_family(64)
    z = GridFunction(np.ones(64), 1 / 64)
    with pytest.raises(ValueError):
        besov_norm(z, fam, SmoothnessParams("F", 1, 2, 2, 2))
    with pytest.raises(ValueError):
        tl_norm(z, fam, SmoothnessParams("B", 1, 2, 2, 2))


@pytest.mark.parametrize("p", [1.0, 2.0, 3.0])
def test_besov_equals_tl_on_diagonal(rng, p):
    f = band_limited(rng)
    fam = build_beta_family(L)
    b = besov_norm(f, fam, SmoothnessParams("B", 0.5, p, p, p))
    t = tl_norm(f, fam, SmoothnessParams("F", 0.5, p, p, p))
    # direct double sum over bands and cells
    direct = sum(2 ** (0.5 * k * p) * np.sum(np.abs(v) ** p) / L for k, v in iter_bands(f, fam)) ** (1 / p)
    assert b == pytest.approx(direct, rel=1e-9)
    assert t == pytest.approx(direct, rel=1e-9)


@given(st.integers(0, 2**32 - 1), st.sampled_from([0.5, 1.0, 2.0]))
def test_tl_monotone_in_q(seed, q):
    f = band_limited(np.random.default_rng(seed), n=256, top=30)
    fam = build_beta_family(256)
    a, b = smoothness_norms(f, fam, [SmoothnessParams("F", 0, 2, q, 2), SmoothnessParams("F", 0, 2, 2 * q, 2)])
    assert b <= a * (1 + 1e-12)


def test_besov_strictly_increasing_in_s(rng):
    f = band_limited(rng)
    fam = build_beta_family(L)
    vals = smoothness_norms(f, fam, [SmoothnessParams("B", s, 2, 2, 2) for s in (0, 0.5, 1)])
    assert vals[0] < vals[1] < vals[2]


def test_dilation_scaling_of_band_pieces():
    # omega_k(x) = omega_0(2^k x) on the line has ||omega_k||_{p,r} = 2^{-k/p} ||omega_0||
    n = 2**16
    p = 2.0
    x = (np.arange(n) - n // 2) / n * 64.0

    def omega(k):
        t = 2.0**k * x
        return np.exp(-t**2) * np.cos(2 * np.pi * 1.2 * t)

    ref = lorentz_norm_of_moduli(np.abs(omega(0)), 64 / n, p, 3.0)
    for k in (2, 3, 4):
        val = lorentz_norm_of_moduli(np.abs(omega(k)), 64 / n, p, 3.0)
        assert val == pytest.approx(2 ** (-k / p) * ref, rel=0.05)


def test_kernel_contract():
    with pytest.raises(ValueError):
        build_psi_kernels(0)
    with pytest.raises(ValueError):
        build_psi_kernels(4, support_halfwidth=0)


@pytest.mark.parametrize("M", [4, 8])
def test_kernel_moments_vanish(M):
    k = build_psi_kernels(M)
    mom = k.moments(range(M + 2))
    assert mom[0] == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(mom[1 : M + 1])) < 1e-8
    # the skewed bump keeps the next moment alive
    assert abs(mom[M + 1]) > 1e3 * np.max(np.abs(mom[1 : M + 1]))


def test_symmetric_kernel_kills_odd_moment():
    k = build_psi_kernels(4, skew=0.0)
    assert abs(k.moments([5])[0]) < 1e-14


def test_psi_k_has_zero_integral():
    k = build_psi_kernels(6)
    x = np.linspace(-0.25, 0.25, 200001)
    for j in (1, 2, 5):
        assert abs(np.trapezoid(k.psi(j, x), x)) < 1e-10


def test_autocorrelation_bound_positive():
    eps, c = build_psi_kernels(4).autocorrelation_bound
    assert eps > 0 and c > 0


def test_local_mean_of_constant_vanishes():
    k = build_psi_kernels(4)
    f = GridFunction(np.ones(2**16), 2.0**-16)
    assert np.max(np.abs(local_mean(f, k, 3).samples)) < 1e-12


def test_default_moment_order():
    assert default_moment_order(0) == 4
    assert default_moment_order(-1.5) == 6


def test_decay_far_above_is_steep():
    k = build_psi_kernels(4)
    js = [15, 16, 17, 18]
    prof = decay_profile(k, 8, js, samples=256)
    assert fitted_slope(js, [prof[j] for j in js]) == pytest.approx(-5.0, abs=0.5)


def test_decay_below_at_least_moment_order():
    k = build_psi_kernels(4)
    js = [1, 2, 3, 4]
    prof = decay_profile(k, 8, js)
    assert fitted_slope(js, [prof[j] for j in js]) >= 4 - 0.5
    with pytest.raises(ValueError):
        decay_profile(k, 8, [0])


def test_fitted_slope():
    assert fitted_slope([0, 1, 2], [1, 2, 4]) == pytest.approx(1.0)
