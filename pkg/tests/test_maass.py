"""Tests for the non-holomorphic Eisenstein series evaluators."""

import math

import numpy as np
import pytest
from scipy.special import kv

from halphen_lab.errors import DivergentParameter, PoleAtS, StepTooLarge
from halphen_lab.maass import (
    LatticeSumSpec,
    completed_zeta,
    divisor_sigma,
    eisenstein_fourier,
    eisenstein_lattice,
    fold_to_fundamental,
    laplacian_eigencheck,
    riemann_zeta,
)


def brute_lattice(s, tau, R):
    """Independent dense-grid oracle for the lattice sum (no tail)."""
    m, n = np.meshgrid(np.arange(-R, R + 1), np.arange(-R, R + 1), indexing="ij")
    p2 = (m + n * tau.real) ** 2 + (n * tau.imag) ** 2
    p2[R, R] = np.inf
    keep = p2 <= R * R
    return float(tau.imag**s * np.sum(np.where(keep, p2 ** (-s), 0.0)))


class TestScalarHelpers:
    def test_divisor_sigma(self):
        assert divisor_sigma(3, 1) == 1
        assert divisor_sigma(1, 6) == 12
        assert divisor_sigma(3, 4) == 73

    def test_riemann_zeta(self):
        assert riemann_zeta(2) == pytest.approx(math.pi**2 / 6, rel=1e-12)
        assert riemann_zeta(3) == pytest.approx(1.2020569031595943, rel=1e-12)
        assert riemann_zeta(1.5) == pytest.approx(2.612375348685488, rel=1e-11)

    def test_completed_zeta_values(self):
        assert completed_zeta(2) == pytest.approx(math.pi / 6, rel=1e-12)
        assert completed_zeta(4) == pytest.approx(math.pi**2 / 90, rel=1e-12)

    def test_completed_zeta_reflection(self):
        assert completed_zeta(3) == pytest.approx(completed_zeta(-2), rel=1e-10)

    def test_completed_zeta_poles(self):
        for s in (0.0, 1.0):
            with pytest.raises(PoleAtS):
                completed_zeta(s)

    def test_bessel_half_integer_closed_form(self):
        # K_{1/2}(x) = sqrt(pi / 2x) e^{-x}; sanity for the kernel we rely on
        for x in (0.5, 2.0, 10.0):
            exact = math.sqrt(math.pi / (2 * x)) * math.exp(-x)
            assert kv(0.5, x) == pytest.approx(exact, rel=1e-12)


class TestLattice:
    def test_value_at_i(self):
        ref = brute_lattice(2.0, 1j, 2000)
        got = eisenstein_lattice(2.0, 1j, LatticeSumSpec(R=200))
        assert abs(got.value - 6.0268120) < 2e-6
        assert abs(got.value - ref) < max(got.est_error, 1e-6)

    def test_self_consistency_across_cutoffs(self):
        lo = eisenstein_lattice(3.0, 1j, LatticeSumSpec(R=50))
        hi = eisenstein_lattice(3.0, 1j, LatticeSumSpec(R=500))
        assert abs(lo.value - hi.value) <= lo.est_error + hi.est_error

    def test_translation_invariance(self):
        tau = 0.3 + 1.2j
        a = eisenstein_lattice(2.0, tau, LatticeSumSpec(R=80))
        b = eisenstein_lattice(2.0, tau + 1, LatticeSumSpec(R=80))
        assert abs(a.value - b.value) < 1e-12 * abs(a.value) + a.est_error + b.est_error

    def test_divergent_s(self):
        with pytest.raises(DivergentParameter):
            eisenstein_lattice(1.0, 1j)


class TestFourier:
    def test_matches_lattice(self):
        lat = eisenstein_lattice(2.0, 1j, LatticeSumSpec(R=200))
        fou = eisenstein_fourier(2.0, 1j)
        assert abs(lat.value - fou.value) <= lat.est_error + fou.est_error + 1e-8

    def test_x_periodicity(self):
        a = eisenstein_fourier(1.5, 0.2 + 1.4j)
        b = eisenstein_fourier(1.5, 1.2 + 1.4j)
        assert abs(a.value - b.value) < 1e-12 * abs(a.value)

    def test_zero_mode_truncation_bound(self):
        y = 2.0
        full = eisenstein_fourier(1.5, 1j * y).value
        zero_modes = eisenstein_fourier(1.5, 1j * y, n_max=0).value
        # first dropped term (n = +-1) in the lattice-normalized expansion
        bound = (
            2
            * (4 * math.pi**1.5 / math.gamma(1.5))
            * math.sqrt(y)
            * divisor_sigma(-2, 1)
            * kv(1.0, 4 * math.pi)
        )
        # tiny headroom for the n >= 2 terms riding on top of the n = 1 bound
        assert abs(full - zero_modes) < 1.01 * bound

    def test_pole_at_one(self):
        with pytest.raises(PoleAtS):
            eisenstein_fourier(1.0, 1j)


class TestAgreement:
    @pytest.mark.parametrize("s", [2.0, 3.0])
    def test_methods_agree_random_taus(self, s):
        rng = np.random.default_rng(17)
        for _ in range(10):
            tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.8, 2.5))
            lat = eisenstein_lattice(s, tau, LatticeSumSpec(R=120))
            fou = eisenstein_fourier(s, tau)
            assert lat.agrees_with(fou), (s, tau, lat, fou)

    @pytest.mark.parametrize("s", [1.5, 2.0, 2.5])
    def test_modular_invariance(self, s):
        tau = 0.34 + 0.77j
        base = eisenstein_fourier(s, fold_to_fundamental(tau)).value
        for gamma in (tau + 1, -1 / tau):
            moved = eisenstein_fourier(s, fold_to_fundamental(gamma)).value
            assert abs(moved - base) < 1e-7 * abs(base)


class TestEigencheck:
    @pytest.mark.parametrize(
        "s,tau", [(2.0, 0.2 + 1.3j), (1.5, 1j), (2.5, 0.1 + 1.1j)]
    )
    def test_laplacian_eigenfunction(self, s, tau):
        assert laplacian_eigencheck(s, tau, 1e-3) < 1e-5

    def test_step_too_large(self):
        with pytest.raises(StepTooLarge):
            laplacian_eigencheck(2.0, 1j, 0.5)
