"""Tests for the Lagrange / Darboux-Halphen systems and their solutions."""

import cmath
import math

import numpy as np
import pytest

from halphen_lab.errors import DomainError
from halphen_lab.halphen import (
    ChazyData,
    ModularTriplet,
    RealTriAxial,
    TriAxial,
    chazy_from_dh,
    chazy_residual,
    dh_from_lambda,
    dh_residual,
    dh_rhs,
    halphen_closed_form,
    halphen_closed_form_real,
    halphen_triplet,
    integrate,
    integrate_ray,
    lagrange_rhs,
    omegas_from_chazy,
    reflection_check,
    schwarz_lambda,
    schwarz_residual,
    sl2_generate,
    sl2_generate_real,
    taub_nut_family,
)
from halphen_lab.modforms import Moebius, eisenstein_holo


class TestRHS:
    def test_dh_isotropic(self):
        assert dh_rhs(TriAxial((1, 1, 1), 0j)) == (-1, -1, -1)

    def test_dh_biaxial_symmetry(self):
        r = dh_rhs(TriAxial((0.4 + 0.1j, 0.4 + 0.1j, 1.5), 0j))
        assert r[0] == r[1]

    def test_dh_matches_closed_form_derivative(self):
        z = 1.7j
        sol = halphen_closed_form(z)
        rhs = dh_rhs(sol)
        h = 1e-5
        for i in range(3):
            fd = (
                halphen_closed_form(z + h).omega[i]
                - halphen_closed_form(z - h).omega[i]
            ) / (2 * h)
            assert abs(rhs[i] - fd) < 1e-8

    def test_lagrange(self):
        assert lagrange_rhs(TriAxial((1, 1, 1), 0j)) == (1, 1, 1)
        assert lagrange_rhs(TriAxial((0, 2, 3), 0j)) == (6, 0, 0)


class TestIntegrate:
    def test_isotropic_exact(self):
        traj = integrate("dh", RealTriAxial((1.0, 1.0, 1.0), 1.0), 3.0, tol=1e-11)
        assert np.max(np.abs(traj.Omega - 1.0 / traj.T[:, None])) < 1e-8

    def test_taub_nut_family_tracked(self):
        init = taub_nut_family(1.0, 0.0, -1.0)
        traj = integrate("dh", init, 4.0, tol=1e-11)
        ref = np.array([taub_nut_family(t, 0.0, -1.0).Omega for t in traj.T])
        assert np.max(np.abs(traj.Omega - ref)) < 1e-8

    def test_closed_form_endpoint(self):
        init = halphen_closed_form_real(0.5)
        traj = integrate("dh", init, 2.5, tol=1e-11)
        end = halphen_closed_form_real(2.5)
        assert np.max(np.abs(traj.Omega[-1] - end.Omega)) < 1e-7

    def test_tolerance_sweep_monotone(self):
        errs = []
        for tol in (1e-6, 1e-9, 1e-12):
            traj = integrate("dh", halphen_closed_form_real(0.5), 2.5, tol=tol)
            end = halphen_closed_form_real(2.5)
            errs.append(np.max(np.abs(traj.Omega[-1] - end.Omega)))
        assert errs[0] > errs[1] > errs[2]

    def test_biaxial_closure(self):
        traj = integrate("lagrange", RealTriAxial((0.7, 0.7, 1.9), 0.0), 2.0)
        assert np.max(np.abs(traj.Omega[:, 0] - traj.Omega[:, 1])) < 1e-9

    def test_root_crossing_event(self):
        traj = integrate("dh", RealTriAxial((-1.0, 2.0, 3.0), 0.0), 50.0)
        assert traj.reason == "root_crossing"
        assert traj.root_component == 0
        assert abs(traj.Omega[-1, 0]) < 1e-8

    def test_blowup_toward_pole(self):
        traj = integrate("dh", RealTriAxial((1.0, 1.0, 1.0), 1.0), 0.0, tol=1e-6)
        assert traj.reason == "blowup"
        assert np.max(np.abs(traj.Omega[-1])) > 1e5

    def test_trajectory_serialization(self):
        traj = integrate("dh", RealTriAxial((1.0, 2.0, 3.0), 1.0), 2.0)
        lines = traj.to_csv().splitlines()
        assert lines[0].split(",")[0] == "T"
        assert len(lines) == len(traj.T) + 1
        assert "dh" in traj.to_json()


class TestClosedForm:
    def test_dh_residual_random_points(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            z = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.5, 3.0))
            assert dh_residual(halphen_closed_form, z) < 1e-8

    def test_real_form_ordering(self):
        for T in (0.3, 1.0, 2.5):
            O = halphen_closed_form_real(T).Omega
            assert O[0] < 0 < O[2] < O[1]

    def test_large_T_asymptotics(self):
        T = 3.0
        O = halphen_closed_form_real(T).Omega
        assert abs(O[1] - math.pi / 2) < 0.1 * (math.pi / 2)
        for i, sign in ((0, -1.0), (2, 1.0)):
            ref = sign * 4 * math.pi * math.exp(-math.pi * T)
            assert abs(O[i] - ref) < 0.1 * abs(ref)

    def test_small_T_asymptotics(self):
        T = 0.05
        O = halphen_closed_form_real(T).Omega
        assert abs(O[0] + math.pi / (2 * T**2)) < 0.05 * (math.pi / (2 * T**2))
        for i in (1, 2):
            assert abs(O[i] - 1 / T) < 0.05 / T

    def test_rejects_nonpositive_T(self):
        with pytest.raises(DomainError):
            halphen_closed_form_real(-1.0)

    def test_triplet_constraint(self):
        tri = halphen_triplet(1.3j)
        assert abs(tri.E1 - tri.E2 + tri.E3) < 1e-10
        with pytest.raises(DomainError):
            ModularTriplet(1.0, 2.0, 3.0)

    def test_integrate_ray_matches_closed_form(self):
        # march up the imaginary axis from 0.5i and compare with the formula
        init = halphen_closed_form(0.5j)
        s_vals, omegas = integrate_ray(
            "dh", init, 1.0, theta_angle=math.pi / 2, tol=1e-11
        )
        z_end = 0.5j + s_vals[-1] * 1j
        ref = halphen_closed_form(z_end)
        assert max(abs(omegas[-1][i] - ref.omega[i]) for i in range(3)) < 1e-7


class TestReflection:
    @pytest.mark.parametrize("T", [1.0, 2.0, 0.5, 5.0])
    def test_residual(self, T):
        assert max(reflection_check(T)) < 1e-8


class TestSL2:
    def test_identity(self):
        sol = sl2_generate(halphen_closed_form, Moebius(1, 0, 0, 1))
        z = 0.9j
        base = halphen_closed_form(z)
        assert max(abs(sol(z).omega[i] - base.omega[i]) for i in range(3)) < 1e-12

    def test_translation_permutes_triplet(self):
        # z -> z+1 permutes the weight-2 triplet (up to signs); the generated
        # solution is just the closed form evaluated at z+1
        sol = sl2_generate(halphen_closed_form, Moebius(1, 1, 0, 1))
        z = 1.1j
        got = sol(z).omega
        ref = halphen_closed_form(z + 1).omega
        assert max(abs(got[i] - ref[i]) for i in range(3)) < 1e-12

    def test_random_matrices_give_dh_solutions(self):
        rng = np.random.default_rng(41)
        count = 0
        while count < 10:
            a, b, c, d = rng.uniform(-2, 2, 4)
            if a * d - b * c < 0.1:  # orientation-preserving maps only
                continue
            M = Moebius(a, b, c, d)
            z = complex(rng.uniform(-0.3, 0.3), rng.uniform(0.8, 1.5))
            w = (M.a * z + M.b) / (M.c * z + M.d)
            if abs(M.c * z + M.d) < 0.3 or w.imag < 0.4:
                continue
            sol = sl2_generate(halphen_closed_form, M)
            assert dh_residual(sol, z) < 1e-7
            count += 1

    def test_real_matrix_on_real_solution(self):
        # the real-form map sends real DH solutions to real DH solutions
        iso = lambda T: RealTriAxial((1 / T, 1 / T, 1 / T), T)
        gen = sl2_generate_real(iso, 2.0, 1.0, 1.0, 3.0)
        T, h = 1.7, 1e-5
        rhs = dh_rhs(TriAxial(gen(T).Omega, complex(T)))
        for i in range(3):
            fd = (gen(T + h).Omega[i] - gen(T - h).Omega[i]) / (2 * h)
            assert abs(rhs[i] - fd) < 1e-8
        with pytest.raises(DomainError):
            sl2_generate_real(iso, 1.0, 0.0, 0.0, -1.0)


class TestSchwarz:
    def test_lambda_residual(self):
        assert schwarz_residual(schwarz_lambda, 1.2j, 1e-3) < 1e-4

    def test_triplet_from_lambda(self):
        z = 1.2j
        tri = dh_from_lambda(schwarz_lambda, z, 1e-5)
        ref = halphen_triplet(z)
        for got, want in ((tri.E1, ref.E1), (tri.E2, ref.E2), (tri.E3, ref.E3)):
            assert abs(got - want) < 1e-6

    def test_lambda_decays(self):
        assert abs(schwarz_lambda(6j)) < 1e-6


class TestChazy:
    def test_y_is_pi_e2(self):
        z = 1.5j
        cd = chazy_from_dh(halphen_closed_form(z))
        assert abs(cd.y - 1j * math.pi * eisenstein_holo(2, z)) < 1e-8

    def test_chazy_residual(self):
        y_fn = lambda z: 1j * math.pi * eisenstein_holo(2, z)
        assert chazy_residual(y_fn, 1.5j, 1e-3) < 1e-4

    def test_cubic_reconstruction(self):
        st = halphen_closed_form(1.3j)
        cd = chazy_from_dh(st)
        rec = omegas_from_chazy(cd, reference=st.omega)
        assert max(abs(rec[i] - st.omega[i]) for i in range(3)) < 1e-8

    def test_cubic_reconstruction_generic(self):
        om = (0.3 + 0.2j, -0.8 + 0.5j, 1.1 - 0.4j)
        cd = chazy_from_dh(TriAxial(om, 0j))
        rec = omegas_from_chazy(cd, reference=om)
        assert max(abs(rec[i] - om[i]) for i in range(3)) < 1e-10
