"""Conformally self-dual Bianchi IX foliations with zero scalar curvature.

Two coupled first-order systems in the auxiliary triple Delta and the
metric triple Omega:

    I:   Delta1' = Delta2 Delta3 - Delta1 (Delta2 + Delta3)   (cyclic)
    II:  Omega1' = Omega2 Omega3 - Omega1 (Delta2 + Delta3)   (cyclic)

System I is the Darboux-Halphen flow in Delta; Delta = Omega reduces II
to Darboux-Halphen and Delta = 0 to Lagrange, the two Ricci-flat
branches.  With delta_i = -(1/2) d/dz log E_i for a weight-2 triplet
E_i, the rescaled variables

    w_i = omega_i / sqrt(E_j E_k)

obey dw1/dlambda = w2 w3 / lambda (and partners) in the Schwarz variable
lambda, carry the first integral w1^2 - w2^2 + w3^2, and are solved by
ratios of theta constants with characteristics.  The limit of integer
characteristics recovers the Ricci-flat triaxial instanton.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import numdiff
from .errors import (
    DomainError,
    PoleHit,
    SingularLambda,
    StepTooLarge,
    ThetaZeroDivision,
)
from .halphen import dh_rhs, schwarz_lambda
from .modforms import (
    DEFAULT_TRUNC,
    QTruncation,
    ThetaChar,
    eisenstein_holo,
    theta,
    theta_char,
    theta_char_vderiv,
)

__all__ = [
    "ConformalState",
    "WVars",
    "CPField",
    "systems_rhs",
    "system_one_rhs",
    "system_two_rhs",
    "w_theta_solution",
    "ah_limit_solution",
    "first_integral",
    "w_lambda_rhs",
    "w_lambda_system_residual",
    "sl2_generate_pair",
    "asd_curvature_identity",
    "cp_harmonic_check",
    "cp_f_cp2",
    "cp_f_heisenberg",
    "cp_f_eisenstein",
]

_CYC = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


@dataclass(frozen=True)
class ConformalState:
    """Joint state (Delta, Omega) of systems I and II at a point z."""

    delta: tuple
    omega: tuple
    z: complex = 0j

    def __post_init__(self):
        for name in ("delta", "omega"):
            vals = getattr(self, name)
            if len(vals) != 3:
                raise DomainError(f"{name} needs exactly 3 components")
            vals = tuple(complex(v) for v in vals)
            for v in vals:
                if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                    raise DomainError(f"{name} components must be finite")
            object.__setattr__(self, name, vals)

    @property
    def B(self) -> tuple:
        """The companion triple B_i, from
        Omega_i' = Omega_j Omega_k - Omega_i (Delta_j + Delta_k)
                 = -Omega_j Omega_k + Omega_i (B_j + B_k)."""
        d, Om = self.delta, self.omega
        # B_j + B_k = Delta_j + Delta_k + 2 Omega_j Omega_k / Omega_i
        S = [d[j] + d[k] + 2 * Om[j] * Om[k] / Om[i] for i, j, k in _CYC]
        tot = sum(S) / 2
        return tuple(tot - S[i] for i in range(3))


@dataclass(frozen=True)
class WVars:
    """Rescaled system-II variables and the Schwarz coordinate."""

    w: tuple
    lam: complex

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(complex(v) for v in self.w))


def system_one_rhs(delta):
    return dh_rhs(delta)


def system_two_rhs(omega, delta):
    o, d = tuple(omega), tuple(delta)
    return tuple(o[j] * o[k] - o[i] * (d[j] + d[k]) for i, j, k in _CYC)


def systems_rhs(state: ConformalState):
    """(Delta', Omega') of the coupled systems I and II."""
    return system_one_rhs(state.delta), system_two_rhs(state.omega, state.delta)


def first_integral(w) -> complex:
    w1, w2, w3 = tuple(w)
    return w1 * w1 - w2 * w2 + w3 * w3


def w_theta_solution(
    a: complex,
    b: complex,
    z: complex,
    trunc: QTruncation = DEFAULT_TRUNC,
) -> WVars:
    """Theta-characteristic solution of the w-system,

        w1 = d_v theta[a+1; b](0|z) / (2 pi th2 th3 theta[a; b](0|z)),
        w2 = e^{-i pi a/2} d_v theta[a; b+1](0|z) / (2 pi th3 th4 ...),
        w3 = -e^{-i pi a/2} d_v theta[a+1; b+1](0|z) / (2 pi th2 th4 ...),

    with first integral w1^2 - w2^2 + w3^2 = 1/4.  The shifted
    characteristics are used literally (no mod-2 reduction), which keeps
    the family smooth in (a, b).
    """
    z = complex(z)
    if not z.imag > 0:
        raise DomainError("Im(z) must be > 0")
    th2, th3, th4 = (theta(j, 0.0, z, trunc) for j in (2, 3, 4))
    denom = theta_char(ThetaChar(a, b), 0.0, z, trunc)
    if abs(denom) < 1e-12:
        raise ThetaZeroDivision(f"theta[{a};{b}](0|z) = {denom} below tolerance")
    phase = cmath.exp(-1j * cmath.pi * a / 2)
    d1 = theta_char_vderiv(ThetaChar(a + 1, b), 0.0, z, trunc)
    d2 = theta_char_vderiv(ThetaChar(a, b + 1), 0.0, z, trunc)
    d3 = theta_char_vderiv(ThetaChar(a + 1, b + 1), 0.0, z, trunc)
    tp = 2 * cmath.pi
    return WVars(
        w=(
            d1 / (tp * th2 * th3 * denom),
            phase * d2 / (tp * th3 * th4 * denom),
            -phase * d3 / (tp * th2 * th4 * denom),
        ),
        lam=schwarz_lambda(z, trunc),
    )


def ah_limit_solution(
    z0: complex,
    z: complex,
    trunc: QTruncation = DEFAULT_TRUNC,
) -> WVars:
    """Integer-characteristic limit of the theta family,
    a = 1 + 2 eps, b = 1 + 2 z0 eps, eps -> 0:

        w1 = -(1/(pi th2^2 th3^2)) (i/(z+z0) - (pi/6)(E2 - th2^4 - th3^4)),

    and partners.  z0 -> i inf recovers the Ricci-flat triaxial
    instanton combination.
    """
    z = complex(z)
    z0 = complex(z0)
    if not z.imag > 0:
        raise DomainError("Im(z) must be > 0")
    if abs(z + z0) < 1e-12:
        raise PoleHit(f"z + z0 = {z + z0} below tolerance")
    th2, th3, th4 = (theta(j, 0.0, z, trunc) for j in (2, 3, 4))
    t2, t3, t4 = th2**4, th3**4, th4**4
    e2 = eisenstein_holo(2, z, trunc)
    pole = 1j / (z + z0)
    p6 = cmath.pi / 6
    return WVars(
        w=(
            -(pole - p6 * (e2 - t2 - t3)) / (cmath.pi * th2**2 * th3**2),
            -1j * (pole - p6 * (e2 + t3 + t4)) / (cmath.pi * th3**2 * th4**2),
            -1j * (pole - p6 * (e2 + t2 - t4)) / (cmath.pi * th2**2 * th4**2),
        ),
        lam=schwarz_lambda(z, trunc),
    )


def w_lambda_rhs(w, lam, margin: float = 0.05):
    """(dw1, dw2, dw3)/dlambda = (w2 w3/lambda, w3 w1/(lambda-1),
    w1 w2/(lambda (lambda-1)))."""
    lam = complex(lam)
    if min(abs(lam), abs(lam - 1)) < margin:
        raise SingularLambda(f"lambda = {lam} within {margin} of a branch point")
    w1, w2, w3 = tuple(w)
    return (w2 * w3 / lam, w3 * w1 / (lam - 1), w1 * w2 / (lam * (lam - 1)))


def w_lambda_system_residual(
    w_of_z,
    z: complex,
    h: float,
    trunc: QTruncation = DEFAULT_TRUNC,
    margin: float = 0.05,
):
    """Residuals of the lambda-form of system II for a callable
    z -> WVars, using d w/d lambda = (d w/d z) / lambda'(z)."""
    z = complex(z)
    if h > z.imag / 10:
        raise StepTooLarge(f"h = {h} too large for Im(z) = {z.imag}")
    lam = schwarz_lambda(z, trunc)
    lam_prime = numdiff.deriv1(lambda t: schwarz_lambda(t, trunc), z, h)
    if abs(lam_prime) < 1e-14:
        raise SingularLambda("lambda'(z) vanishes; lambda is not a coordinate here")
    w = w_of_z(z).w
    rhs = w_lambda_rhs(w, lam, margin)
    res = []
    for i in range(3):
        dwdz = numdiff.deriv1(lambda t, i=i: w_of_z(t).w[i], z, h)
        res.append(abs(dwdz / lam_prime - rhs[i]))
    return tuple(res)


def sl2_generate_pair(delta_fn, omega_fn, M):
    """Transport a joint solution of systems I and II:

        delta~(z) = (cz+d)^-2 delta((az+b)/(cz+d)) + c/(cz+d),
        omega~(z) = (cz+d)^-2 omega((az+b)/(cz+d)).
    """

    def generated(z):
        z = complex(z)
        denom = M.c * z + M.d
        if abs(denom) < 1e-12:
            raise PoleHit(f"c z + d = {denom} below tolerance")
        zz = (M.a * z + M.b) / denom
        d = tuple(v / denom**2 + M.c / denom for v in delta_fn(zz))
        o = tuple(v / denom**2 for v in omega_fn(zz))
        return ConformalState(delta=d, omega=o, z=z)

    return generated


def asd_curvature_identity(state: ConformalState) -> tuple:
    """Residuals of the on-shell anti-self-dual curvature identity.

    For joint solutions of systems I and II the anti-self-dual curvature
    collapses to

        A_i = (1 / 2 Omega_i)(Delta_j Delta_k / (Omega_j Omega_k)
              - Delta_i / Omega_i) phi_i,

    which is compared against the direct curvature decomposition with
    Omega-derivatives supplied by system II.  Since both A_i
    coefficients (on phi_i and chi_i) must agree with (coef, 0), the
    returned residual per axis is the max of the two mismatches.

    Note: the full decomposition needs second derivatives of Omega,
    available here by differentiating system II along systems I and II.
    """
    d, Om = state.delta, state.omega
    ddot = system_one_rhs(d)
    Omdot = system_two_rhs(Om, d)
    Omddot = tuple(
        Omdot[j] * Om[k] + Om[j] * Omdot[k]
        - Omdot[i] * (d[j] + d[k]) - Om[i] * (ddot[j] + ddot[k])
        for i, j, k in _CYC
    )
    # v-connection and its derivative, as in the metric curvature split
    Y = [Omdot[i] - Om[j] * Om[k] for i, j, k in _CYC]
    Yd = [Omddot[i] - Omdot[j] * Om[k] - Om[j] * Omdot[k] for i, j, k in _CYC]
    v = [
        (Y[i] / Om[i] - Y[j] / Om[j] - Y[k] / Om[k]) / (4 * Om[i]) for i, j, k in _CYC
    ]
    dYO = [(Yd[i] * Om[i] - Y[i] * Omdot[i]) / Om[i] ** 2 for i in range(3)]
    vdot = [
        (dYO[i] - dYO[j] - dYO[k]) / (4 * Om[i]) - v[i] * Omdot[i] / Om[i]
        for i, j, k in _CYC
    ]
    res = []
    for i, j, k in _CYC:
        QA = 2 * v[j] * v[k] - v[i]
        a_phi = vdot[i] / (2 * Om[j] * Om[k]) + QA / (2 * Om[i])
        a_chi = vdot[i] / (2 * Om[j] * Om[k]) - QA / (2 * Om[i])
        target = (d[j] * d[k] / (Om[j] * Om[k]) - d[i] / Om[i]) / (2 * Om[i])
        res.append(max(abs(a_phi - target), abs(a_chi)))
    return tuple(res)


# ---------------------------------------------------------------------------
# quaternionic metrics with two commuting isometries: the harmonic F check


@dataclass(frozen=True)
class CPField:
    """A candidate potential F(rho, eta) on the half-plane rho > 0."""

    F: object  # callable (rho, eta) -> float
    name: str = ""

    def __call__(self, rho: float, eta: float) -> float:
        if rho <= 0:
            raise DomainError("F is defined for rho > 0")
        return self.F(rho, eta)


def cp_f_cp2() -> CPField:
    """F = sqrt(rho + eta^2 / rho), the complex-projective-plane potential."""
    return CPField(lambda r, e: math.sqrt(r + e * e / r), "cp2")


def cp_f_heisenberg(rho0: float = 1.0) -> CPField:
    """F = (rho^2 - rho0^2) / (2 sqrt(rho)), Heisenberg-symmetric potential."""
    return CPField(lambda r, e: (r * r - rho0 * rho0) / (2 * math.sqrt(r)), "heis")


def cp_f_eisenstein() -> CPField:
    """F = E_{3/2}(eta + i rho), the non-holomorphic Eisenstein potential.

    Evaluated through the Fourier-Bessel expansion, which is smooth in
    both arguments; the direct lattice sum is too noisy under the second
    differences of the harmonic check.
    """
    from .maass import eisenstein_fourier

    return CPField(
        lambda r, e: eisenstein_fourier(1.5, complex(e, r)).value, "E3/2"
    )


def cp_harmonic_check(field: CPField, rho: float, eta: float, h: float) -> float:
    """Relative residual of the weighted harmonic equation

        rho^2 (F_rho_rho + F_eta_eta) = (3/4) F

    by 5-point central differences in each variable."""
    if rho <= 2 * h:
        raise StepTooLarge(f"need rho > 2h, got rho = {rho}, h = {h}")
    F0 = field(rho, eta)
    Frr = numdiff.second_5pt([field(rho + k * h, eta) for k in (-2, -1, 0, 1, 2)], h)
    Fee = numdiff.second_5pt([field(rho, eta + k * h) for k in (-2, -1, 0, 1, 2)], h)
    return abs(rho * rho * (Frr + Fee) - 0.75 * F0) / max(abs(F0), 1e-300)
