"""Holomorphic q-series objects on the upper half-plane.

Dedekind eta, holomorphic Eisenstein series E2/E4/E6, Jacobi theta
functions (with characteristics and v-derivatives) and Moebius maps.
All evaluators are plain truncated q-series in binary64: they sum until
the running term drops below ``tol * max(1, |partial|)`` and refuse to
work below Im(tau) = 0.05, where a q-series is the wrong tool (fold into
the fundamental domain first with :func:`apply_moebius`).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DomainError, PoleHit, TruncationNotReached

__all__ = [
    "ModularPoint",
    "ThetaChar",
    "Moebius",
    "QTruncation",
    "DEFAULT_TRUNC",
    "dedekind_eta",
    "eisenstein_holo",
    "theta",
    "theta_char",
    "theta_char_vderiv",
    "apply_moebius",
]

MIN_IM_TAU = 0.05


@dataclass(frozen=True)
class ModularPoint:
    """A point tau in the upper half-plane, carrying its nome q."""

    tau: complex

    def __post_init__(self):
        if not (self.tau.imag > 0):
            raise DomainError(f"Im(tau) must be > 0, got tau = {self.tau}")
        if not abs(self.q) < 1:
            raise DomainError(f"|q| must be < 1, got |q| = {abs(self.q)}")

    @property
    def q(self) -> complex:
        return cmath.exp(2j * cmath.pi * self.tau)

    def require_qseries_domain(self):
        if self.tau.imag < MIN_IM_TAU:
            raise DomainError(
                f"Im(tau) = {self.tau.imag} < {MIN_IM_TAU}: fold into the "
                "fundamental domain before calling a q-series evaluator"
            )


@dataclass(frozen=True)
class ThetaChar:
    """Characteristics (a, b) of theta[a;b](v|tau); integers mod 2 give
    the four classical thetas."""

    a: complex
    b: complex

    def __post_init__(self):
        for name in ("a", "b"):
            x = complex(getattr(self, name))
            if not (math.isfinite(x.real) and math.isfinite(x.imag)):
                raise DomainError(f"characteristic {name} must be finite")


@dataclass(frozen=True)
class Moebius:
    """An SL(2,C) matrix (a b; c d), renormalized to det = 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if det == 0:
            raise DomainError("Moebius matrix is singular")
        r = cmath.sqrt(det)
        object.__setattr__(self, "a", self.a / r)
        object.__setattr__(self, "b", self.b / r)
        object.__setattr__(self, "c", self.c / r)
        object.__setattr__(self, "d", self.d / r)

    @classmethod
    def identity(cls) -> "Moebius":
        return cls(1, 0, 0, 1)

    @classmethod
    def inversion(cls) -> "Moebius":
        """z -> -1/z."""
        return cls(0, -1, 1, 0)

    @classmethod
    def translation(cls, n: complex = 1) -> "Moebius":
        """z -> z + n."""
        return cls(1, n, 0, 1)


@dataclass(frozen=True)
class QTruncation:
    """Truncation policy for q-series: absolute tolerance + term budget."""

    tol: float = 1e-12
    max_terms: int = 10**6

    def __post_init__(self):
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if self.max_terms < 1:
            raise DomainError("max_terms must be >= 1")


DEFAULT_TRUNC = QTruncation()


def _as_point(tau) -> ModularPoint:
    return tau if isinstance(tau, ModularPoint) else ModularPoint(complex(tau))


def dedekind_eta(tau, trunc: QTruncation = DEFAULT_TRUNC) -> complex:
    """eta(tau) = q^(1/24) prod_{n>=1} (1 - q^n).

    The 24th root uses the principal logarithm of q.
    """
    pt = _as_point(tau)
    pt.require_qseries_domain()
    q = pt.q
    prefactor = cmath.exp(cmath.log(q) / 24)
    prod = 1.0 + 0j
    qn = 1.0 + 0j
    absq = abs(q)
    for n in range(1, trunc.max_terms + 1):
        qn *= q
        prod *= 1 - qn
        # remaining factors differ from 1 by < |q|^(n+1)/(1-|q|) in log
        tail = absq ** (n + 1) / (1 - absq)
        if tail < trunc.tol:
            return prefactor * prod
    raise TruncationNotReached("dedekind_eta: max_terms exhausted")


_EIS_COEF = {2: (-24, 1), 4: (240, 3), 6: (-504, 5)}


def eisenstein_holo(k: int, tau, trunc: QTruncation = DEFAULT_TRUNC) -> complex:
    """Holomorphic Eisenstein series E_k, k in {2, 4, 6}, by Lambert series."""
    if k not in _EIS_COEF:
        raise DomainError(f"k must be one of 2, 4, 6, got {k}")
    pt = _as_point(tau)
    pt.require_qseries_domain()
    q = pt.q
    coef, power = _EIS_COEF[k]
    total = 1.0 + 0j
    qm = 1.0 + 0j
    for m in range(1, trunc.max_terms + 1):
        qm *= q
        term = coef * m**power * qm / (1 - qm)
        total += term
        if abs(term) < trunc.tol * max(1.0, abs(total)):
            return total
    raise TruncationNotReached(f"eisenstein_holo(k={k}): max_terms exhausted")


_CLASSICAL_CHARS = {
    1: ThetaChar(1, 1),
    2: ThetaChar(1, 0),
    3: ThetaChar(0, 0),
    4: ThetaChar(0, 1),
}


def theta(j: int, v, tau, trunc: QTruncation = DEFAULT_TRUNC) -> complex:
    """Jacobi theta function theta_j(v|tau), j in {1, 2, 3, 4}."""
    if j not in _CLASSICAL_CHARS:
        raise DomainError(f"j must be one of 1..4, got {j}")
    return theta_char(_CLASSICAL_CHARS[j], v, tau, trunc)


def _theta_terms(ch: ThetaChar, v, tau, trunc: QTruncation, weight):
    """Sum weight(m + a/2) * exp(i pi tau (m+a/2)^2 + 2 i pi (v+b/2)(m+a/2))
    symmetrically around the peak of the Gaussian envelope."""
    pt = _as_point(tau)
    pt.require_qseries_domain()
    z = pt.tau
    a = complex(ch.a)
    b = complex(ch.b)
    v = complex(v)

    def term(m: int) -> complex:
        n = m + a / 2
        return weight(n) * cmath.exp(
            1j * cmath.pi * z * n * n + 2j * cmath.pi * (v + b / 2) * n
        )

    center = int(round(-a.real / 2))
    total = term(center)
    # flank the center until both one-sided tails are below tolerance for
    # a few consecutive terms (guards against the phase factor masking a
    # not-yet-decaying Gaussian)
    quiet = 0
    for step in range(1, trunc.max_terms + 1):
        t_hi = term(center + step)
        t_lo = term(center - step)
        total += t_hi + t_lo
        if max(abs(t_hi), abs(t_lo)) < trunc.tol * max(1.0, abs(total)):
            quiet += 1
            if quiet >= 3:
                return total
        else:
            quiet = 0
    raise TruncationNotReached("theta series: max_terms exhausted")


def theta_char(ch: ThetaChar, v, tau, trunc: QTruncation = DEFAULT_TRUNC) -> complex:
    """theta[a;b](v|tau) with arbitrary complex characteristics."""
    return _theta_terms(ch, v, tau, trunc, lambda n: 1.0)


def theta_char_vderiv(
    ch: ThetaChar, v, tau, trunc: QTruncation = DEFAULT_TRUNC
) -> complex:
    """d/dv of theta[a;b](v|tau), term-by-term."""
    return _theta_terms(ch, v, tau, trunc, lambda n: 2j * cmath.pi * n)


def apply_moebius(M: Moebius, tau, pole_tol: float = 1e-12):
    """(a tau + b) / (c tau + d); returns a ModularPoint when possible,
    else the bare complex value (the map can leave the upper half-plane
    for complex matrices)."""
    pt = _as_point(tau)
    denom = M.c * pt.tau + M.d
    if abs(denom) < pole_tol:
        raise PoleHit(f"c*tau + d = {denom} below tolerance")
    value = (M.a * pt.tau + M.b) / denom
    if value.imag > 0:
        return ModularPoint(value)
    return value
