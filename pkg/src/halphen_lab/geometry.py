"""Curvature of diagonal triaxial Bianchi IX metrics.

The metric is taken in the frame

    ds^2 = Omega1 Omega2 Omega3 dT^2
           + (Omega2 Omega3 / Omega1) sigma1^2 + (cyclic),

with sigma_i the left-invariant SU(2) one-forms, d sigma1 = sigma2 ^ sigma3
(cyclic).  The curvature two-form splits into self-dual and anti-self-dual
parts; for a diagonal metric both blocks are diagonal 3x3 matrices built
from two auxiliary triples

    u_i = [X_i/Omega_i - X_j/Omega_j - X_k/Omega_k] / (4 Omega_i),
    v_i = [Y_i/Omega_i - Y_j/Omega_j - Y_k/Omega_k] / (4 Omega_i),

with X_i = Omega_i' + Omega_j Omega_k and Y_i = Omega_i' - Omega_j Omega_k.
The Lagrange flow makes Y = 0 (so v = 0) and the Darboux-Halphen flow
makes v_i = 1/2 constant; either way the anti-self-dual curvature block
vanishes identically, which is the self-duality of both branches.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMetric, DomainError, InsufficientData
from .halphen import RealTriAxial, Trajectory, system_rhs, system_second_derivative

__all__ = [
    "ConnectionCoeffs",
    "CurvatureDecomp",
    "EndpointClass",
    "connection",
    "curvature_decomp",
    "classify_geometry",
    "onshell_weyl",
    "frame_coefficients",
    "proper_time",
    "classify_endpoint",
    "taub_nut_check",
    "taub_nut_endpoints",
]

_CYC = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


@dataclass(frozen=True)
class ConnectionCoeffs:
    """Self-dual (u) and anti-self-dual (v) connection triples and their
    T-derivatives."""

    u: tuple
    v: tuple
    u_dot: tuple
    v_dot: tuple


@dataclass(frozen=True)
class CurvatureDecomp:
    """Diagonal entries of the curvature blocks in an orthonormal
    (anti)self-dual two-form basis.

    scalar        : scalar curvature s
    weyl_plus     : self-dual Weyl eigenvalues (trace-free)
    weyl_minus    : anti-self-dual Weyl eigenvalues (trace-free)
    ricci_plus    : trace-free Ricci block seen from the self-dual side
    ricci_minus   : the same block seen from the anti-self-dual side
    """

    scalar: float
    weyl_plus: tuple
    weyl_minus: tuple
    ricci_plus: tuple
    ricci_minus: tuple
    scalar_cross: float = 0.0

    def to_json(self) -> str:
        return json.dumps(
            {
                "scalar": self.scalar,
                "weyl_plus": list(self.weyl_plus),
                "weyl_minus": list(self.weyl_minus),
                "ricci_plus": list(self.ricci_plus),
                "ricci_minus": list(self.ricci_minus),
                "scalar_cross": self.scalar_cross,
            },
            sort_keys=True,
            indent=1,
        )


@dataclass(frozen=True)
class EndpointClass:
    """Result of endpoint classification of a trajectory."""

    kind: str  # 'nut' | 'bolt' | 'taubian_infinity' | 'curvature_singularity'
    T_end: float
    proper_time_end: float | None  # None when infinite
    exponents: tuple
    bolt_degree: float | None = None
    bolt_radius: float | None = None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "T_end": self.T_end,
                "proper_time_end": self.proper_time_end,
                "exponents": list(self.exponents),
                "bolt_degree": self.bolt_degree,
                "bolt_radius": self.bolt_radius,
                "detail": self.detail,
            },
            sort_keys=True,
            indent=1,
        )


def _require_nondegenerate(Omega):
    if min(abs(w) for w in Omega) < 1e-300:
        raise DegenerateMetric(f"vanishing metric coefficient in {Omega}")


def connection(state, system: str | None = None, Omega_dot=None) -> ConnectionCoeffs:
    """Connection triples (u, v) and their derivatives along a solution.

    Either `system` ('dh' or 'lagrange', derivatives from the flow) or an
    explicit Omega_dot triple must be supplied; second derivatives are
    only available on-flow.
    """
    Om = state.Omega if isinstance(state, RealTriAxial) else tuple(state)
    _require_nondegenerate(Om)
    if Omega_dot is None:
        if system is None:
            raise DomainError("need either a system name or Omega_dot")
        Omega_dot = system_rhs(system)(Om)
        Omega_ddot = system_second_derivative(system, Om, Omega_dot)
    else:
        Omega_ddot = None

    X = [Omega_dot[i] + Om[j] * Om[k] for i, j, k in _CYC]
    Y = [Omega_dot[i] - Om[j] * Om[k] for i, j, k in _CYC]
    u = tuple(
        (X[i] / Om[i] - X[j] / Om[j] - X[k] / Om[k]) / (4 * Om[i]) for i, j, k in _CYC
    )
    v = tuple(
        (Y[i] / Om[i] - Y[j] / Om[j] - Y[k] / Om[k]) / (4 * Om[i]) for i, j, k in _CYC
    )

    if Omega_ddot is None:
        u_dot = v_dot = (math.nan, math.nan, math.nan)
    else:
        Xd = [Omega_ddot[i] + Omega_dot[j] * Om[k] + Om[j] * Omega_dot[k]
              for i, j, k in _CYC]
        Yd = [Omega_ddot[i] - Omega_dot[j] * Om[k] - Om[j] * Omega_dot[k]
              for i, j, k in _CYC]
        dXO = [(Xd[i] * Om[i] - X[i] * Omega_dot[i]) / Om[i] ** 2 for i in range(3)]
        dYO = [(Yd[i] * Om[i] - Y[i] * Omega_dot[i]) / Om[i] ** 2 for i in range(3)]
        u_dot = tuple(
            (dXO[i] - dXO[j] - dXO[k]) / (4 * Om[i]) - u[i] * Omega_dot[i] / Om[i]
            for i, j, k in _CYC
        )
        v_dot = tuple(
            (dYO[i] - dYO[j] - dYO[k]) / (4 * Om[i]) - v[i] * Omega_dot[i] / Om[i]
            for i, j, k in _CYC
        )
    return ConnectionCoeffs(u=u, v=v, u_dot=u_dot, v_dot=v_dot)


def curvature_decomp(state, system: str) -> CurvatureDecomp:
    """Full curvature decomposition at a point of an on-flow solution.

    The self-dual curvature two-forms are

        S_i = u_i' dT ^ sigma_i - (u_i + 2 u_j u_k) sigma_j ^ sigma_k,

    the anti-self-dual ones

        A_i = v_i' dT ^ sigma_i + (2 v_j v_k - v_i) sigma_j ^ sigma_k,

    expanded on the orthonormal (anti)self-dual basis via

        dT ^ sigma_i        = (phi_i + chi_i) / (2 Omega_j Omega_k),
        sigma_j ^ sigma_k   = (phi_i - chi_i) / (2 Omega_i).
    """
    Om = state.Omega if isinstance(state, RealTriAxial) else tuple(state)
    cc = connection(state, system=system)
    u, v, ud, vd = cc.u, cc.v, cc.u_dot, cc.v_dot

    Q = [-(u[i] + 2 * u[j] * u[k]) for i, j, k in _CYC]
    QA = [2 * v[j] * v[k] - v[i] for i, j, k in _CYC]

    s_phi = [ud[i] / (2 * Om[j] * Om[k]) + Q[i] / (2 * Om[i]) for i, j, k in _CYC]
    s_chi = [ud[i] / (2 * Om[j] * Om[k]) - Q[i] / (2 * Om[i]) for i, j, k in _CYC]
    a_phi = [vd[i] / (2 * Om[j] * Om[k]) + QA[i] / (2 * Om[i]) for i, j, k in _CYC]
    a_chi = [vd[i] / (2 * Om[j] * Om[k]) - QA[i] / (2 * Om[i]) for i, j, k in _CYC]

    s = 4 * sum(s_phi)
    s_cross = 4 * sum(a_chi)
    return CurvatureDecomp(
        scalar=s,
        weyl_plus=tuple(2 * x - s / 6 for x in s_phi),
        weyl_minus=tuple(2 * x - s / 6 for x in a_chi),
        ricci_plus=tuple(2 * x for x in s_chi),
        ricci_minus=tuple(2 * x for x in a_phi),
        scalar_cross=s_cross,
    )


def classify_geometry(dec: CurvatureDecomp, tol: float = 1e-10) -> dict:
    """Classification flags read off a curvature decomposition.

    All comparisons are relative to the largest coefficient present, so
    the flags are scale invariant.
    """
    d = dec
    scale = max(
        1.0,
        abs(d.scalar),
        abs(d.scalar_cross),
        *(abs(x) for x in d.weyl_plus + d.weyl_minus + d.ricci_plus + d.ricci_minus),
    )

    def small(vals):
        return bool(all(abs(x) <= tol * scale for x in vals))

    einstein = small(d.ricci_plus) and small(d.ricci_minus) and bool(
        abs(d.scalar_cross) <= tol * scale
    )
    ricci_flat = einstein and bool(abs(d.scalar) <= tol * scale)
    csd = small(d.weyl_minus)
    casd = small(d.weyl_plus)
    return {
        "Einstein": einstein,
        "RicciFlat": ricci_flat,
        "SelfDual": ricci_flat and csd,
        "AntiSelfDual": ricci_flat and casd,
        "ConformallySelfDual": csd,
        "ConformallyAntiSelfDual": casd,
        "ConformallyFlat": csd and casd,
        "scalar": float(d.scalar),
    }


def onshell_weyl(dec: CurvatureDecomp, Lambda: float = 0.0):
    """Coefficient sets of the on-shell Weyl tensor with cosmological constant.

    Each part is (weyl eigenvalues, trace coefficient, cross coefficients):
    the self-dual block carries W+ together with (s - 2*Lambda)/12 and half
    the mixed Ricci coefficients, and analogously for the anti-self-dual
    block.  A quaternionic space is one whose minus part vanishes.
    """
    trace = (dec.scalar - 2.0 * Lambda) / 12.0
    plus = (dec.weyl_plus, trace, tuple(c / 2.0 for c in dec.ricci_plus))
    minus = (dec.weyl_minus, trace, tuple(c / 2.0 for c in dec.ricci_minus))
    return plus, minus


# ---------------------------------------------------------------------------
# endpoint classification


def frame_coefficients(Omega):
    """|f_i| with f_i = sqrt(Omega_j Omega_k / Omega_i).

    Absolute values are taken throughout: solutions with one negative
    component describe the same geometry up to an overall sign of the
    metric.
    """
    _require_nondegenerate(Omega)
    return tuple(
        math.sqrt(abs(Omega[j] * Omega[k] / Omega[i])) for i, j, k in _CYC
    )


def proper_time(traj: Trajectory) -> np.ndarray:
    """Cumulative proper time tau(T) = int sqrt|Omega1 Omega2 Omega3| dT."""
    dens = np.sqrt(np.abs(np.prod(traj.Omega, axis=1)))
    tau = np.concatenate([[0.0], np.cumsum(np.diff(traj.T) * 0.5 * (dens[1:] + dens[:-1]))])
    return tau


_PATTERNS = {
    # ratios p_i / sum(p) of the frame-coefficient exponents near the end
    "nut": (1 / 3, 1 / 3, 1 / 3),
    "bolt": (0.0, 0.0, 1.0),
    "taubian_infinity": (1 / 2, 1 / 2, 0.0),
    "curvature_singularity": (-1.0, 1.0, 1.0),
}


def _log_slope(x, y):
    """Least-squares slope of y against x."""
    x = np.asarray(x)
    y = np.asarray(y)
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return coef[0]


def classify_endpoint(
    traj: Trajectory,
    end: str = "last",
    window: int = 25,
) -> EndpointClass:
    """Classify the approached endpoint of an integrated trajectory.

    The frame coefficients f_i behave as powers of the remaining proper
    time delta-tau near a geometric endpoint.  The exponent ratios
    r_i = (d log f_i / dT) / (sum_j d log f_j / dT) are invariant under
    monotone reparametrisation and distinguish the four endpoint types:

        nut                     (1/3, 1/3, 1/3)   all f_i ~ delta-tau
        bolt                    (0, 0, 1)         one collapsing circle
        taubian infinity        (1/2, 1/2, 0)     tau diverges
        curvature singularity   (-1, 1, 1)

    For a bolt the degree n = 2 df/dtau of the shrinking direction and
    the limiting radius of the other two are estimated as well.
    """
    if len(traj.T) < window + 5:
        raise InsufficientData(
            f"need at least {window + 5} samples, got {len(traj.T)}"
        )
    if end == "first":
        T = traj.T[::-1]
        Om = traj.Omega[::-1]
    else:
        T = traj.T
        Om = traj.Omega
    T = T[-window:]
    Om = Om[-window:]

    f = np.array([frame_coefficients(tuple(row)) for row in Om])
    logf = np.log(f)
    slopes = np.array([_log_slope(T, logf[:, i]) for i in range(3)])
    total = slopes.sum()
    if abs(total) < 1e-14:
        raise InsufficientData("frame coefficients are stationary; integrate further")
    ratios = slopes / total

    best, dist = None, math.inf
    order = None
    for kind, pat in _PATTERNS.items():
        # ratios are attached to axes; try all relabelings
        for perm in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
            d = max(abs(ratios[perm[i]] - pat[i]) for i in range(3))
            if d < dist:
                best, dist, order = kind, d, perm

    tau = proper_time(traj)
    if end == "first":
        tau = tau[-1] - tau[::-1]
    tau_win = tau[-window:]

    detail = {"ratios": [float(r) for r in ratios], "pattern_distance": float(dist)}
    T_end_est = float(T[-1])
    tau_end = None
    bolt_degree = None
    bolt_radius = None

    if best == "taubian_infinity":
        # proper time diverges; report the blowup location in T instead
        tau_end = None
    else:
        # extrapolate tau_end from the fastest-growing |log f|: the
        # collapsing/blowing coefficient g obeys log g ~ p log(dtau),
        # i.e. d tau/dT = -dtau * (d log g/dT)/p, so
        # dtau ~ (dtau/dT)/(d log g /dT) * p at the last sample.
        i_fast = int(np.argmax(np.abs(slopes)))
        p_map = {"nut": 0.5, "bolt": 1.0, "curvature_singularity": -1.0 / 3.0}
        # exponent vs proper time of the dominant coefficient
        p = p_map[best] if best != "curvature_singularity" else -1.0 / 3.0
        dtau_dT = math.sqrt(abs(float(np.prod(Om[-1]))))
        g_rate = slopes[i_fast]
        dtau_rem = abs(p * dtau_dT / g_rate)
        tau_end = float(tau_win[-1] + dtau_rem)
        # refine T_end by the same local model
        T_end_est = float(T[-1] + dtau_rem / dtau_dT * (1 if T[-1] >= T[0] else -1))

    exps = tuple(float(r) for r in (np.array(_PATTERNS[best])[np.argsort(order)]
                                    if order else ratios))

    if best == "bolt":
        i_shrink = order[2]
        keep = [i for i in range(3) if i != i_shrink]
        if tau_end is not None:
            # the collapsing direction closes like f ~ (n/2) dtau
            rate = _log_slope(tau_win, f[:, i_shrink])
            bolt_degree = float(2 * abs(rate))
        bolt_radius = float(np.mean([f[-1, k] for k in keep]))
        detail["shrinking_axis"] = int(i_shrink)

    return EndpointClass(
        kind=best,
        T_end=T_end_est,
        proper_time_end=tau_end,
        exponents=exps,
        bolt_degree=bolt_degree,
        bolt_radius=bolt_radius,
        detail=detail,
    )


def taub_nut_check(m: float, r: float, T0: float = 0.0) -> CurvatureDecomp:
    """Curvature decomposition of the Taub-NUT solution at radius ``r``.

    The mass parameter fixes the biaxial family via m**2 = 1/(T0 - T*),
    and the radial coordinate maps to flow time through
    m*(r - m) = 2/(T - T0).  The result must classify as self-dual.
    """
    from .halphen import taub_nut_family

    if m <= 0:
        raise DomainError(f"mass must be positive, got {m}")
    if r <= m:
        raise DomainError(f"need r > m, got r={r}, m={m}")
    T = T0 + 2.0 / (m * (r - m))
    T_star = T0 - 1.0 / m**2
    state = taub_nut_family(T, T0, T_star)
    return curvature_decomp(state, system="dh")


def taub_nut_endpoints(T0: float, T_star: float, n_samples: int = 200) -> dict:
    """Integrate the biaxial family and classify both ends.

    For T_star < T0 the solution runs from a nut at T -> +inf down to a
    'taubian infinity' as T -> T0+; for T_star > T0 the inner end is a
    curvature singularity at T -> T_star+ instead.
    """
    from .halphen import taub_nut_family

    if T_star == T0:
        raise DomainError("degenerate family: T0 == T_star")
    inner = max(T0, T_star)
    lo = inner + 0.02 * max(1.0, abs(inner))
    hi = inner + 60.0
    T = np.concatenate([
        inner + np.geomspace(lo - inner, 1.0, n_samples // 2, endpoint=False),
        np.linspace(inner + 1.0, hi, n_samples // 2),
    ])
    Om = np.array([taub_nut_family(t, T0, T_star).Omega for t in T])
    traj = Trajectory.from_samples("dh", T, Om)
    outer = classify_endpoint(traj, end="last")
    inner_cls = classify_endpoint(traj, end="first")
    return {
        "outer": outer,
        "inner": inner_cls,
        "expected_inner": "taubian_infinity" if T_star < T0 else "curvature_singularity",
        "expected_outer": "nut",
    }
