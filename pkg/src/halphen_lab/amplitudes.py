"""Four-point string amplitudes and torus lattice sums.

Genus zero: the closed-form Gamma-ratio amplitude, its odd-zeta
exponential expansion, and the sigma_n power-sum recursion.  Genus one:
the torus propagator in theta and momentum-space forms, and the
Kronecker-Eisenstein graph sums D_n with their Eisenstein reductions

    D_2 = E_2 / (4 pi)^2,
    D_3 = E_3 / (4 pi)^3 + zeta(3) / 64.

Conventions: lattice momenta p = m + n tau exclude the origin; every
propagator carries tau_2 / (4 pi |p|^2).  The 1/(4 pi) normalization is
fixed by the D_2 identity together with the theta-form propagator (the
exact relation P = -1/4 log|th1(z)/th1'(0)|^2 + pi Im(z)^2/(2 tau_2)
= sum_p' tau_2 e^{2 pi i (n u - m v)} / (4 pi |p|^2) + log|sqrt(2 pi) eta|
for z = u + v tau).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import (
    DivergentParameter,
    DomainError,
    FitIllConditioned,
    KinematicsDegenerate,
    LatticePointHit,
    NotConverged,
    PoleHit,
    WeightTooLarge,
)
from .maass import LatticeSumSpec, MaassValue, eisenstein_fourier, riemann_zeta
from .modforms import DEFAULT_TRUNC, ModularPoint, QTruncation, dedekind_eta, theta

__all__ = [
    "Mandelstam",
    "GraphMultiplicities",
    "tree_amplitude_gamma",
    "tree_amplitude_series",
    "sigma_n",
    "sigma_recursion_check",
    "dimension_dn",
    "genus_one_propagator",
    "genus_one_propagator_momentum",
    "kronecker_eisenstein_Dn",
    "graph_D",
    "decomposition_probe",
]


@dataclass(frozen=True)
class Mandelstam:
    """Massless four-point kinematics; u is forced to -(s+t)."""

    s: float
    t: float
    alpha_prime: float = 1.0

    def __post_init__(self):
        if self.alpha_prime <= 0:
            raise DomainError("alpha_prime must be positive")

    @property
    def u(self) -> float:
        return -(self.s + self.t)

    @property
    def xs(self) -> tuple:
        """(alpha' s, alpha' t, alpha' u)."""
        ap = self.alpha_prime
        return (ap * self.s, ap * self.t, ap * self.u)


def _gamma_safe(x: float) -> float:
    if x <= 0 and abs(x - round(x)) < 1e-9:
        raise PoleHit(f"Gamma({x}) is at or near a pole")
    return math.gamma(x)


def tree_amplitude_gamma(k: Mandelstam) -> float:
    """A = Gamma(1+a's) Gamma(1+a't) Gamma(1+a'u)
         / (a'^3 stu Gamma(1-a's) Gamma(1-a't) Gamma(1-a'u))."""
    xs = k.xs
    pref = xs[0] * xs[1] * xs[2]
    if pref == 0:
        raise KinematicsDegenerate("s t u = 0: pole prefactor is singular")
    num = 1.0
    den = 1.0
    for x in xs:
        num *= _gamma_safe(1 + x)
        den *= _gamma_safe(1 - x)
    return num / (pref * den)


def sigma_n(k: Mandelstam, n: int) -> float:
    """Direct power sum sigma_n = (a's)^n + (a't)^n + (a'u)^n, n >= 2."""
    if n < 2:
        raise DomainError("sigma_n needs n >= 2 (sigma_1 vanishes identically)")
    return sum(x**n for x in k.xs)


def sigma_recursion_check(k: Mandelstam, n: int) -> float:
    """|sigma_n(direct) - n * sum_{2p+3q=n} ((p+q-1)!/(p! q!))
    (sigma_2/2)^p (sigma_3/3)^q|."""
    s2 = sigma_n(k, 2) / 2
    s3 = sigma_n(k, 3) / 3
    total = 0.0
    for p in range(n // 2 + 1):
        rem = n - 2 * p
        if rem % 3 or rem < 0:
            continue
        q = rem // 3
        if p == q == 0:
            continue
        total += (
            math.factorial(p + q - 1)
            / (math.factorial(p) * math.factorial(q))
            * s2**p
            * s3**q
        )
    return abs(sigma_n(k, n) - n * total)


def tree_amplitude_series(k: Mandelstam, N: int, tol: float = 1e-12) -> float:
    """Exponential form of the tree amplitude,

        A = (1 / a'^3 stu) exp(-sum_{n>=1}^{N}
                                2 zeta(2n+1)/(2n+1) sigma_{2n+1}),

    with only odd power sums in the exponent (the even ones cancel
    between Gamma(1+x) and Gamma(1-x)).  NotConverged when the last
    retained exponent term still exceeds tol.
    """
    xs = k.xs
    if max(abs(x) for x in xs) >= 1:
        raise NotConverged("series needs |alpha' s|, |alpha' t|, |alpha' u| < 1")
    pref = xs[0] * xs[1] * xs[2]
    if pref == 0:
        raise KinematicsDegenerate("s t u = 0: pole prefactor is singular")
    expo = 0.0
    last = 0.0
    for n in range(1, N + 1):
        last = 2 * riemann_zeta(2 * n + 1) / (2 * n + 1) * sigma_n(k, 2 * n + 1)
        expo -= last
    if N > 0 and abs(last) > tol:
        raise NotConverged(
            f"last exponent term {last:.3e} above tol = {tol}; increase N"
        )
    return math.exp(expo) / pref


def dimension_dn(n: int) -> int:
    """Dimension of the space of holomorphic modular forms of weight n,
    spanned by E4^a E6^b with 4a + 6b = n.

    With k = n/2 the count is floor((k+2)/2) - floor((k+2)/3); odd
    weights carry no forms.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    if n % 2:
        return 0
    k = n // 2
    return (k + 2) // 2 - (k + 2) // 3


# ---------------------------------------------------------------------------
# genus one


def genus_one_propagator(
    z: complex,
    tau: ModularPoint,
    trunc: QTruncation = DEFAULT_TRUNC,
) -> float:
    """P(z) = -1/4 log|th1(z|tau)/th1'(0|tau)|^2 + pi Im(z)^2 / (2 tau_2)."""
    z = complex(z)
    th1 = theta(1, z, tau.tau, trunc)
    if abs(th1) < 1e-12:
        raise LatticePointHit(f"z = {z} is on (or too near) the lattice")
    th1p = 2j * cmath.pi * dedekind_eta(tau.tau, trunc) ** 3
    return float(
        -0.5 * math.log(abs(th1 / th1p)) + math.pi * z.imag**2 / (2 * tau.tau.imag)
    )


def _lattice_grid(tau: complex, R: int):
    """|p|^2 on the (2R+1)^2 grid of p = m + n tau, origin at the center."""
    m = np.arange(-R, R + 1)
    n = np.arange(-R, R + 1)
    M, N = np.meshgrid(m, n, indexing="ij")
    P = M + N * tau
    return M, N, np.abs(P) ** 2


def _weight_grid(tau: complex, R: int):
    """W(p) = tau_2 / (4 pi |p|^2) with W(0) = 0."""
    M, N, p2 = _lattice_grid(tau, R)
    W = np.zeros_like(p2)
    mask = p2 > 0
    W[mask] = tau.imag / (4 * math.pi * p2[mask])
    return M, N, W


def genus_one_propagator_momentum(
    z: complex,
    tau: ModularPoint,
    R: int = 80,
) -> float:
    """Modular-invariant momentum form

        Phat(z) = sum_{p != 0} tau_2 e^{2 pi i (n u - m v)} / (4 pi |p|^2),

    where z = u + v tau.  The full propagator is Phat + C with
    C = log|sqrt(2 pi) eta(tau)|.
    """
    z = complex(z)
    t = tau.tau
    v = z.imag / t.imag
    u = z.real - v * t.real
    M, N, W = _weight_grid(t, R)
    phase = np.cos(2 * math.pi * (N * u - M * v))
    return float(np.sum(W * phase))


def modular_anomaly(tau: ModularPoint, trunc: QTruncation = DEFAULT_TRUNC) -> float:
    """C(tau) = log|sqrt(2 pi) eta(tau)|."""
    return float(math.log(math.sqrt(2 * math.pi) * abs(dedekind_eta(tau.tau, trunc))))


def _dn_tail(n: int, tau: complex, R: int) -> float:
    """Crude tail bound for the square-cutoff D_n sum: the slowest-decaying
    contribution pairs one far momentum ~R against near ones, giving
    O(R^{-2}) per excluded shell times the convergent remainder."""
    t2 = tau.imag
    base = t2 / (4 * math.pi)
    # sum over |p| > R of 1/|p|^4 ~ 2 pi R^{-2} / t2 (continuum estimate)
    far = 2 * math.pi / (t2 * R**2)
    near = 8.0 * base  # bounded by a few small-|p| terms of the (n-2)-fold sum
    return float(base**2 * far * max(1.0, near) ** max(0, n - 2))


def kronecker_eisenstein_Dn(
    n: int,
    tau: ModularPoint,
    spec: LatticeSumSpec = LatticeSumSpec(),
) -> MaassValue:
    """D_n = sum over p_1 + ... + p_n = 0 (all p_i != 0) of
    prod tau_2 / (4 pi |p_i|^2).

    Evaluated by FFT self-convolution of the single-propagator weight
    grid; n in {2, 3, 4} are supported (higher n has no reduction to
    check and explodes in cost).
    """
    if n < 2:
        raise DivergentParameter("D_n needs n >= 2")
    if n > 4:
        raise WeightTooLarge("D_n implemented for n in {2, 3, 4}")
    t = tau.tau
    R = int(spec.R)
    _, _, W = _weight_grid(t, R)
    if n == 2:
        value = float(np.sum(W * W))
    else:
        g2 = fftconvolve(W, W)  # indexed by p1 + p2 on a (4R+1)^2 grid
        if n == 3:
            # embed W at the center of the convolution grid: p3 = -(p1+p2)
            Wpad = np.zeros_like(g2)
            Wpad[R : 3 * R + 1, R : 3 * R + 1] = W[::-1, ::-1]
            value = float(np.sum(g2 * Wpad))
        else:
            # p1+p2 = -(p3+p4); g2 is even under p -> -p
            value = float(np.sum(g2 * g2[::-1, ::-1]))
    return MaassValue(value=value, est_error=_dn_tail(n, t, R))


@dataclass(frozen=True)
class GraphMultiplicities:
    """Link multiplicities n_ij, 1 <= i < j <= 4, keyed in the fixed
    order (12, 13, 14, 23, 24, 34)."""

    n: tuple

    _EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

    def __post_init__(self):
        if len(self.n) != 6:
            raise DomainError("need 6 multiplicities (12, 13, 14, 23, 24, 34)")
        n = tuple(int(v) for v in self.n)
        if any(v < 0 for v in n):
            raise DomainError("multiplicities must be non-negative")
        if sum(n) < 1:
            raise DomainError("total weight must be >= 1")
        object.__setattr__(self, "n", n)

    @property
    def weight(self) -> int:
        return sum(self.n)

    def edges(self):
        """Expanded edge list [(i, j), ...] with repetition."""
        out = []
        for (i, j), mult in zip(self._EDGES, self.n):
            out.extend([(i, j)] * mult)
        return out


def _fundamental_cycles(edges):
    """Spanning-forest cycle basis of a multigraph on vertices {0..3}.

    Returns signed cycle vectors over the edge list, one per chord.
    Momentum conservation factorizes over connected components, so a
    single forest-wide basis is correct for disconnected graphs too.
    """
    verts = sorted({v for e in edges for v in e})
    adj = {v: [] for v in verts}
    for idx, (a, b) in enumerate(edges):
        adj[a].append((b, idx, +1))  # edge oriented a -> b carries +p
        adj[b].append((a, idx, -1))
    parent = {}  # vertex -> (prev vertex, edge idx, sign into vertex) | None
    for root in verts:
        if root in parent:
            continue
        parent[root] = None
        order = [root]
        qi = 0
        while qi < len(order):
            vtx = order[qi]
            qi += 1
            for nb, idx, sgn in adj[vtx]:
                if nb not in parent:
                    parent[nb] = (vtx, idx, sgn)
                    order.append(nb)

    def path_to_root(v):
        out = []
        while parent[v] is not None:
            pv, idx, sgn = parent[v]
            out.append((idx, sgn))
            v = pv
        return out

    cycles = []
    tree = {parent[v][1] for v in parent if parent[v] is not None}
    for idx, (a, b) in enumerate(edges):
        if idx in tree:
            continue
        vec = [0] * len(edges)
        vec[idx] = 1  # loop momentum flows a -> b on the chord
        # close the loop through the forest: b -> root -> a
        for e, sgn in path_to_root(b):
            vec[e] += sgn
        for e, sgn in path_to_root(a):
            vec[e] -= sgn
        cycles.append(vec)
    return verts, cycles


def graph_D(
    mult: GraphMultiplicities,
    tau: ModularPoint,
    spec: LatticeSumSpec = LatticeSumSpec(R=40),
) -> MaassValue:
    """General four-puncture Kronecker-Eisenstein graph sum.

    Vertex momentum conservation is solved by a spanning-tree cycle
    basis; bridge edges are forced to p = 0 and, under the p != 0
    convention, make the whole sum vanish (flagged in `note`).
    Banana topologies (all links between one pair) delegate to the FFT
    path; other graphs enumerate up to two loop momenta directly.
    """
    if mult.weight > 6:
        raise WeightTooLarge("total weight capped at 6")
    edges = mult.edges()
    verts, cycles = _fundamental_cycles(edges)

    # bridge detection: an edge outside every cycle carries zero momentum
    forced_zero = [
        i for i in range(len(edges)) if all(c[i] == 0 for c in cycles)
    ]
    if forced_zero:
        return MaassValue(
            value=0.0, est_error=0.0, note="zero-mode-excluded"
        )

    nonzero = [i for i, v in enumerate(mult.n) if v]
    if len(nonzero) == 1:
        return kronecker_eisenstein_Dn(mult.weight, tau, LatticeSumSpec(R=spec.R))

    loops = len(cycles)
    if loops > 2:
        raise WeightTooLarge(
            f"{loops} independent loops exceed the direct-enumeration budget"
        )

    t = tau.tau
    R = spec.R
    rng = np.arange(-R, R + 1)
    M, N = np.meshgrid(rng, rng, indexing="ij")
    P = (M + N * t).ravel()

    def weights(p):
        w = np.zeros(p.shape)
        mask = np.abs(p) > 1e-12
        w[mask] = t.imag / (4 * math.pi * np.abs(p[mask]) ** 2)
        return w

    if loops == 1:
        q = P
        total = np.ones(q.shape)
        for i in range(len(edges)):
            total = total * weights(cycles[0][i] * q)
        value = float(np.sum(total))
    else:
        # two nested loop momenta; vectorize the inner one
        value = 0.0
        for q1 in P:
            prod = np.ones(P.shape)
            for i in range(len(edges)):
                pe = cycles[0][i] * q1 + cycles[1][i] * P
                prod = prod * weights(pe)
                if not prod.any():
                    break
            value += float(np.sum(prod))
    return MaassValue(value=value, est_error=_dn_tail(mult.weight, t, R))


def decomposition_probe(
    n: int,
    tau_list,
    spec: LatticeSumSpec = LatticeSumSpec(),
) -> dict:
    """Fit D_n(tau) over tau_list against the Eisenstein ansatz

        D_n = p_n + b_1 E_n/(4 pi)^n + sum_{r+s=n, r,s>=2}
              c_{r,s} E_r E_s / (4 pi)^n

    and report coefficients plus per-tau residuals.
    """
    if n not in (2, 3, 4):
        raise DomainError("decomposition probe supports n in {2, 3, 4}")
    taus = [ModularPoint(complex(t)) for t in tau_list]
    pairs = [(r, n - r) for r in range(2, n - 1) if r <= n - r]
    cols = 2 + len(pairs)
    if len(taus) < cols + 1:
        raise DomainError(f"need at least {cols + 1} tau samples")
    A = np.zeros((len(taus), cols))
    y = np.zeros(len(taus))
    four_pi_n = (4 * math.pi) ** n
    for i, mp in enumerate(taus):
        y[i] = kronecker_eisenstein_Dn(n, mp, spec).value
        A[i, 0] = 1.0
        A[i, 1] = eisenstein_fourier(n, mp.tau).value / four_pi_n
        for j, (r, s) in enumerate(pairs):
            A[i, 2 + j] = (
                eisenstein_fourier(r, mp.tau).value
                * eisenstein_fourier(s, mp.tau).value
                / four_pi_n
            )
    cond = np.linalg.cond(A)
    if cond > 1e10:
        raise FitIllConditioned(f"design matrix condition number {cond:.2e}")
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return {
        "n": n,
        "p_n": float(coef[0]),
        "b_1": float(coef[1]),
        "c_rs": {f"{r},{s}": float(coef[2 + j]) for j, (r, s) in enumerate(pairs)},
        "residuals": [float(r) for r in resid],
        "tau": [complex(t) for t in tau_list],
        "condition": float(cond),
    }
