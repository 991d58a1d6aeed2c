"""Background geometry of a black hole with static Schwarzschild radius in an
expanding (de Sitter) universe.

Everything here is exact bookkeeping on the metric: the lapse, the operator
symbols and their hyperbolicity bound, the smoothed auxiliary symbol used for
energy estimates, the damping-term gradient that singles out M_bh ∝ a(t), and
the ingoing null radial geodesic that bounds wave supports away from the
horizon.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class BracketFailure(RuntimeError):
    """Root bracketing failed; indicates out-of-range inputs or a bug."""


@dataclass(frozen=True)
class PhysicalParams:
    """Cosmological and field constants.

    H       Hubble parameter (1/time), 0 for a static universe
    c       speed of light
    G       gravitational constant
    M_bh    black hole mass (static Schwarzschild radius model)
    h       Planck constant (or hbar; only the ratio m*c^2/h matters)
    m_sq    field mass squared; negative values model Higgs/tachyonic fields
    """

    H: float = 1.0
    c: float = 1.0
    G: float = 1.0
    M_bh: float = 0.0
    h: float = 1.0
    m_sq: float = 0.0

    @property
    def r_sch(self) -> float:
        return 2.0 * self.G * self.M_bh / self.c**2

    @property
    def field_mass_sq(self) -> float:
        """The m^2 c^4 / h^2 coefficient of the Klein-Gordon mass term."""
        return self.m_sq * self.c**4 / self.h**2

    @property
    def de_sitter_radius(self) -> float:
        """Radius c/H of the permanently bounded domain of influence."""
        if self.H <= 0.0:
            return math.inf
        return self.c / self.H


def lapse_F(r, p: PhysicalParams):
    """Metric lapse F(r) = 1 - R_sch/r. Vanishes at the horizon."""
    return 1.0 - p.r_sch / np.asarray(r, dtype=float)


def principal_symbol(x, xi, p: PhysicalParams) -> float:
    """Principal symbol A2(x; xi) of the spatial operator, in Cartesian form.

    A2 = -c^2 (1 - R/|x|) (|xi|^2 - R (x.xi)^2 / |x|^3); non-positive for
    |x| > R, which is the strict hyperbolicity statement.
    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    R = p.r_sch
    ax = float(np.linalg.norm(x))
    dot = float(x @ xi)
    return -p.c**2 * (1.0 - R / ax) * (float(xi @ xi) - R * dot**2 / ax**3)


def lower_symbol(x, xi, p: PhysicalParams) -> complex:
    """First-order companion symbol A1(x; xi) (purely imaginary)."""
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    R = p.r_sch
    ax = float(np.linalg.norm(x))
    return -p.c**2 * (1.0 - R / ax) * 1j * R * float(x @ xi) / ax**3


def char_speed_bound(x, p: PhysicalParams) -> float:
    """Local characteristic speed c*F(|x|); the CFL limit of the solvers."""
    ax = np.linalg.norm(np.asarray(x, dtype=float), axis=-1) if np.ndim(x) > 0 else abs(x)
    return p.c * (1.0 - p.r_sch / float(ax))


def _smoothstep(s):
    # quintic C^2 bridge on [0, 1]
    s = np.clip(s, 0.0, 1.0)
    return s**3 * (10.0 - 15.0 * s + 6.0 * s**2)


def cutoff_chi(x, eps: float, p: PhysicalParams) -> float:
    """Cutoff chi_eps: 0 inside R+eps/2, 1 outside R+eps, smooth in between."""
    ax = float(np.linalg.norm(np.asarray(x, dtype=float)))
    lo = p.r_sch + eps / 2.0
    return float(_smoothstep((ax - lo) / (eps / 2.0)))


def aux_symbol(x, xi, eps: float, p: PhysicalParams) -> complex:
    """Symbol of the auxiliary operator with coefficients frozen near the horizon.

    Equals the flat d'Alembertian symbol -c^2|xi|^2 for |x| < R+eps/2 and the
    full A2 + A1 for |x| > R+eps.
    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    chi = cutoff_chi(x, eps, p)
    R = p.r_sch
    ax = float(np.linalg.norm(x))
    dot = float(x @ xi)
    return p.c**2 * (1.0 - chi * R / ax) * (
        -float(xi @ xi) + chi * R * dot**2 / ax**3 - chi * 1j * R * dot / ax**3)


def damping_gradient(a: float, a_dot: float, Mb: float, Mb_dot: float,
                     r: float, p: PhysicalParams) -> float:
    """Radial gradient of the d'Alembertian damping ratio for scale factor a(t)
    and time-dependent hole mass M_bh(t).

    Identically zero iff M_bh(t) = const * a(t): the only mass law that damps
    waves uniformly in space (and, for a = e^{Ht}, uniformly in time).
    """
    den = p.c**2 * r * a - 2.0 * p.G * Mb
    return 2.0 * p.c**2 * p.G * (Mb * a_dot - a * Mb_dot) / den**2


def conformal_time(t, p: PhysicalParams):
    """A(t) = integral of 1/a(s) ds: (1 - e^{-Ht})/H for de Sitter, t if H=0."""
    t = np.asarray(t, dtype=float)
    if p.H == 0.0:
        return t
    return -np.expm1(-p.H * t) / p.H


def geodesic_radius(t: float, R_ID: float, p: PhysicalParams,
                    tol: float = 1e-12, A=None) -> float:
    """Radius r(t) of the ingoing null radial geodesic started at R_ID.

    Solves R_ID - r - R_sch*log(1 - (R_ID - r)/(R_ID - R_sch)) = c*A(t) by
    bisection (the left side is monotone with a log singularity at the
    horizon) followed by Newton polish. ``A`` may override the built-in
    conformal time, e.g. for other scale factors.
    """
    if R_ID <= p.r_sch:
        raise BracketFailure("geodesic must start outside the horizon")
    R = p.r_sch
    target = p.c * (float(A(t)) if A is not None else float(conformal_time(t, p)))
    if target <= 0.0:
        return R_ID
    D = R_ID - R

    def g(z):
        return z - R * math.log1p(-z / D) - target

    lo, hi = 0.0, D * (1.0 - 1e-16)
    if R == 0.0:
        if target >= D:
            raise BracketFailure("flat-space geodesic left the bracket")
        z = target
    else:
        if g(hi) < 0.0:
            raise BracketFailure("geodesic equation has no root in range")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if g(mid) > 0.0:
                hi = mid
            else:
                lo = mid
            if abs(g(mid)) < tol:
                break
        z = 0.5 * (lo + hi)
        for _ in range(3):  # Newton polish
            dg = 1.0 + R / (D - z)
            z = min(max(z - g(z) / dg, 0.0), D * (1.0 - 1e-16))
    return R_ID - z


def geodesic_support_margin(R_ID: float, p: PhysicalParams) -> float:
    """The eps > 0 with r(t) >= R_sch + eps for all t: the t -> infinity limit
    of the geodesic minus R_sch, from the implicit equation at c*A(infinity)."""
    if p.H <= 0.0:
        raise BracketFailure("infinite-time margin needs an expanding universe")
    big = 50.0 / p.H
    return geodesic_radius(big, R_ID, p) - p.r_sch


def influence_radius(t, R_ID: float, p: PhysicalParams):
    """Straight-line lower bound R_ID - c*phi(t) on supports; more permissive
    than the geodesic, which slows near the horizon."""
    return R_ID - p.c * conformal_time(t, p)
