"""Integral-transform kernels for the Klein-Gordon equation in de Sitter
space-time: the two-time kernel E, the data kernels K0 and K1, their time
derivative, and the distance function phi.

Conventions: natural units c = 1 throughout this module (unit handling lives
at the API boundary); complex curved mass M is always the principal square
root of 9H^2/4 - m^2c^4/h^2, which reproduces both the oscillatory
("large mass", M imaginary) and monotone ("small mass", Re M > 0) kernel
families through a single code path.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .geometry import PhysicalParams
from .hyp2f1 import gauss_2f1, gauss_2f1_z_array

LARGE_MASS = "large_mass"
SMALL_LIGHT = "small_light"
CRITICAL = "critical"
INTERMEDIATE = "intermediate"
SUPERCRITICAL = "supercritical"


class DomainViolation(ValueError):
    """Evaluation point outside the light-cone support of the kernel."""


class DenominatorSingular(ZeroDivisionError):
    """The light-cone-boundary denominator of the alternative K0 form vanished."""


@dataclass(frozen=True)
class CurvedMass:
    """Curved mass M = sqrt(9H^2/4 - m^2 c^4/h^2) with its decay regime."""

    mu_sq: complex
    M: complex
    regime: str
    H: float

    @classmethod
    def from_m_sq_eff(cls, m_sq_eff: complex, H: float) -> "CurvedMass":
        mu_sq = 9.0 * H**2 / 4.0 - m_sq_eff
        return cls.from_M(cmath.sqrt(mu_sq), H, mu_sq=mu_sq)

    @classmethod
    def from_M(cls, M: complex, H: float, mu_sq=None) -> "CurvedMass":
        M = complex(M)
        if mu_sq is None:
            mu_sq = M * M
        return cls(mu_sq=mu_sq, M=M, regime=_classify(M, mu_sq, H), H=H)

    @property
    def is_real_equation(self) -> bool:
        """True when the underlying field equation has real coefficients."""
        return abs(self.mu_sq.imag) <= 1e-12 * max(1.0, abs(self.mu_sq))


def _classify(M: complex, mu_sq: complex, H: float) -> str:
    if mu_sq.real <= 0.0 and abs(mu_sq.imag) <= 1e-12 * max(1.0, abs(mu_sq)):
        return LARGE_MASS
    re = M.real
    if abs(M - H / 2.0) <= 1e-12 * H:
        return CRITICAL
    if 0.0 < re < H / 2.0:
        return SMALL_LIGHT
    if re < 1.5 * H:
        return INTERMEDIATE
    return SUPERCRITICAL


def curved_mass(p: PhysicalParams) -> CurvedMass:
    """Curved mass of the field described by ``p`` (principal complex root)."""
    if p.H <= 0.0:
        raise ValueError("curved mass needs an expanding universe (H > 0)")
    return CurvedMass.from_m_sq_eff(p.field_mass_sq, p.H)


def _mval(M) -> complex:
    return complex(M.M) if isinstance(M, CurvedMass) else complex(M)


@dataclass(frozen=True)
class KernelEval:
    """A sampled kernel value together with the light-cone argument used."""

    r: float
    t: float
    b: float
    value: complex
    zeta: float


def phi(t, H: float):
    """Distance function phi(t) = (1 - e^{-Ht})/H; increasing, bounded by 1/H."""
    return -np.expm1(-H * np.asarray(t, dtype=float)) / H


def cone_range(t, b, H: float):
    """phi(t) - phi(b) = e^{-Ht}(e^{H(t-b)} - 1)/H, computed without the
    catastrophic cancellation the literal difference suffers at large t, b
    or as b -> t."""
    t = np.asarray(t, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.exp(-H * t) * np.expm1(H * (t - b)) / H


def _cone(r, t, b, H, delta=None):
    """Light-cone quantities: Q, N, zeta = N/Q and the stable 1 - zeta.

    When ``delta`` (the exact distance phi(t)-phi(b) - r of each node below
    the cone endpoint) is supplied, N and Q are assembled from products of
    positives: N = H delta (B - T + Hr), Q = 4BT + N. The literal differences
    of squares lose everything once e^{-H(t-b)} drops below rounding.
    """
    B = np.exp(-H * np.asarray(b, dtype=float))
    T = np.exp(-H * np.asarray(t, dtype=float))
    Hr = H * np.asarray(r, dtype=float)
    if delta is not None:
        N = H * np.asarray(delta, dtype=float) * ((B - T) + Hr)
        Q = 4.0 * B * T + N
    else:
        Q = (B + T) ** 2 - Hr**2
        N = (B - T) ** 2 - Hr**2
        if np.any(Q <= 0.0):
            raise DomainViolation(
                "point outside the kernel support: (e^{-Hb}+e^{-Ht})^2 <= (Hr)^2")
        if np.any(N < -1e-10 * Q):
            raise DomainViolation("point outside the light cone: r > phi(t) - phi(b)")
        N = np.maximum(N, 0.0)
    zeta = N / Q
    one_minus = 4.0 * B * T / Q
    return B, T, Q, zeta, one_minus


def e_values(r, t: float, b: float, M, H: float, delta=None) -> np.ndarray:
    """Kernel E(r, t; 0, b; M) vectorized over r (scalar t, b)."""
    M = _mval(M)
    mu = M / H
    B, T, Q, zeta, w = _cone(r, t, b, H, delta=delta)
    F = gauss_2f1_z_array(0.5 - mu, 0.5 - mu, 1.0, zeta, one_minus_z=w)
    return np.exp(-mu * math.log(4.0) + M * (b + t) + (mu - 0.5) * np.log(Q)) * F


def eval_E(r: float, t: float, b: float, M, H: float) -> KernelEval:
    """E(r,t;0,b;M) = 4^{-M/H} e^{M(b+t)} Q^{M/H-1/2} F(1/2-M/H,1/2-M/H;1;zeta)."""
    _, _, Q, zeta, _ = _cone(r, t, b, H)
    val = complex(e_values(np.array([r]), t, b, M, H)[0])
    return KernelEval(r=r, t=t, b=b, value=val, zeta=float(zeta))


def k1_values(r, t: float, M, H: float, delta=None) -> np.ndarray:
    return e_values(r, t, 0.0, M, H, delta=delta)


def eval_K1(r: float, t: float, M, H: float) -> KernelEval:
    """K1(r,t;M) := E(r,t;0,0;M) (same code path)."""
    ke = eval_E(r, t, 0.0, M, H)
    return ke


def k0_direct_values(r, t: float, M, H: float, delta=None) -> np.ndarray:
    """Explicit closed form of K0(r,t;M) = -d/db E(r,t;0,b;M)|_{b=0},
    vectorized over r. Regular on the whole closed cone 0 <= r <= phi(t)."""
    M = _mval(M)
    mu = M / H
    _, T, Q, zeta, w = _cone(r, t, 0.0, H, delta=delta)
    F1 = gauss_2f1_z_array(0.5 - mu, 0.5 - mu, 1.0, zeta, one_minus_z=w)
    F2 = gauss_2f1_z_array(1.5 - mu, 1.5 - mu, 2.0, zeta, one_minus_z=w)
    Hr2 = (H * np.asarray(r, dtype=float)) ** 2
    bracket = (Q * (H - M + H * T + M * T**2 - M * Hr2) * F1
               - (1.0 / H) * (H - 2.0 * M) ** 2 * T * (1.0 - T**2 + Hr2) * F2)
    return -np.exp(-mu * math.log(4.0) + M * t + (mu - 2.5) * np.log(Q)) * bracket


def eval_K0_direct(r: float, t: float, M, H: float) -> KernelEval:
    _, _, _, zeta, _ = _cone(r, t, 0.0, H)
    val = complex(k0_direct_values(np.array([r]), t, M, H)[0])
    return KernelEval(r=r, t=t, b=0.0, value=val, zeta=float(zeta))


def k0_alt_values(r, t: float, M, H: float) -> np.ndarray:
    """Second form of K0: two 2F1(...;1;.) terms over the light-cone-boundary
    denominator (1-e^{-Ht})^2 - H^2 r^2, which vanishes at r = phi(t)."""
    M = _mval(M)
    mu = M / H
    _, T, Q, zeta, w = _cone(r, t, 0.0, H)
    Hr2 = (H * np.asarray(r, dtype=float)) ** 2
    D = (1.0 - T) ** 2 - Hr2
    if np.any(np.abs(D) <= 1e-14 * Q):
        raise DenominatorSingular("r is on the light-cone boundary r = phi(t)")
    F1 = gauss_2f1_z_array(0.5 - mu, 0.5 - mu, 1.0, zeta, one_minus_z=w)
    F3 = gauss_2f1_z_array(-0.5 - mu, 0.5 - mu, 1.0, zeta, one_minus_z=w)
    bracket = ((H * T - H + M * T**2 - M - M * Hr2) * F1
               + (H / 2.0 + M) * (Hr2 - T**2 + 1.0) * F3)
    pref = cmath.exp(-mu * math.log(4.0) + M * t)
    return pref * np.exp((mu - 0.5) * np.log(Q)) * bracket / D


def eval_K0_alt(r: float, t: float, M, H: float) -> KernelEval:
    _, _, _, zeta, _ = _cone(r, t, 0.0, H)
    val = complex(k0_alt_values(np.array([r]), t, M, H)[0])
    return KernelEval(r=r, t=t, b=0.0, value=val, zeta=float(zeta))


def dte_values(r, t: float, b: float, M, H: float, delta=None) -> np.ndarray:
    """d/dt E(r,t;0,b;M) split into prefactor and hypergeometric derivatives,
    vectorized over r."""
    M = _mval(M)
    mu = M / H
    B, T, Q, zeta, w = _cone(r, t, b, H, delta=delta)
    F1 = gauss_2f1_z_array(0.5 - mu, 0.5 - mu, 1.0, zeta, one_minus_z=w)
    F2 = gauss_2f1_z_array(1.5 - mu, 1.5 - mu, 2.0, zeta, one_minus_z=w)
    Hr2 = (H * np.asarray(r, dtype=float)) ** 2
    clog = -mu * math.log(4.0) + M * (b + t)
    I1 = (np.exp(clog + (mu - 1.5) * np.log(Q))
          * (M * B**2 + H * B * T - M * Hr2 - M * T**2 + H * T**2) * F1)
    I2 = (np.exp(clog + (mu - 2.5) * np.log(Q))
          * ((H - 2.0 * M) ** 2 / (4.0 * H**2)) * F2
          * 4.0 * H * T * B * (B**2 - T**2 - Hr2))
    return I1 + I2


def eval_dtE(r: float, t: float, b: float, M, H: float) -> complex:
    if not b < t:
        raise DomainViolation("dtE needs b < t")
    return complex(dte_values(np.array([r]), t, b, M, H)[0])
