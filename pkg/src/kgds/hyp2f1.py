"""Gauss hypergeometric function 2F1(a, b; c; z) for complex parameters and
real argument z in [0, 1).

The de Sitter wave kernels need parameter families like (1/2-mu, 1/2-mu; 1)
and (3/2-mu, 3/2-mu; 2) with mu = M/H complex, evaluated all the way into the
z -> 1 light-cone regime, so neither scipy (real parameters only) nor a bare
power series (no convergence margin near 1) is enough.

Evaluation strategy:
  * z <= 0.5: the defining power series (geometric tail, ratio <= 1/2);
  * z > 0.5: the 1-z linear transformation. When c - a - b is within 1e-8 of
    an integer m this degenerates and the logarithmic expansions are used
    (A&S 15.3.10 for m = 0, 15.3.11 for m >= 1, Euler's transformation to
    reduce m < 0 to m > 0).

Near-boundary accuracy depends on knowing 1 - z exactly; callers that compute
z = N/Q from quantities with known difference should pass ``one_minus_z``
(e.g. the kernels pass 4*e^{-Hb}e^{-Ht}/Q, exact to rounding) instead of
letting this module form 1 - z by subtraction.

The independent oracle ``gauss_2f1_dd`` sums the defining series in in-repo
double-double arithmetic (~32 digits); it is deliberately transformation-free
so it can cross-check every branch above.

References: Abramowitz & Stegun ch. 15; DLMF ch. 15; Pearson, Olver & Porter,
"Numerical methods for the computation of the confluent and Gauss
hypergeometric functions" (2017).
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import digamma, gamma

from ._dd import CDD, DD

Z_SWITCH = 0.5
INTEGER_TOL = 1e-8
MAX_TERMS = 10_000


class NonConvergence(RuntimeError):
    """Series or transformation failed to reach the requested tolerance."""


class InvalidParams(ValueError):
    """Parameter combination outside the supported domain."""


def _nonpos_int(x: complex, tol: float = 1e-12):
    """Return n >= 0 with x == -n, or None."""
    if abs(x.imag) > tol:
        return None
    n = round(x.real)
    if n <= 0 and abs(x.real - n) < tol:
        return -n
    return None


def _series(a, b, c, z, tol, max_terms=MAX_TERMS, nmax=None):
    term = 1.0 + 0j
    total = term
    stop = max_terms if nmax is None else nmax
    small = 0
    for n in range(stop):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        total += term
        if abs(term) <= tol * max(abs(total), 1e-300):
            small += 1
            if small >= 2:
                return total
        else:
            small = 0
    if nmax is not None:
        return total
    raise NonConvergence(f"2F1 series: {max_terms} terms at z={z}")


def _log_case_m0(a, b, c, w, tol):
    # c = a + b: A&S 15.3.10, expansion in w = 1 - z
    lw = math.log(w)
    pref = gamma(c) / (gamma(a) * gamma(b))
    total = 0j
    coeff = 1.0 + 0j
    small = 0
    for n in range(MAX_TERMS):
        term = coeff * (2.0 * digamma(n + 1.0) - digamma(a + n) - digamma(b + n) - lw)
        total += term
        if abs(term) <= tol * max(abs(total), 1e-300):
            small += 1
            if small >= 2:
                return pref * total
        else:
            small = 0
        coeff *= (a + n) * (b + n) / (n + 1.0) ** 2 * w
    raise NonConvergence("logarithmic 2F1 series (m=0) did not converge")


def _log_case(a, b, c, w, m, tol):
    # c = a + b + m, m >= 1: A&S 15.3.11, expansion in w = 1 - z
    finite = 0j
    coeff = 1.0 + 0j
    for n in range(m):
        finite += coeff
        if n < m - 1:
            coeff *= (a + n) * (b + n) / ((n + 1.0) * (1.0 - m + n)) * w
    t1 = gamma(m) * gamma(c) / (gamma(a + m) * gamma(b + m)) * finite

    lw = math.log(w)
    coeff = w**m / math.factorial(m)
    total = 0j
    small = 0
    for n in range(MAX_TERMS):
        term = coeff * (lw - digamma(n + 1.0) - digamma(n + m + 1.0)
                        + digamma(a + m + n) + digamma(b + m + n))
        total += term
        if abs(term) <= tol * max(abs(total), 1e-300):
            break
        coeff *= (a + m + n) * (b + m + n) / ((n + 1.0) * (n + m + 1.0)) * w
    else:
        raise NonConvergence("logarithmic 2F1 series did not converge")
    t2 = -((-1.0) ** m) * gamma(c) / (gamma(a) * gamma(b)) * total
    return t1 + t2


def _one_minus_z(a, b, c, z, w, tol):
    s = c - a - b
    m = round(s.real)
    if abs(s.imag) < INTEGER_TOL and abs(s.real - m) < INTEGER_TOL:
        if m >= 0:
            return _log_case_m0(a, b, c, w, tol) if m == 0 else _log_case(a, b, c, w, m, tol)
        # Euler transformation sends (a, b) -> (c-a, c-b) and s -> -s
        return w**s * _log_case(c - a, c - b, c, w, -m, tol)
    g1 = gamma(c) * gamma(s) / (gamma(c - a) * gamma(c - b))
    g2 = gamma(c) * gamma(-s) / (gamma(a) * gamma(b))
    return (g1 * _series(a, b, a + b - c + 1.0, w, tol)
            + g2 * w**s * _series(c - a, c - b, s + 1.0, w, tol))


def gauss_2f1(a, b, c, z: float, tol: float = 1e-13, one_minus_z=None) -> complex:
    """Evaluate 2F1(a, b; c; z) for complex a, b, c and real z in [0, 1).

    ``one_minus_z`` optionally supplies 1 - z computed without cancellation;
    required for full accuracy when z is within a few ulp-decades of 1.
    """
    a = complex(a)
    b = complex(b)
    c = complex(c)
    if _nonpos_int(c) is not None:
        raise InvalidParams(f"c={c} is a non-positive integer")
    if not (one_minus_z is not None and one_minus_z > 0.0) and not 0.0 <= z < 1.0:
        raise InvalidParams(f"z={z} outside [0,1)")
    if z == 0.0:
        return 1.0 + 0j
    na = _nonpos_int(a)
    nb = _nonpos_int(b)
    if na is not None or nb is not None:
        n = min(x for x in (na, nb) if x is not None)
        return _series(a, b, c, z, 0.0, nmax=n + 2)
    if z <= Z_SWITCH:
        return _series(a, b, c, z, tol)
    w = float(one_minus_z) if one_minus_z is not None else 1.0 - z
    return _one_minus_z(a, b, c, z, w, tol)


def gauss_2f1_z_array(a, b, c, z, one_minus_z=None, tol: float = 1e-13) -> np.ndarray:
    """Vectorized 2F1 over an array of z values at fixed (a, b, c).

    The kernel quadratures evaluate one parameter family at thousands of
    light-cone arguments; this runs the series branch as whole-array
    recurrences and falls back to the scalar path above 0.5.
    """
    z = np.asarray(z, dtype=float)
    w = np.asarray(one_minus_z, dtype=float) if one_minus_z is not None else 1.0 - z
    out = np.empty(z.shape, dtype=complex)
    lo = z <= Z_SWITCH
    if np.any(lo):
        zl = z[lo]
        term = np.ones(zl.shape, dtype=complex)
        total = term.copy()
        a_, b_, c_ = complex(a), complex(b), complex(c)
        na, nb = _nonpos_int(a_), _nonpos_int(b_)
        cap = MAX_TERMS if na is None and nb is None else min(
            x for x in (na, nb) if x is not None) + 2
        for n in range(cap):
            term = term * ((a_ + n) * (b_ + n) / ((c_ + n) * (n + 1.0))) * zl
            total += term
            if np.all(np.abs(term) <= tol * np.maximum(np.abs(total), 1e-300)):
                break
        else:
            if cap == MAX_TERMS:
                raise NonConvergence("vectorized 2F1 series did not converge")
        out[lo] = total
    hi = ~lo
    for idx in np.nonzero(hi)[0]:
        out[idx] = gauss_2f1(a, b, c, float(z[idx]), tol=tol, one_minus_z=float(w[idx]))
    return out


def gauss_2f1_dd(a, b, c, z: float, max_terms: int = 200_000) -> complex:
    """Oracle: the defining series summed in double-double arithmetic.

    Valid for any parameters on real z in [0, 1); the tail is geometric with
    ratio z, so convergence slows but never fails as z -> 1 (term count grows
    like log(eps)/log(z)). Kept transformation-free on purpose: it shares no
    code path or identity with gauss_2f1's z > 0.5 branches.
    """
    a = complex(a)
    b = complex(b)
    c = complex(c)
    if _nonpos_int(c) is not None:
        raise InvalidParams(f"c={c} is a non-positive integer")
    if not 0.0 <= z < 1.0:
        raise InvalidParams(f"z={z} outside [0,1)")
    zdd = CDD(DD(z), DD(0.0))
    term = CDD(DD(1.0), DD(0.0))
    total = CDD(DD(1.0), DD(0.0))
    tol2 = 1e-64  # squared magnitude cutoff ~ (1e-32)^2
    for n in range(max_terms):
        num = CDD(a + n) * CDD(b + n)
        den = CDD(c + n) * CDD(complex(n + 1.0))
        term = term * num / den * zdd
        total = total + term
        if term.abs2() <= tol2 * max(total.abs2(), 1e-300):
            return total.to_complex()
    raise NonConvergence(f"dd oracle: {max_terms} terms at z={z}")
