"""Numerical certification of the kernel-integral bounds and decay rates.

Each check integrates a |kernel| along the light cone over a parameter sweep,
fits the large-time growth exponent by log-linear regression, and compares
sup ratios against the stated right-hand-side envelope. Envelope constants
are unspecified in the estimates, so "pass" means: finite sup ratio (plateau
test), fitted exponent within tolerance of the stated one, and node-doubling
self-consistency of the quadrature.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels as kmod
from .geometry import PhysicalParams
from .kernels import CurvedMass, cone_range, phi
from .quadrature import graded_rule
from .semilinear import field_norm
from .static_wave import RadialField, RadialGrid
from .transform import (GOperator, config_for, homogeneous_ode_solution,
                        solve_linear_homogeneous, source_ode_solution)

ALL_IDS = ("L4_2", "L4_3", "L5_2", "L5_3", "P6_4", "T4_4", "T5_4",
           "TdecG_i", "TdecG_ii")

EXP_TOL_REL = 0.10         # |fitted - stated| <= 10% of |stated|
EXP_TOL_ABS = 0.05         # ... or 0.05*H when the stated exponent is ~0
PLATEAU_FACTOR = 1.05      # sup-ratio growth allowed between 0.8*t_max and t_max
R2_MIN = 0.999             # for genuinely exponential regimes
SELF_TOL = 1e-6            # node-doubling relative change


@dataclass
class BoundReport:
    id: str
    sup_ratio: float = math.nan
    fitted_exponent: float = math.nan
    stated_exponent: float = math.nan
    r2: float = math.nan
    passed: bool = False
    grid: list = field(default_factory=list)
    notes: str = ""

    def to_dict(self) -> dict:
        return {"id": self.id, "grid": self.grid, "sup_ratio": self.sup_ratio,
                "fitted_exponent": self.fitted_exponent,
                "stated_exponent": self.stated_exponent, "r2": self.r2,
                "pass": self.passed, "notes": self.notes}


def fit_exponent(ts, vals):
    """Least-squares slope and R^2 of log(vals) against t."""
    ts = np.asarray(ts, dtype=float)
    y = np.log(np.asarray(vals, dtype=float))
    A = np.vstack([ts, np.ones_like(ts)]).T
    coef, res, *_ = np.linalg.lstsq(A, y, rcond=None)
    yhat = A @ coef
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), r2


def _abs_kernel_integral(kind: str, t: float, M, H: float, a: float = 0.0,
                         p_order: int = 8, base_panels: int = 24,
                         b: float = 0.0) -> float:
    """int_0^{hi} r^a |K(r, t)| dr in u = sqrt(r) coordinates (regular at 0
    for a > -1), panels graded into the light-cone boundary layer."""
    if kind == "dtE":
        hi = float(cone_range(t, b, H))
    else:
        hi = float(phi(t, H))
    if hi <= 0.0:
        return 0.0
    BT = math.exp(-H * (t + b))
    layer_r = 2.0 * BT / (H * H * hi)
    u_hi = math.sqrt(hi)
    layer_u = layer_r / (2.0 * u_hi)
    u, wu, du = graded_rule(u_hi, layer_u, p_order, base_panels=base_panels,
                            with_delta=True)
    r = u**2
    dr_ = du * (u_hi + u)     # hi - r = (sqrt(hi) - u)(sqrt(hi) + u), exactly
    if kind == "K0":
        vals = kmod.k0_direct_values(r, t, M, H, delta=dr_)
    elif kind == "K1":
        vals = kmod.k1_values(r, t, M, H, delta=dr_)
    elif kind == "dtE":
        vals = kmod.dte_values(r, t, b, M, H, delta=dr_)
    else:
        raise ValueError(kind)
    integrand = np.abs(vals) * r**a * 2.0 * u
    return float(np.sum(wu * integrand))


def _checked_integral(kind, t, M, H, a=0.0, b=0.0, p_order=8, base_panels=24):
    v1 = _abs_kernel_integral(kind, t, M, H, a=a, b=b,
                              p_order=p_order, base_panels=base_panels)
    v2 = _abs_kernel_integral(kind, t, M, H, a=a, b=b,
                              p_order=2 * p_order, base_panels=2 * base_panels)
    rel = abs(v1 - v2) / max(abs(v2), 1e-300)
    return v2, rel


def _plateau_ok(ts, ratios):
    ts = np.asarray(ts, dtype=float)
    ratios = np.asarray(ratios, dtype=float)
    t_ref = 0.8 * ts[-1]
    ref = float(np.interp(t_ref, ts, ratios))
    return ratios[-1] <= PLATEAU_FACTOR * ref, float(np.max(ratios))


def _judge(fitted, stated, H, one_sided=False):
    if one_sided:
        return fitted <= stated + EXP_TOL_REL * abs(stated)
    tol = max(EXP_TOL_REL * abs(stated), EXP_TOL_ABS * H * (abs(stated) < 1e-12))
    if abs(stated) < 1e-12:
        tol = EXP_TOL_ABS * H
    return abs(fitted - stated) <= tol


def verify_K0_integral_large(M: float, H: float = 1.0, t_grid=None) -> BoundReport:
    """Oscillatory-regime K0 cone integral vs (1+t)^{1-sgn M} e^{-Ht/2}(e^{Ht}-1)."""
    t_grid = np.linspace(1.0, 6.0, 11) / H if t_grid is None else np.asarray(t_grid)
    Mc = CurvedMass.from_M(-1j * M, H)
    rep = BoundReport(id="L4_2", stated_exponent=0.5 * H)
    lhs, selfc = [], 0.0
    for t in t_grid:
        v, rel = _checked_integral("K0", float(t), Mc, H)
        lhs.append(v)
        selfc = max(selfc, rel)
    lhs = np.array(lhs)
    poly = (1.0 + t_grid) ** (1 - np.sign(M))
    rhs = poly * np.exp(-0.5 * H * t_grid) * np.expm1(H * t_grid)
    ratios = lhs / rhs
    fit_mask = t_grid >= 2.0 / H
    slope, r2 = fit_exponent(t_grid[fit_mask], (lhs / poly)[fit_mask])
    plateau, sup = _plateau_ok(t_grid, ratios)
    rep.sup_ratio, rep.fitted_exponent, rep.r2 = sup, slope, r2
    rep.passed = plateau and _judge(slope, rep.stated_exponent, H) \
        and r2 >= R2_MIN and selfc < SELF_TOL
    rep.grid = [{"M": M, "H": H, "t": list(map(float, t_grid)),
                 "self_consistency": selfc}]
    rep.notes = f"LHS fitted against exp after removing the (1+t)^{{1-sgn M}} factor; " \
                f"max node-doubling change {selfc:.2e}"
    return rep


def verify_K1_integral_large(M: float, H: float = 1.0, t_grid=None) -> BoundReport:
    """K1 cone integral: bounded for M > 0 (linear in t for M = 0)."""
    t_grid = np.linspace(2.0, 10.0, 9) / H if t_grid is None else np.asarray(t_grid)
    Mc = CurvedMass.from_M(-1j * M, H)
    rep = BoundReport(id="L4_3", stated_exponent=0.0)
    lhs, selfc = [], 0.0
    for t in t_grid:
        v, rel = _checked_integral("K1", float(t), Mc, H)
        lhs.append(v)
        selfc = max(selfc, rel)
    lhs = np.array(lhs)
    poly = (1.0 + t_grid) ** (1 - np.sign(M))
    rhs = poly * np.expm1(H * t_grid) / (H * (np.exp(H * t_grid) + 1.0))
    ratios = lhs / rhs
    fit_mask = t_grid >= 4.0 / H
    slope, r2 = fit_exponent(t_grid[fit_mask], (lhs / poly)[fit_mask])
    plateau, sup = _plateau_ok(t_grid, ratios)
    rep.sup_ratio, rep.fitted_exponent, rep.r2 = sup, slope, r2
    rep.passed = plateau and _judge(slope, 0.0, H) and selfc < SELF_TOL
    rep.grid = [{"M": M, "H": H, "t": list(map(float, t_grid)),
                 "self_consistency": selfc}]
    rep.notes = f"bounded LHS (exponent ~ 0); max node-doubling change {selfc:.2e}"
    return rep


def verify_K1_weighted_small(M: complex, a: float, H: float = 1.0,
                             t_grid=None) -> BoundReport:
    """Weighted K1 integral, Re M > 0: envelope e^{-aHt}(e^{Ht}-1)^{a+1}
    (e^{Ht}+1)^{Re M/H - 1}; large-t exponent Re M."""
    t_grid = np.linspace(3.0, 9.0, 7) / H if t_grid is None else np.asarray(t_grid)
    Mc = CurvedMass.from_M(M, H)
    rep = BoundReport(id="L5_2", stated_exponent=Mc.M.real)
    lhs, selfc = [], 0.0
    for t in t_grid:
        v, rel = _checked_integral("K1", float(t), Mc, H, a=a)
        lhs.append(v)
        selfc = max(selfc, rel)
    lhs = np.array(lhs)
    rhs = (np.exp(-a * H * t_grid) * np.expm1(H * t_grid) ** (a + 1.0)
           * (np.exp(H * t_grid) + 1.0) ** (Mc.M.real / H - 1.0))
    ratios = lhs / rhs
    fit_mask = t_grid >= 5.0 / H
    slope, r2 = fit_exponent(t_grid[fit_mask], lhs[fit_mask])
    plateau, sup = _plateau_ok(t_grid, ratios)
    rep.sup_ratio, rep.fitted_exponent, rep.r2 = sup, slope, r2
    rep.passed = plateau and _judge(slope, rep.stated_exponent, H) \
        and r2 >= R2_MIN and selfc < SELF_TOL
    rep.grid = [{"M": [Mc.M.real, Mc.M.imag], "a": a, "H": H,
                 "t": list(map(float, t_grid)), "self_consistency": selfc}]
    rep.notes = f"max node-doubling change {selfc:.2e}"
    return rep


def verify_K0_weighted_small(M: complex, a: float, H: float = 1.0,
                             t_grid=None) -> BoundReport:
    """Weighted K0 integral, Re M > 0. Envelope branches at Re M = H/2; the
    large-t exponent of the envelope (and of the LHS) is max(H/2, Re M).

    The source text's "in particular" display shows e^{(Re M - H)t} for the
    second branch, which contradicts its own main envelope, the critical
    closed form, and direct quadrature; both forms are recorded here and the
    main-envelope exponent is the one certified.
    """
    t_grid = np.linspace(4.0, 10.0, 7) / H if t_grid is None else np.asarray(t_grid)
    Mc = CurvedMass.from_M(M, H)
    ReM = Mc.M.real
    stated = 0.5 * H if ReM < 0.5 * H else ReM
    rep = BoundReport(id="L5_3", stated_exponent=stated)
    lhs, selfc = [], 0.0
    for t in t_grid:
        v, rel = _checked_integral("K0", float(t), Mc, H, a=a)
        lhs.append(v)
        selfc = max(selfc, rel)
    lhs = np.array(lhs)
    if ReM < 0.5 * H:
        case = (np.exp(H * t_grid) + 1.0) ** (-0.5)
    else:
        case = np.exp(ReM * t_grid) / (np.exp(H * t_grid) + 1.0)
    rhs = np.exp(-a * H * t_grid) * np.expm1(H * t_grid) ** (a + 1.0) * case
    ratios = lhs / rhs
    fit_mask = t_grid >= 6.0 / H
    slope, r2 = fit_exponent(t_grid[fit_mask], lhs[fit_mask])
    plateau, sup = _plateau_ok(t_grid, ratios)
    rep.sup_ratio, rep.fitted_exponent, rep.r2 = sup, slope, r2
    rep.passed = plateau and _judge(slope, stated, H) and r2 >= R2_MIN \
        and selfc < SELF_TOL
    rep.grid = [{"M": [ReM, Mc.M.imag], "a": a, "H": H,
                 "t": list(map(float, t_grid)), "self_consistency": selfc}]
    rep.notes = (f"main-envelope exponent max(H/2, Re M) = {stated:g}; the 'in "
                 f"particular' alternative Re M - H = {ReM - H:g} is inconsistent "
                 f"with the envelope and is not certified; doubling change {selfc:.2e}")
    return rep


def verify_dtE_integral(M: complex, H: float = 1.0, b: float = 0.3,
                        tau_grid=None) -> BoundReport:
    """Cone integral of |d_t E| vs e^{H(t-b)/2} (Re M < H/2) or
    e^{(Re M + H)(t-b)} (upper bound, Re M > H/2)."""
    tau_grid = np.linspace(0.5, 5.0, 10) / H if tau_grid is None else np.asarray(tau_grid)
    Mc = CurvedMass.from_M(M, H)
    ReM = Mc.M.real
    one_sided = ReM > 0.5 * H
    stated = (ReM + H) if one_sided else 0.5 * H
    rep = BoundReport(id="P6_4", stated_exponent=stated)
    lhs, selfc = [], 0.0
    for tau in tau_grid:
        v, rel = _checked_integral("dtE", float(b + tau), Mc, H, b=b)
        lhs.append(v)
        selfc = max(selfc, rel)
    lhs = np.array(lhs)
    rhs = np.exp(stated * tau_grid)
    ratios = lhs / rhs
    fit_mask = tau_grid >= 2.0 / H
    slope, r2 = fit_exponent(tau_grid[fit_mask], lhs[fit_mask])
    plateau, sup = _plateau_ok(tau_grid, ratios)
    rep.sup_ratio, rep.fitted_exponent, rep.r2 = sup, slope, r2
    exp_ok = _judge(slope, stated, H, one_sided=one_sided)
    rep.passed = plateau and exp_ok and selfc < SELF_TOL \
        and (one_sided or r2 >= R2_MIN)
    rep.grid = [{"M": [ReM, Mc.M.imag], "H": H, "b": b,
                 "tau": list(map(float, tau_grid)), "self_consistency": selfc}]
    rep.notes = ("upper-bound comparison" if one_sided else "two-sided rate") + \
        f"; max node-doubling change {selfc:.2e}"
    return rep


def _ode_mode_setup(H: float, n: int = 64):
    """Wide, coarse exterior grid whose midpoint stays causally clean; used
    for spatially constant (ODE-reducible) runs with boundary checks off."""
    p = PhysicalParams(H=H, c=1.0, G=1.0, M_bh=0.0, h=1.0, m_sq=0.0)
    grid = RadialGrid(r_min=5.0, r_max=5.0 + 40.0 / H, n=n)
    return p, grid


def _source_run(M: complex | CurvedMass, H: float, t_grid) -> np.ndarray:
    """|psi(mid, t)| for the unit constant source via the transform."""
    p, grid = _ode_mode_setup(H)
    Mc = M if isinstance(M, CurvedMass) else CurvedMass.from_M(M, H)
    cfg = config_for(p, Mc, check_boundary=False)
    gop = GOperator(cfg, t_grid, grid)
    vals = gop.apply(lambda b: np.ones(grid.n)).real
    return vals[:, grid.n // 2]


def verify_source_rate(regime: str, H: float = 1.0, t_grid=None) -> BoundReport:
    """Constant-source solution versus the stated convolution envelope.

    regime "large": M = -0.7i (report T4_4), envelope
    e^{-3Ht/2} int e^{3Hb/2}(1 + H(t-b))^{1-sgn M} db;
    regime "small_light" / "intermediate": T5_4 envelopes e^{-Ht} int e^{Hb} db
    and e^{(Re M-3H/2)t} int e^{-(Re M-3H/2)b} db.
    """
    t_grid = np.linspace(0.5, 8.0, 16) / H if t_grid is None else np.asarray(t_grid)
    if regime == "large":
        Mc = CurvedMass.from_M(-0.7j, H)
        rep = BoundReport(id="T4_4", stated_exponent=0.0)
        env = (2.0 / (3.0 * H)) * (1.0 - np.exp(-1.5 * H * t_grid))
    elif regime == "small_light":
        Mc = CurvedMass.from_M(0.25 * H, H)
        rep = BoundReport(id="T5_4", stated_exponent=0.0)
        env = -np.expm1(-H * t_grid) / H
    elif regime == "intermediate":
        Mc = CurvedMass.from_M(1.2 * H, H)
        rep = BoundReport(id="T5_4", stated_exponent=0.0)
        lam = Mc.M.real - 1.5 * H
        env = (np.exp(lam * t_grid) - 1.0) / lam
    else:
        raise ValueError(regime)
    lhs = np.abs(_source_run(Mc, H, t_grid))
    oracle = np.abs(source_ode_solution(t_grid, lambda b: np.ones_like(b), Mc, H))
    oracle_err = float(np.max(np.abs(lhs - oracle)) / np.max(oracle))
    ratios = lhs / env
    i0 = int(np.argmin(np.abs(t_grid - 1.0 / H)))
    C = ratios[i0]
    violation = float(np.max(ratios[i0:] / C) - 1.0)
    plateau, sup = _plateau_ok(t_grid, ratios)
    fit_mask = t_grid >= 4.0 / H
    slope, r2 = fit_exponent(t_grid[fit_mask], lhs[fit_mask])
    rep.sup_ratio, rep.fitted_exponent, rep.r2 = sup, slope, r2
    rep.passed = plateau and violation <= 0.01 and _judge(slope, 0.0, H) \
        and oracle_err < 1e-5
    rep.grid = [{"M": [Mc.M.real, Mc.M.imag], "H": H, "regime": regime,
                 "t": list(map(float, t_grid)), "envelope_violation": violation,
                 "ode_oracle_err": oracle_err}]
    rep.notes = (f"constant fitted at t = 1/H; max relative envelope violation "
                 f"{violation:.3%}; ODE-oracle agreement {oracle_err:.2e}")
    return rep


def _dense_derivative(vals: np.ndarray, dt: float) -> np.ndarray:
    """4th-order centered first derivative on the interior."""
    d = np.full_like(vals, np.nan)
    d[2:-2] = (-vals[4:] + 8 * vals[3:-1] - 8 * vals[1:-3] + vals[:-4]) / (12 * dt)
    return d


def verify_derivative_decay(regime: str, H: float = 1.0) -> BoundReport:
    """Time-derivative decay: homogeneous run fitted against the exact
    spatially constant rate Re M - 3H/2 (within the stated e^{-Ht} /
    e^{(Re M-3H/2)t} bounds), plus the d_t G source bound."""
    if regime == "small_light":
        Mc = CurvedMass.from_M(0.25 * H, H)
        rep = BoundReport(id="TdecG_i", stated_exponent=Mc.M.real - 1.5 * H)
        bound_rate = -H
        g_env_rate = 0.0      # e^{-Ht} int_0^t e^{Hb} db is bounded
    elif regime == "intermediate":
        Mc = CurvedMass.from_M(1.2 * H, H)
        rep = BoundReport(id="TdecG_ii", stated_exponent=Mc.M.real - 1.5 * H)
        bound_rate = Mc.M.real - 1.5 * H
        g_env_rate = Mc.M.real - 0.5 * H
    else:
        raise ValueError(regime)
    p, grid = _ode_mode_setup(H)
    cfg = config_for(p, Mc, check_boundary=False)
    t_grid = np.linspace(0.0, 8.0 / H, 81)
    dt = t_grid[1] - t_grid[0]
    mid = grid.n // 2
    data0 = RadialField(grid, np.ones(grid.n))
    data1 = RadialField(grid, np.zeros(grid.n))
    psi = solve_linear_homogeneous(data0, data1, t_grid, cfg)
    dpsi = _dense_derivative(psi.values[:, mid], dt)
    ok = slice(2, -2)
    fit_mask = (t_grid >= 4.0 / H) & (t_grid <= 8.0 / H)
    fm = fit_mask.copy()
    fm[:2] = fm[-2:] = False
    slope, r2 = fit_exponent(t_grid[fm], np.abs(dpsi[fm]))
    # theorem bound: |dpsi| <= C e^{bound_rate * t}, C fitted at t = 1/H
    i0 = int(np.argmin(np.abs(t_grid - 1.0 / H)))
    bound = np.exp(bound_rate * t_grid)
    Cb = np.abs(dpsi[i0]) / bound[i0]
    hom_violation = float(np.nanmax(np.abs(dpsi[ok]) / (Cb * bound[ok]))
                          ) if Cb > 0 else 0.0
    # d_t G for the unit source against its convolution envelope
    gvals = _source_run(Mc, H, t_grid)
    dG = _dense_derivative(gvals, dt)
    if g_env_rate == 0.0:
        env = -np.expm1(-H * t_grid) / H
    else:
        env = (np.exp(g_env_rate * t_grid) - 1.0) / g_env_rate
    ratios = np.abs(dG[ok]) / env[ok]
    plateau_g = ratios[-1] <= PLATEAU_FACTOR * max(np.max(ratios[:-1]), 1e-300)
    exact = homogeneous_ode_solution(t_grid, Mc, H)
    hom_err = float(np.max(np.abs(psi.values[:, mid] - exact)))
    rep.sup_ratio = float(np.max(ratios))
    rep.fitted_exponent, rep.r2 = slope, r2
    rep.passed = _judge(slope, rep.stated_exponent, H) and r2 >= R2_MIN \
        and hom_violation <= 1.15 and plateau_g and hom_err < 1e-8
    rep.grid = [{"M": [Mc.M.real, Mc.M.imag], "H": H, "regime": regime,
                 "t_max": float(t_grid[-1]), "hom_bound_violation": hom_violation,
                 "hom_oracle_err": hom_err}]
    rep.notes = (f"fitted d_t psi rate vs exact Re M - 3H/2; theorem bound rate "
                 f"{bound_rate:g} (C at t=1/H, max ratio {hom_violation:.3f}); "
                 f"d_t G envelope plateau: {plateau_g}")
    return rep


DEFAULT_SWEEP = {
    "L4_2": [{"M": 0.7}, {"M": 0.0}],
    "L4_3": [{"M": 0.7}, {"M": 0.0}],
    "L5_2": [{"M": 0.3, "a": 0.0}, {"M": 0.8, "a": 0.0},
             {"M": 0.3, "a": -0.5}, {"M": 0.8, "a": 1.0}],
    "L5_3": [{"M": 0.25, "a": 0.0}, {"M": 1.0, "a": 0.0}, {"M": 1.3, "a": 1.0}],
    "P6_4": [{"M": 0.25}, {"M": 1.2}],
    "T4_4": [{"regime": "large"}],
    "T5_4": [{"regime": "small_light"}, {"regime": "intermediate"}],
    "TdecG_i": [{"regime": "small_light"}],
    "TdecG_ii": [{"regime": "intermediate"}],
}


def _run_point(lemma_id: str, pt: dict, H: float) -> BoundReport:
    if lemma_id == "L4_2":
        return verify_K0_integral_large(pt["M"], H)
    if lemma_id == "L4_3":
        return verify_K1_integral_large(pt["M"], H)
    if lemma_id == "L5_2":
        return verify_K1_weighted_small(pt["M"], pt["a"], H)
    if lemma_id == "L5_3":
        return verify_K0_weighted_small(pt["M"], pt["a"], H)
    if lemma_id == "P6_4":
        return verify_dtE_integral(pt["M"], H)
    if lemma_id in ("T4_4", "T5_4"):
        return verify_source_rate(pt["regime"], H)
    if lemma_id == "TdecG_i" or lemma_id == "TdecG_ii":
        return verify_derivative_decay(pt["regime"], H)
    raise ValueError(f"unknown lemma id {lemma_id!r}")


def _merge(lemma_id: str, reports: list[BoundReport]) -> BoundReport:
    worst = max(reports, key=lambda r: abs(r.fitted_exponent - r.stated_exponent)
                / max(abs(r.stated_exponent), 1e-3))
    out = BoundReport(id=lemma_id, sup_ratio=max(r.sup_ratio for r in reports),
                      fitted_exponent=worst.fitted_exponent,
                      stated_exponent=worst.stated_exponent,
                      r2=min(r.r2 for r in reports),
                      passed=all(r.passed for r in reports),
                      grid=[g for r in reports for g in r.grid],
                      notes=worst.notes)
    return out


def run_all(lemma: str = "all", H: float = 1.0, threads: int = 1) -> list[BoundReport]:
    """Run the default sweep; one merged report per lemma id, in fixed order."""
    ids = ALL_IDS if lemma == "all" else (lemma,)
    tasks = [(lid, pt) for lid in ids for pt in DEFAULT_SWEEP[lid]]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(lambda a: _run_point(a[0], a[1], H), tasks))
    else:
        results = [_run_point(lid, pt, H) for lid, pt in tasks]
    merged = []
    for lid in ids:
        group = [r for (tlid, _), r in zip(tasks, results) if tlid == lid]
        merged.append(_merge(lid, group))
    return merged
