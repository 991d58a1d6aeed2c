"""Fixed-point machinery for the semilinear Klein-Gordon equation

    psi_tt + 3H psi_t - e^{-2Ht} A psi + (m^2c^4/h^2) psi + V psi = c^2 F(r) Psi(psi),

recast as the integral equation psi = psi_id + G[-V psi + c^2 F Psi(psi)].
Plain Picard iteration in the exponentially weighted sup norm, with
contraction diagnostics, plus a lifespan probe for the supercritical regime
where only finite-time control exists.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import PhysicalParams, lapse_F
from .static_wave import RadialField, RadialGrid, radial_derivative, support_bounds
from .transform import (GOperator, SpaceTimeField, TransformConfig, _realize,
                        solve_linear_homogeneous)

NORM_KINDS = ("l2", "h1", "h2")


class NoContraction(RuntimeError):
    """Picard contraction factors stayed >= 1; data too large or gamma off-regime."""


class HorizonExceeded(RuntimeError):
    """Weighted norm never reached the probe threshold inside the time cap."""


@dataclass(frozen=True)
class Nonlinearity:
    """Self-interaction Psi(psi): |psi|^{1+alpha}, psi |psi|^alpha, or custom."""

    kind: str = "power_signed"
    alpha: float = 1.0
    fn: object = None

    def __call__(self, v: np.ndarray) -> np.ndarray:
        if self.kind == "power_abs":
            return np.abs(v) ** (1.0 + self.alpha)
        if self.kind == "power_signed":
            return v * np.abs(v) ** self.alpha
        if self.kind == "custom":
            return self.fn(v)
        raise ValueError(f"unknown nonlinearity kind {self.kind!r}")


@dataclass(frozen=True)
class Potential:
    """Built-in potentials; ``values(r, t, p)`` returns the multiplier array.

    gravitational   -(m^2 c^2/h^2) * 2 G M_bh / r  (the Newtonian tail)
    yukawa          -g^2 e^{-kappa r} / r
    exp_decaying    -(m_H^2 c^4/h^2) e^{-2Ht}
    """

    kind: str = "none"
    g: float = 0.0
    kappa: float = 0.0
    m_H: float = 0.0
    fn: object = None

    def values(self, r, t: float, p: PhysicalParams):
        r = np.asarray(r, dtype=float)
        if self.kind == "none":
            return np.zeros_like(r)
        if self.kind == "gravitational":
            return -p.field_mass_sq * p.r_sch / r
        if self.kind == "yukawa":
            return -self.g**2 * np.exp(-self.kappa * r) / r
        if self.kind == "exp_decaying":
            return -(self.m_H**2 * p.c**4 / p.h**2) * math.exp(-2.0 * p.H * t) * np.ones_like(r)
        if self.kind == "custom":
            return self.fn(r, t)
        raise ValueError(f"unknown potential kind {self.kind!r}")

    @property
    def is_time_dependent(self) -> bool:
        return self.kind in ("exp_decaying", "custom")


def potential_eps0(V: Potential, grid: RadialGrid, p: PhysicalParams,
                   r_min: float | None = None) -> float:
    """Empirical multiplication-operator bound: max |V| on the exterior grid
    (restricted to r >= r_min, e.g. the initial-data radius), at t = 0 where
    the built-in time dependences peak."""
    r = grid.r
    if r_min is not None:
        r = r[r >= r_min]
    return float(np.max(np.abs(V.values(r, 0.0, p))))


def field_norm(values, grid: RadialGrid, kind: str = "h2") -> float:
    """Discrete radial norms with the r^2 dr measure: l2, h1 (adds first
    derivative), h2 (adds second; the stand-in for the Sobolev algebra)."""
    v = np.real(np.asarray(values, dtype=complex))
    r = grid.r
    total = np.trapezoid(v**2 * r**2, dx=grid.dr)
    if kind in ("h1", "h2"):
        d1 = radial_derivative(v, grid)
        total += np.trapezoid(d1**2 * r**2, dx=grid.dr)
        if kind == "h2":
            d2 = radial_derivative(d1, grid)
            total += np.trapezoid(d2**2 * r**2, dx=grid.dr)
    elif kind != "l2":
        raise ValueError(f"unknown norm kind {kind!r}")
    return float(math.sqrt(4.0 * math.pi * total))


def weighted_norm(psi: SpaceTimeField, gamma: float, kind: str = "h2") -> float:
    """sup_t e^{gamma t} ||psi(., t)|| over the stored snapshots."""
    return float(max(math.exp(gamma * t) * field_norm(psi.values[i], psi.grid, kind)
                     for i, t in enumerate(psi.times)))


def psi_id(psi0: RadialField, psi1: RadialField, t_out, cfg: TransformConfig) -> SpaceTimeField:
    """The free (linear, homogeneous) solution seeding the fixed point."""
    return solve_linear_homogeneous(psi0, psi1, t_out, cfg)


@dataclass
class PicardDiagnostics:
    diffs: list = field(default_factory=list)
    q: list = field(default_factory=list)
    converged: bool = False
    n_iter: int = 0
    eps_data: float = 0.0
    final_weighted_norm: float = 0.0
    ball_ok: bool = False
    support_min: float = math.inf


def _source_factory(Phi: SpaceTimeField, nl: Nonlinearity, V: Potential | None,
                    cfg: TransformConfig):
    p = cfg.params
    r = Phi.grid.r
    Ffac = p.c**2 * lapse_F(r, p)

    def source(b: float) -> np.ndarray:
        vb = np.real(Phi.interp(b))
        out = Ffac * nl(vb)
        if V is not None and V.kind != "none":
            out = out - V.values(r, b, p) * vb
        return out

    return source


def picard_iterate(psi0: RadialField, psi1: RadialField, nl: Nonlinearity,
                   V: Potential | None, gamma: float, t_max: float,
                   max_iter: int = 25, tol: float = 1e-10,
                   cfg: TransformConfig | None = None, n_t: int = 33,
                   norm_kind: str = "h2"):
    """Iterate Phi <- psi_id + G[-V Phi + c^2 F Psi(Phi)] to the fixed point.

    Returns (SpaceTimeField, PicardDiagnostics); raises NoContraction after
    three consecutive non-contracting steps.
    """
    p = cfg.params
    grid = psi0.grid
    t_grid = np.linspace(0.0, t_max, n_t)
    free = psi_id(psi0, psi1, t_grid, cfg)
    sb0 = support_bounds(psi0.values, grid)
    sb1 = support_bounds(psi1.values, grid)
    R_ID = min(s[0] for s in (sb0, sb1) if s is not None) if (sb0 or sb1) else None
    gop = GOperator(cfg, t_grid, grid, R_ID=R_ID)

    diag = PicardDiagnostics()
    diag.eps_data = field_norm(psi0.values, grid, norm_kind) + \
        field_norm(psi1.values, grid, norm_kind)
    Phi = free
    bad = 0
    for it in range(max_iter):
        src = _source_factory(Phi, nl, V, cfg)
        gvals = _realize(gop.apply(src), cfg)
        nxt = SpaceTimeField(t_grid, free.values + gvals, grid)
        d = weighted_norm(SpaceTimeField(t_grid, nxt.values - Phi.values, grid),
                          gamma, norm_kind)
        diag.diffs.append(d)
        if len(diag.diffs) > 1 and diag.diffs[-2] > 0.0:
            qn = d / diag.diffs[-2]
            diag.q.append(qn)
            bad = bad + 1 if qn >= 1.0 else 0
            if bad >= 3:
                raise NoContraction(
                    f"q_n >= 1 for 3 consecutive iterations (last {qn:.3g})")
        Phi = nxt
        diag.n_iter = it + 1
        if d < tol:
            diag.converged = True
            break
    diag.final_weighted_norm = weighted_norm(Phi, gamma, norm_kind)
    diag.ball_ok = diag.final_weighted_norm < 2.0 * diag.eps_data
    mins = [support_bounds(Phi.values[i], grid) for i in range(t_grid.size)]
    diag.support_min = min((s[0] for s in mins if s is not None), default=math.inf)
    return Phi, diag


def lifespan_probe(psi0: RadialField, psi1: RadialField, nl: Nonlinearity,
                   gamma: float, eps: float, cfg: TransformConfig,
                   V: Potential | None = None, t_cap: float | None = None,
                   dt_grid: float | None = None, window: float | None = None,
                   norm_kind: str = "l2", tol: float = 1e-9) -> float:
    """First time the weighted norm reaches 2*eps in the supercritical regime.

    Marches the Volterra structure of the integral equation window by window
    (global Picard need not contract near the threshold, where the solution
    sits at the nonlinear-instability scale). The threshold crossing is
    interpolated between grid times; HorizonExceeded if the cap is reached.
    """
    p = cfg.params
    H = p.H
    ReM = cfg.M.M.real
    if ReM <= 1.5 * H:
        raise ValueError("lifespan probe is for the supercritical regime Re M > 3H/2")
    if not gamma < (1.5 * H - ReM) / (1.0 + nl.alpha):
        raise ValueError("gamma must satisfy gamma < (3H/2 - Re M)/(1 + alpha) < 0")
    grid = psi0.grid
    t_cap = 150.0 / H if t_cap is None else t_cap
    dt_grid = 0.4 / H if dt_grid is None else dt_grid
    window = 2.0 / H if window is None else window
    lam = ReM - 1.5 * H
    # generous horizon guess from the linear growth plus nonlinear takeover
    horizon = min(t_cap, max(4.0 / H, 2.5 * math.log(1.0 / max(eps, 1e-300)) / lam))
    while True:
        n_t = int(np.ceil(horizon / dt_grid)) + 1
        t_grid = np.linspace(0.0, horizon, n_t)
        free = psi_id(psi0, psi1, t_grid, cfg)
        gop = GOperator(cfg, t_grid, grid, R_ID=None)
        vals = free.values.copy()
        wn = np.array([math.exp(gamma * t) * field_norm(vals[i], grid, norm_kind)
                       for i, t in enumerate(t_grid)])
        per_win = max(2, int(round(window / dt_grid)))
        crossing = None
        for w_start in range(1, n_t, per_win):
            rows = list(range(w_start, min(w_start + per_win, n_t)))
            prev = vals[rows].copy()
            for _ in range(12):
                Phi = SpaceTimeField(t_grid, vals, grid)
                src = _source_factory(Phi, nl, V, cfg)
                gv = _realize(gop.apply(src, rows=rows), cfg)[rows]
                vals[rows] = free.values[rows] + gv
                d = np.max(np.abs(vals[rows] - prev))
                prev = vals[rows].copy()
                if d < tol * max(np.max(np.abs(vals[rows])), 1e-300):
                    break
            else:
                raise NoContraction("window iteration stalled; shrink the window")
            for i in rows:
                wn[i] = math.exp(gamma * t_grid[i]) * field_norm(vals[i], grid, norm_kind)
            hit = [i for i in rows if wn[i] >= 2.0 * eps]
            if hit:
                i = hit[0]
                w0, w1 = wn[i - 1], wn[i]
                frac = (2.0 * eps - w0) / (w1 - w0) if w1 > w0 else 1.0
                crossing = t_grid[i - 1] + frac * dt_grid
                break
        if crossing is not None:
            return float(crossing)
        if horizon >= t_cap:
            raise HorizonExceeded(f"no crossing of 2*eps below t = {t_cap:g}")
        horizon = min(t_cap, 1.5 * horizon)
