"""Command-line front end: reproducible experiment drivers around the library.

Subcommands: hyp2f1, kernels sample, geodesic, solve-static, solve-linear,
solve-semilinear, verify, decay-fit. Configs are versioned JSON with unknown
keys rejected; every artifact gets a sibling manifest naming the config hash
that produced it. KGDS_THREADS caps the verify worker pool.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .geometry import PhysicalParams, geodesic_radius, influence_radius
from .hyp2f1 import gauss_2f1
from .kernels import CurvedMass, curved_mass, eval_E, eval_K0_direct, eval_K1
from .semilinear import Nonlinearity, Potential, picard_iterate, weighted_norm
from .static_wave import RadialField, RadialGrid, bump_profile, evolve
from .transform import config_for, solve_linear_homogeneous
from .verify import fit_exponent, run_all


class ConfigInvalid(ValueError):
    pass


def _load_config(path: str, allowed: set) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = f.read()
    except OSError as e:
        raise ConfigInvalid(f"cannot read config {path}: {e}") from e
    try:
        cfg = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ConfigInvalid(f"config {path} is not valid JSON: {e}") from e
    if not isinstance(cfg, dict):
        raise ConfigInvalid(f"config {path}: top level must be an object")
    if cfg.get("schema_version") != 1:
        raise ConfigInvalid(f"config {path}: schema_version must be 1")
    unknown = set(cfg) - allowed - {"schema_version"}
    if unknown:
        raise ConfigInvalid(f"config {path}: unknown keys {sorted(unknown)}")
    cfg["_sha256"] = hashlib.sha256(raw.encode()).hexdigest()
    return cfg


def _params_from(cfg: dict) -> PhysicalParams:
    d = cfg.get("params", {})
    bad = set(d) - {"H", "c", "G", "M_bh", "h", "m_sq"}
    if bad:
        raise ConfigInvalid(f"params: unknown keys {sorted(bad)}")
    return PhysicalParams(**d)


def _mass_from(cfg: dict, p: PhysicalParams) -> CurvedMass:
    if "M" in cfg:
        m = cfg["M"]
        M = complex(m[0], m[1]) if isinstance(m, (list, tuple)) else complex(m)
        return CurvedMass.from_M(M, p.H)
    return curved_mass(p)


def _grid_from(cfg: dict) -> RadialGrid:
    g = cfg.get("grid")
    if not g:
        raise ConfigInvalid("config needs a 'grid' section {r_min, r_max, n}")
    bad = set(g) - {"r_min", "r_max", "n"}
    if bad:
        raise ConfigInvalid(f"grid: unknown keys {sorted(bad)}")
    return RadialGrid(r_min=float(g["r_min"]), r_max=float(g["r_max"]), n=int(g["n"]))


def _data_from(cfg: dict, grid: RadialGrid) -> tuple[np.ndarray, np.ndarray]:
    d = cfg.get("data", {"kind": "constant", "amplitude": 1.0})
    kind = d.get("kind", "bump")
    if kind == "bump":
        f = bump_profile(float(d["center"]), float(d["width"]),
                         float(d.get("amplitude", 1.0)))
        v0 = f(grid.r)
    elif kind == "constant":
        v0 = np.full(grid.n, float(d.get("amplitude", 1.0)))
    else:
        raise ConfigInvalid(f"data: unknown kind {kind!r}")
    v1 = np.zeros(grid.n)
    if "velocity_amplitude" in d:
        v1 = np.full(grid.n, float(d["velocity_amplitude"])) if kind == "constant" \
            else float(d["velocity_amplitude"]) / max(np.max(np.abs(v0)), 1e-300) * v0
    return v0, v1


def _fmt(x) -> str:
    return repr(float(x))


def _write_csv(path: str, header: list, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) if isinstance(x, (int, float, np.floating)) else x
                        for x in row])


def _write_manifest(out_path: str, cfg_hash: str, t0: float, argv: list) -> None:
    manifest = {
        "config_sha256": cfg_hash,
        "kgds_version": __version__,
        "wall_time_s": round(time.time() - t0, 3),
        "command": argv,
    }
    with open(out_path + ".manifest.json", "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")


def cmd_hyp2f1(args) -> int:
    v = gauss_2f1(complex(args.a_re, args.a_im), complex(args.b_re, args.b_im),
                  args.c, args.z, tol=args.tol)
    print(f"{v.real!r} {v.imag!r}")
    return 0


def cmd_kernels_sample(args) -> int:
    t0 = time.time()
    cfg = _load_config(args.config, {"params", "M", "r", "t", "b"})
    p = _params_from(cfg)
    M = _mass_from(cfg, p)
    b = float(cfg.get("b", 0.0))
    rows = []
    for t in cfg["t"]:
        for r in cfg["r"]:
            e = eval_E(r, t, b, M, p.H)
            k0 = eval_K0_direct(r, t, M, p.H)
            k1 = eval_K1(r, t, M, p.H)
            rows.append([r, t, b, M.M.real, M.M.imag, e.value.real, e.value.imag,
                         k0.value.real, k0.value.imag, k1.value.real,
                         k1.value.imag, e.zeta])
    _write_csv(args.out, ["r", "t", "b", "M_re", "M_im", "E_re", "E_im",
                          "K0_re", "K0_im", "K1_re", "K1_im", "zeta"], rows)
    _write_manifest(args.out, cfg["_sha256"], t0, sys.argv[1:])
    return 0


def cmd_geodesic(args) -> int:
    t0 = time.time()
    p = PhysicalParams(H=args.H, c=args.c, G=args.G, M_bh=args.M_bh)
    ts = np.linspace(0.0, args.t_max, args.n)
    rows = [[t, geodesic_radius(float(t), args.R_ID, p),
             influence_radius(float(t), args.R_ID, p)] for t in ts]
    _write_csv(args.out, ["t", "r", "influence_radius"], rows)
    _write_manifest(args.out, hashlib.sha256(
        json.dumps(vars(args), sort_keys=True, default=str).encode()).hexdigest(),
        t0, sys.argv[1:])
    return 0


def cmd_solve_static(args) -> int:
    t0 = time.time()
    cfg = _load_config(args.config, {"params", "grid", "data", "T", "cfl", "t_out"})
    p = _params_from(cfg)
    grid = _grid_from(cfg)
    v0, v1 = _data_from(cfg, grid)
    T = float(cfg["T"])
    series = evolve(v0, grid, T, float(cfg.get("cfl", 0.5)), p, velocity=v1)
    rows = []
    for t in cfg.get("t_out", [T]):
        snap = series.at(float(t))
        dt = series.times[1] - series.times[0]
        snap_t = (series.at(min(float(t) + dt, T)) - series.at(max(float(t) - dt, 0.0))) \
            / (2 * dt)
        for r, v, vt in zip(grid.r, snap, snap_t):
            rows.append([t, r, v, vt])
    _write_csv(args.out, ["t", "r", "v", "v_t"], rows)
    _write_manifest(args.out, cfg["_sha256"], t0, sys.argv[1:])
    return 0


def cmd_solve_linear(args) -> int:
    t0 = time.time()
    cfg = _load_config(args.config, {"params", "grid", "M", "data", "t_out",
                                     "n_b", "n_r", "strict_support"})
    p = _params_from(cfg)
    grid = _grid_from(cfg)
    v0, v1 = _data_from(cfg, grid)
    M = _mass_from(cfg, p)
    tcfg = config_for(p, M, n_b=int(cfg.get("n_b", 32)), n_r=int(cfg.get("n_r", 32)),
                      strict_support=bool(cfg.get("strict_support", False)),
                      check_boundary=bool(cfg.get("strict_support", False)))
    t_out = np.asarray(cfg["t_out"], dtype=float)
    psi = solve_linear_homogeneous(RadialField(grid, v0), RadialField(grid, v1),
                                   t_out, tcfg)
    dpsi = np.gradient(psi.values, t_out, axis=0) if t_out.size > 1 \
        else np.zeros_like(psi.values)
    rows = []
    for i, t in enumerate(t_out):
        for j, r in enumerate(grid.r):
            rows.append([t, r, psi.values[i, j], dpsi[i, j]])
    _write_csv(args.out, ["t", "r", "psi", "dpsi_dt"], rows)
    _write_manifest(args.out, cfg["_sha256"], t0, sys.argv[1:])
    return 0


def cmd_solve_semilinear(args) -> int:
    t0 = time.time()
    cfg = _load_config(args.config, {"params", "grid", "M", "data", "nl",
                                     "potential", "gamma", "t_max", "max_iter",
                                     "tol", "n_t", "n_b", "n_r"})
    p = _params_from(cfg)
    grid = _grid_from(cfg)
    v0, v1 = _data_from(cfg, grid)
    M = _mass_from(cfg, p)
    nl_cfg = cfg.get("nl", {"kind": "power_signed", "alpha": 1.0})
    nl = Nonlinearity(kind=nl_cfg.get("kind", "power_signed"),
                      alpha=float(nl_cfg.get("alpha", 1.0)))
    pot_cfg = cfg.get("potential", {"kind": "none"})
    V = Potential(kind=pot_cfg.get("kind", "none"),
                  g=float(pot_cfg.get("g", 0.0)),
                  kappa=float(pot_cfg.get("kappa", 0.0)),
                  m_H=float(pot_cfg.get("m_H", 0.0)))
    tcfg = config_for(p, M, n_b=int(cfg.get("n_b", 32)), n_r=int(cfg.get("n_r", 32)),
                      check_boundary=False)
    gamma = float(cfg["gamma"])
    psi, diag = picard_iterate(RadialField(grid, v0), RadialField(grid, v1), nl, V,
                               gamma=gamma, t_max=float(cfg.get("t_max", 8.0 / p.H)),
                               max_iter=int(cfg.get("max_iter", 25)),
                               tol=float(cfg.get("tol", 1e-10)),
                               cfg=tcfg, n_t=int(cfg.get("n_t", 33)))
    rows = []
    for i, t in enumerate(psi.times):
        from .semilinear import field_norm
        rows.append([t, np.exp(gamma * t) * field_norm(psi.values[i], grid, "h2"),
                     diag.q[i] if i < len(diag.q) else ""])
    _write_csv(args.out, ["t", "weighted_norm", "q_n"], rows)
    if args.diagnostics:
        with open(args.diagnostics, "w", encoding="utf-8") as f:
            json.dump({"diffs": diag.diffs, "q": diag.q, "converged": diag.converged,
                       "n_iter": diag.n_iter, "eps_data": diag.eps_data,
                       "final_weighted_norm": diag.final_weighted_norm,
                       "ball_ok": diag.ball_ok, "support_min": diag.support_min},
                      f, indent=2, sort_keys=True)
            f.write("\n")
    _write_manifest(args.out, cfg["_sha256"], t0, sys.argv[1:])
    return 0


def cmd_verify(args) -> int:
    t0 = time.time()
    threads = int(os.environ.get("KGDS_THREADS", "1"))
    reports = run_all(lemma=args.lemma, threads=threads)
    payload = {"schema_version": 1, "seed": args.seed,
               "reports": [r.to_dict() for r in reports]}
    with open(args.out, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    _write_manifest(args.out, hashlib.sha256(
        json.dumps({"lemma": args.lemma, "seed": args.seed}).encode()).hexdigest(),
        t0, sys.argv[1:])
    for r in reports:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.id}: fitted={r.fitted_exponent:+.4f} "
              f"stated={r.stated_exponent:+.4f} sup_ratio={r.sup_ratio:.3g}")
    return 0 if all(r.passed for r in reports) else 1


def cmd_decay_fit(args) -> int:
    t0 = time.time()
    data = {}
    with open(args.infile, "r", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        for row in reader:
            t = float(row["t"])
            v = float(row[args.column])
            data.setdefault(t, []).append(v)
    ts = np.array(sorted(data))
    norm = np.array([np.sqrt(np.mean(np.square(data[t]))) for t in ts])
    mask = (ts >= args.t_min) & (ts <= args.t_max) & (norm > 0)
    if mask.sum() < 3:
        raise ConfigInvalid("decay-fit needs at least 3 usable time samples")
    slope, r2 = fit_exponent(ts[mask], norm[mask])
    out = {"slope": slope, "r2": r2, "n_points": int(mask.sum()),
           "t_min": float(ts[mask][0]), "t_max": float(ts[mask][-1]),
           "column": args.column}
    with open(args.out, "w", encoding="utf-8") as f:
        json.dump(out, f, indent=2, sort_keys=True)
        f.write("\n")
    _write_manifest(args.out, hashlib.sha256(
        json.dumps(vars(args), sort_keys=True, default=str).encode()).hexdigest(),
        t0, sys.argv[1:])
    print(f"slope={slope:+.5f} r2={r2:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kgds", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    h = sub.add_parser("hyp2f1", help="evaluate 2F1 at a single point")
    h.add_argument("--a-re", type=float, required=True)
    h.add_argument("--a-im", type=float, default=0.0)
    h.add_argument("--b-re", type=float, required=True)
    h.add_argument("--b-im", type=float, default=0.0)
    h.add_argument("--c", type=float, required=True)
    h.add_argument("--z", type=float, required=True)
    h.add_argument("--tol", type=float, default=1e-13)
    h.set_defaults(fn=cmd_hyp2f1)

    k = sub.add_parser("kernels", help="kernel utilities")
    ksub = k.add_subparsers(dest="kernels_cmd", required=True)
    ks = ksub.add_parser("sample", help="sample E/K0/K1 on a grid to CSV")
    ks.add_argument("--config", required=True)
    ks.add_argument("--out", required=True)
    ks.set_defaults(fn=cmd_kernels_sample)

    g = sub.add_parser("geodesic", help="ingoing null geodesic and influence radius")
    g.add_argument("--R-ID", dest="R_ID", type=float, required=True)
    g.add_argument("--t-max", dest="t_max", type=float, default=10.0)
    g.add_argument("--n", type=int, default=101)
    g.add_argument("--H", type=float, default=1.0)
    g.add_argument("--c", type=float, default=1.0)
    g.add_argument("--G", type=float, default=1.0)
    g.add_argument("--M-bh", dest="M_bh", type=float, default=0.0)
    g.add_argument("--out", required=True)
    g.set_defaults(fn=cmd_geodesic)

    ss = sub.add_parser("solve-static", help="static exterior wave solve to CSV")
    ss.add_argument("--config", required=True)
    ss.add_argument("--out", required=True)
    ss.set_defaults(fn=cmd_solve_static)

    sl = sub.add_parser("solve-linear", help="linear de Sitter solve to CSV")
    sl.add_argument("--config", required=True)
    sl.add_argument("--out", required=True)
    sl.set_defaults(fn=cmd_solve_linear)

    sm = sub.add_parser("solve-semilinear", help="Picard fixed point to CSV")
    sm.add_argument("--config", required=True)
    sm.add_argument("--out", required=True)
    sm.add_argument("--diagnostics", default=None)
    sm.set_defaults(fn=cmd_solve_semilinear)

    v = sub.add_parser("verify", help="run the bound-certification harness")
    v.add_argument("--lemma", default="all")
    v.add_argument("--out", default="report.json")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(fn=cmd_verify)

    d = sub.add_parser("decay-fit", help="fit a decay exponent from a solve CSV")
    d.add_argument("--in", dest="infile", required=True)
    d.add_argument("--out", required=True)
    d.add_argument("--column", default="psi")
    d.add_argument("--t-min", dest="t_min", type=float, default=0.0)
    d.add_argument("--t-max", dest="t_max", type=float, default=np.inf)
    d.set_defaults(fn=cmd_decay_fit)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigInvalid as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
