"""Composite Gauss-Legendre rules for the kernel integrals.

The light-cone integrands carry a boundary layer of width ~ e^{-Ht} at the
upper endpoint (the hypergeometric argument sweeps its whole range there), so
a plain n-point rule stalls at a few percent for Ht >~ 8. Panels are halved
geometrically toward the endpoint until they resolve the layer scale; each
panel gets a fixed-order rule. Error is then geometric in the per-panel order
uniformly in t.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

MAX_LEVELS = 48


@lru_cache(maxsize=64)
def _gl(p: int):
    return np.polynomial.legendre.leggauss(p)


def panel_nodes(lo: float, hi: float, p: int):
    x, w = _gl(p)
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    return mid + half * x, half * w


def graded_levels(hi: float, layer: float) -> int:
    if hi <= 0.0 or layer <= 0.0:
        return 1
    ratio = hi / layer
    if ratio <= 2.0:
        return 1
    return int(min(MAX_LEVELS, np.ceil(np.log2(ratio))))


def graded_rule(hi: float, layer: float, p: int, base_panels: int = 1,
                with_delta: bool = False):
    """Nodes/weights on [0, hi], refined geometrically toward hi.

    ``layer`` is the width of the endpoint boundary layer to resolve;
    ``base_panels`` splits the smooth half [0, hi/2] uniformly (useful for
    oscillatory integrands with |.| kinks). With ``with_delta`` also returns
    the distance hi - node computed in panel arithmetic (exact even when the
    node agrees with hi to many ulp-decades; the kernels need it to evaluate
    the light-cone factors without cancellation).
    """
    if hi <= 0.0:
        out = (np.empty(0), np.empty(0))
        return out + (np.empty(0),) if with_delta else out
    L = graded_levels(hi, layer)
    # panel edges as distances below hi: hi, hi/2, hi/4, ..., 0 (plus base split)
    d_edges = [hi * 2.0 ** (-k) for k in range(1, L + 1)] + [0.0]
    ns, ws, ds = [], [], []
    if L > 1 and base_panels > 1:
        base = np.linspace(0.0, hi / 2.0, base_panels + 1)
        for a, b in zip(base[:-1], base[1:]):
            n, w = panel_nodes(a, b, p)
            ns.append(n)
            ws.append(w)
            ds.append(hi - n)
    else:
        n, w = panel_nodes(0.0, hi / 2.0 if L > 1 else hi, p)
        ns.append(n)
        ws.append(w)
        ds.append(hi - n)
    if L > 1:
        for d_hi, d_lo in zip(d_edges[:-1], d_edges[1:]):
            dn, w = panel_nodes(d_lo, d_hi, p)  # nodes in delta space
            ns.append(hi - dn)
            ws.append(w)
            ds.append(dn)
    nodes = np.concatenate(ns)
    weights = np.concatenate(ws)
    if with_delta:
        return nodes, weights, np.concatenate(ds)
    return nodes, weights


def gauss_rule(lo: float, hi: float, n: int):
    """Plain n-point Gauss-Legendre rule on [lo, hi]."""
    if hi <= lo:
        return np.empty(0), np.empty(0)
    return panel_nodes(lo, hi, n)
