"""Quadrature backends shared by the whole package.

Two tiers live here. One-off integrals go through an adaptive QUADPACK
wrapper with explicit error policy; batch evaluation (contour sweeps,
phase partitions) uses fixed composite Gauss-Legendre panels whose nodes
are built once and reused, so repeated calls are cheap and bit-stable.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import IntegrationWarning, quad


class QuadratureError(RuntimeError):
    """Raised when an integral cannot be computed to the configured budget."""


@dataclass(frozen=True)
class QuadratureConfig:
    """Error budget and limits for adaptive integration.

    Parameters
    ----------
    abs_tol, rel_tol : float
        Requested absolute / relative tolerances. Must be positive.
    max_subdivisions : int
        Subinterval limit handed to the adaptive integrator.
    tail_cutoff : float
        Hard cap on marched truncation radii (improper-integral tails).
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    tail_cutoff: float = 1e5

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if not self.tail_cutoff > 0:
            raise ValueError("tail_cutoff must be positive")


DEFAULT_CONFIG = QuadratureConfig()


def integrate(f, a, b, config=None, points=None):
    """Adaptive integral of a real integrand on [a, b].

    Returns (value, abserr). Breakpoints in `points` (e.g. a kink of the
    integrand) are forwarded to the subdivision. A result whose reported
    error exceeds ten times the configured budget raises QuadratureError;
    mild roundoff complaints on otherwise-converged results are accepted.
    """
    cfg = config or DEFAULT_CONFIG
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        out = quad(
            f,
            a,
            b,
            epsabs=cfg.abs_tol,
            epsrel=cfg.rel_tol,
            limit=cfg.max_subdivisions,
            points=points,
            full_output=1,
        )
    value, abserr = out[0], out[1]
    if len(out) > 3:  # QUADPACK flagged trouble; accept only if error is in budget
        budget = 10.0 * max(cfg.abs_tol, cfg.rel_tol * abs(value))
        if not abserr <= budget:
            raise QuadratureError(
                f"integral on [{a}, {b}] did not converge: {out[3].strip()} "
                f"(abserr={abserr:.3e})"
            )
    return value, abserr


def integrate_complex(f, a, b, config=None, points=None):
    """Adaptive integral of a complex integrand, by parts."""
    re, re_err = integrate(lambda t: f(t).real, a, b, config, points)
    im, im_err = integrate(lambda t: f(t).imag, a, b, config, points)
    return complex(re, im), math.hypot(re_err, im_err)


@lru_cache(maxsize=64)
def gauss_legendre(order: int):
    """Nodes and weights on [-1, 1], cached per order."""
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def panel_nodes(edges, order: int):
    """Composite Gauss-Legendre rule over consecutive [edges[i], edges[i+1]].

    Returns (nodes, weights) as flat arrays, panel-major so that slicing
    by multiples of `order` recovers individual panels.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2:
        raise ValueError("need at least two panel edges")
    if np.any(np.diff(edges) <= 0):
        raise ValueError("panel edges must be strictly increasing")
    x, w = gauss_legendre(order)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    nodes = mid[:, None] + half[:, None] * x[None, :]
    weights = half[:, None] * w[None, :]
    return nodes.ravel(), weights.ravel()


def geometric_edges(anchor: float, k_lo: int, k_hi: int, per_octave: int = 1):
    """Edges anchor * 2**(k / per_octave) for k in [k_lo, k_hi]."""
    if anchor <= 0:
        raise ValueError("anchor must be positive")
    k = np.arange(k_lo * per_octave, k_hi * per_octave + 1)
    return anchor * np.exp2(k / per_octave)


def refine_edges(edges, max_width: float):
    """Split panels wider than max_width into equal parts."""
    edges = np.asarray(edges, dtype=float)
    out = [edges[:1]]
    for a, b in zip(edges[:-1], edges[1:]):
        n = max(1, int(math.ceil((b - a) / max_width)))
        out.append(np.linspace(a, b, n + 1)[1:])
    return np.concatenate(out)


def grade_origin(edges, levels: int = 26):
    """Geometrically subdivide a leading [0, e1] panel toward 0.

    Integrands here are typically u**a with fractional a at the origin;
    a flat Gauss panel loses ~1e-8 there, while geometric subpanels are
    each smooth at their own scale. No-op unless edges[0] == 0.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.size < 2 or edges[0] != 0.0:
        return edges
    ladder = edges[1] * np.exp2(-np.arange(levels, 0, -1.0))
    return np.concatenate([edges[:1], ladder, edges[1:]])
