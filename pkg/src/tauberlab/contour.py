"""Analytic continuation of oscillatory Laplace integrals by path bending.

The integrand e^{izW(z)}e^{-sz} is analytic on the right half-plane (the
kernel behind W has poles only on the imaginary axis), so the real-axis
integral equals any bent path: a real stem [0, R0], a circular arc at R0,
and a ray to R_max. Off the axis the phase factor decays like
e^{-Im(zW(z))}, which is what buys convergence for Re s <= 0.

Two ray profiles are supported. The "growth" profile tilts with
arctan(1/sqrt(W(r))) and needs the anchor W(R0) > 9; it converges only
where the stem does. The "fixed" profile rides a constant angle from a
small R0 and is the production default; its angle is chosen per s unless
pinned. All node sets are cached on the evaluator, so a sweep over many
s values costs one exp and one dot product each.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .oscillatory import eval_tau
from .quadrature import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    QuadratureError,
    grade_origin,
    panel_nodes,
)
from .smoothing import MAX_COMPLEX_ARG, SmoothedGrowth

# log-magnitude floor for ray truncation; tail beyond it is < 1e-16 * length
_TRUNC_LOG = math.log(1e-19)
# baseline log-magnitude hump cap: cancellation noise scales like e^peak
# (measured 1e-14 * e^peak across independent anchors), and e^15 is what
# the tightest advertised bent-path tolerance (1e-9) can absorb
_HUMP_LIMIT = 15.0
_HUMP_BASE_TOL = 1e-9
_R0_SEARCH_CAP = 1e10
_DECAY_MARCH_CAP = 1e4


@dataclass(frozen=True)
class ContourPath:
    """Bent integration path: stem [0, R0], arc at R0, ray out to R_max.

    profile "growth" uses the tilt arctan(1/sqrt(W(r))) (valid once
    W(R0) > 9, which keeps every ray angle inside (0, pi/6)); profile
    "fixed" rides a constant angle, chosen per s when `angle` is None.
    """

    R0: float = 1.0
    R_max: float = 2000.0
    profile: str = "fixed"
    angle: Optional[float] = None
    quad_config: QuadratureConfig = field(default_factory=lambda: DEFAULT_CONFIG)

    def __post_init__(self):
        if not (self.R0 > 0):
            raise ValueError("need R0 > 0")
        if self.R_max < self.R0:
            raise ValueError("need R_max >= R0")
        if self.profile not in ("fixed", "growth"):
            raise ValueError("profile must be 'fixed' or 'growth'")
        if self.angle is not None and not (0.0 < self.angle <= MAX_COMPLEX_ARG):
            raise ValueError(f"fixed ray angle must lie in (0, {MAX_COMPLEX_ARG}]")

    def arc_span(self, sg: SmoothedGrowth) -> float:
        """Opening angle of the arc piece at radius R0."""
        if self.profile == "growth":
            return math.atan(1.0 / math.sqrt(float(sg.W(self.R0))))
        return self.angle if self.angle is not None else math.pi / 3

    def ray_angle(self, sg: SmoothedGrowth, r: float) -> float:
        """Tilt of the ray point at radius r."""
        if self.profile == "growth":
            return math.atan(1.0 / math.sqrt(float(sg.W(r))))
        return self.angle if self.angle is not None else math.pi / 3


def choose_R0(sg: SmoothedGrowth) -> float:
    """Smallest quarter-octave grid point with W > 16.

    That margin puts the growth-profile tilt below arctan(1/4), safely
    inside the arctan(1/3) requirement. Deterministic for a fixed grid.
    """
    k_hi = int(4 * math.log2(_R0_SEARCH_CAP))
    rs = 2.0 ** (np.arange(-8, k_hi + 1) / 4.0)
    idx = np.nonzero(sg.W(rs) > 16.0)[0]
    if idx.size == 0:
        raise ValueError(
            f"W stays <= 16 out to {_R0_SEARCH_CAP:g}; growth too slow for a bent-path anchor"
        )
    return float(rs[idx[0]])


def _calibration_anchor(sg: SmoothedGrowth) -> float:
    # smallest quarter-octave point with W > 9 (the path-validity threshold),
    # falling back to a fixed radius for rates that never get there
    k_hi = int(4 * math.log2(1e6))
    rs = 2.0 ** (np.arange(-8, k_hi + 1) / 4.0)
    idx = np.nonzero(sg.W(rs) > 9.0)[0]
    return float(rs[idx[0]]) if idx.size else 1e4


def _c_emp(sg: SmoothedGrowth) -> float:
    def build():
        r0 = _calibration_anchor(sg)
        r = np.geomspace(r0, 4.0 * r0, 64)
        w = sg.W(r)
        z = r * np.exp(1j * np.arctan(1.0 / np.sqrt(w)))
        logmag = (1j * z * sg.kernel_complex(z)).real
        lead = -r * w / (2.0 * np.sqrt(1.0 + w))
        return 2.0 * max(0.0, float(np.max((logmag - lead) / r)))

    return sg.memo(("c_emp",), build)


def decay_bound(sg: SmoothedGrowth, r: float, s: complex,
                c_emp: Optional[float] = None) -> float:
    """Upper bound on log|e^{izW(z)}e^{-sz}| at radius r on the growth ray.

    Shape -r W/(2 sqrt(1+W)) + (C + |s|) r with C calibrated once per
    evaluator (max measured excess per unit radius, safety factor 2);
    pass c_emp to pin the constant instead.
    """
    c = _c_emp(sg) if c_emp is None else c_emp
    w = float(sg.W(r))
    return -r * w / (2.0 * math.sqrt(1.0 + w)) + (c + abs(complex(s))) * r


def _decay_radius(sg: SmoothedGrowth, s: complex, r_lo: float) -> Optional[float]:
    # first quarter-octave radius where the bound clears the truncation floor
    n = max(1, int(4 * math.log2(_DECAY_MARCH_CAP / r_lo)) + 1)
    rs = r_lo * 2.0 ** (np.arange(n) / 4.0)
    w = sg.W(rs)
    b = -rs * w / (2.0 * np.sqrt(1.0 + w)) + (_c_emp(sg) + abs(complex(s))) * rs
    idx = np.nonzero(b < math.log(1e-16))[0]
    return float(rs[idx[0]]) if idx.size else None


def _pick_angle(s: complex) -> float:
    # upper-half s is the hard side: e^{-sz} grows along an upward ray,
    # so steepness there maximizes the phase decay that must beat it
    if s.imag > 0:
        return 1.257
    return math.pi / 3


def _shallow_angle(s: complex) -> Optional[float]:
    """Hump-free ray for upper-half s with Re s > 0, or None.

    Below arctan(Re s/Im s) the factor e^{-sz} decays outright, so the
    integrand has no hump at all. Only worth it when that decay kills
    the integrand inside the densely resolved region; angles snap to a
    coarse grid so nearby s values share one node cache.
    """
    if not (s.real > 0 and s.imag > 0):
        return None
    raw = 0.45 * math.atan2(s.real, s.imag)
    ang = round(raw / 0.05) * 0.05
    if not (0.0 < ang < 0.9 * math.atan2(s.real, s.imag)):
        ang = round(raw, 3)
    if s.real * math.cos(ang) - s.imag * math.sin(ang) < 0.1:
        return None
    return ang


class _PieceCache:
    """Frozen node data for one path piece: z, weights*dz, i z W(z).

    n_dense counts the leading nodes whose panels resolve every
    oscillation scale in use; truncation may not land beyond them
    unless the integrand is already dead.
    """

    __slots__ = ("z", "w", "g0", "r", "n_dense")

    def __init__(self, z: np.ndarray, w: np.ndarray, g0: np.ndarray,
                 r: np.ndarray, n_dense: Optional[int] = None):
        self.z = z
        self.w = w
        self.g0 = g0
        self.r = r
        self.n_dense = len(r) if n_dense is None else n_dense


def _stem_cache(sg: SmoothedGrowth, R0: float) -> _PieceCache:
    def build():
        top = min(R0, 640.0)
        edges = grade_origin(np.linspace(0.0, top, max(10, int(math.ceil(top / 0.1))) + 1))
        u, w = panel_nodes(edges, 16)
        g0 = 1j * u * sg.W(u)
        return _PieceCache(u.astype(complex), w.astype(complex), g0, u)

    return sg.memo(("contour_stem", R0), build)


def _arc_cache(sg: SmoothedGrowth, R0: float, span: float) -> _PieceCache:
    def build():
        # graded toward t=0: the phase factor can collapse within a
        # boundary layer of width ~1/(R0 W) at the stem junction
        edges = grade_origin(np.linspace(0.0, span, 9), levels=30)
        t, w = panel_nodes(edges, 16)
        z = R0 * np.exp(1j * t)
        g0 = 1j * z * sg.kernel_complex(z)
        return _PieceCache(z, w * (1j * z), g0, np.full(t.shape, R0))

    return sg.memo(("contour_arc", R0, span), build)


def _ray_edges(R0: float, R_max: float) -> tuple:
    # uniform 0.15 out to 600 resolves every oscillation scale in use;
    # a 2% geometric tail covers radii only reached by dead integrand
    dense_top = min(R_max, max(600.0, R0 + 40.0))
    edges = [np.arange(R0, dense_top, 0.15), [dense_top]]
    r = dense_top
    tail = []
    while r < R_max:
        r = min(R_max, r * 1.02)
        tail.append(r)
    all_edges = np.concatenate(edges + [tail]) if tail else np.concatenate(edges)
    return all_edges, dense_top


def _ray_cache(sg: SmoothedGrowth, path: ContourPath, angle: float) -> _PieceCache:
    key = ("contour_ray", path.profile, round(angle, 6), path.R0, path.R_max)

    def build():
        edges, dense_top = _ray_edges(path.R0, path.R_max)
        r, w = panel_nodes(edges, 16)
        if path.profile == "growth":
            wv = sg.W(r)
            wp = sg.derivative(r, 1)
            al = np.arctan(1.0 / np.sqrt(wv))
            dz = np.exp(1j * al) * (1.0 - 0.5j * r * wp / (np.sqrt(wv) * (1.0 + wv)))
            z = r * np.exp(1j * al)
        else:
            dz = np.full(r.shape, complex(math.cos(angle), math.sin(angle)))
            z = r * dz
        g0 = 1j * z * sg.kernel_complex(z)
        n_dense = int(np.searchsorted(r, dense_top, side="right"))
        return _PieceCache(z, w * dz, g0, r, n_dense)

    return sg.memo(key, build)


def _growth_dz(sg: SmoothedGrowth, r: float) -> complex:
    """dz/dr on the growth ray, by the chain rule through the tilt."""
    w = float(sg.W(r))
    wp = float(sg.derivative(r, 1))
    al = math.atan(1.0 / math.sqrt(w))
    return np.exp(1j * al) * (1.0 - 0.5j * r * wp / (math.sqrt(w) * (1.0 + w)))


def _hump_limit(config: QuadratureConfig) -> float:
    # a budget looser than the baseline tolerance raises the cap by the
    # same factor the noise model allows; tighter budgets keep the floor
    return _HUMP_LIMIT + max(0.0, math.log(config.abs_tol / _HUMP_BASE_TOL))


def _sum_piece(cache: _PieceCache, s: complex, limit: float,
               stop: Optional[int] = None) -> complex:
    g = cache.g0 - s * cache.z
    if stop is not None:
        g = g[:stop]
    peak = float(g.real.max()) if g.size else -math.inf
    if peak > limit:
        raise QuadratureError(
            f"contour integrand peaks at e^{peak:.0f} for s={s}; cancellation "
            "leaves fewer digits than the advertised tolerance on this ray"
        )
    w = cache.w if stop is None else cache.w[:stop]
    return complex(np.sum(np.exp(g) * w))


def validate_path(sg: SmoothedGrowth, path: ContourPath) -> None:
    """Raise if the path violates its contract for this evaluator."""
    if path.profile == "growth":
        w0 = float(sg.W(path.R0))
        if not (w0 > 9.0):
            raise ValueError(
                f"growth profile needs W(R0) > 9 so the tilt stays under arctan(1/3); "
                f"W({path.R0:g}) = {w0:.3f}"
            )


def _ray_stop(sg: SmoothedGrowth, ray: _PieceCache, path: ContourPath,
              s: complex, angle: float) -> int:
    # the decay bound describes the growth-profile tilt; it transfers
    # only to rays at least that steep, where the phase decays faster
    bound_valid = angle >= math.atan(1.0 / math.sqrt(float(sg.W(path.R0))))
    if bound_valid:
        r_db = _decay_radius(sg, s, path.R0)
        if r_db is not None and r_db <= path.R_max:
            stop = int(np.searchsorted(ray.r, r_db))
            if stop <= ray.n_dense:
                return stop
    env = np.maximum.accumulate((ray.g0.real - (s * ray.z).real)[::-1])[::-1]
    ok = np.nonzero(env < _TRUNC_LOG)[0]
    if ok.size == 0:
        raise QuadratureError(
            f"ray envelope never decays below tolerance within R_max={path.R_max:g} "
            f"for s={s}"
        )
    stop = int(ok[0]) + 1
    if stop > ray.n_dense:
        raise QuadratureError(
            f"ray truncation for s={s} lands at r={ray.r[stop - 1]:.0f}, beyond the "
            "resolved panel region; the integrand decays too slowly on this ray"
        )
    return stop


def _bent_eval(sg: SmoothedGrowth, path: ContourPath, s: complex,
               angle: float) -> complex:
    stem = _stem_cache(sg, path.R0)
    if path.R0 > 640.0 and math.exp(-s.real * 640.0) >= 1e-16:
        raise QuadratureError(
            f"stem truncation at r=640 is not converged for s={s}; "
            "use the fixed profile with a small R0 instead"
        )
    ray = _ray_cache(sg, path, angle)
    stop = _ray_stop(sg, ray, path, s, angle)
    limit = _hump_limit(path.quad_config)
    return (
        _sum_piece(stem, s, limit)
        + _sum_piece(_arc_cache(sg, path.R0, angle), s, limit)
        + _sum_piece(ray, s, limit, stop)
    )


def contour_F(sg: SmoothedGrowth, path: ContourPath, s: complex) -> complex:
    """Continue F(s) = int_0^inf e^{iuW(u)}e^{-su} du to arbitrary s.

    Sum of stem, arc, and ray integrals. The ray is truncated where the
    conservative decay bound clears 1e-16, falling back to the measured
    node envelope when the bound never turns negative in range. Points
    whose integrand hump exceeds double precision on the steep ray are
    retried on a shallow ray when Re s > 0 makes that convergent;
    otherwise the QuadratureError names the unreachable s.
    """
    validate_path(sg, path)
    s = complex(s)
    if path.profile == "growth":
        return _bent_eval(sg, path, s, path.arc_span(sg))
    if path.angle is not None:
        return _bent_eval(sg, path, s, path.angle)
    shallow = _shallow_angle(s)
    if shallow is not None:
        try:
            return _bent_eval(sg, path, s, shallow)
        except QuadratureError:
            pass
    return _bent_eval(sg, path, s, _pick_angle(s))


def laplace_cos(sg: SmoothedGrowth, path: ContourPath, s: complex) -> complex:
    """Laplace transform of cos(uW(u)), continued to all of C.

    Assembled as (F(s) + conj F(conj s))/2, so it is exactly real on the
    real axis and conjugate-symmetric everywhere.
    """
    s = complex(s)
    a = contour_F(sg, path, s)
    b = contour_F(sg, path, s.conjugate())
    return 0.5 * (a + b.conjugate())


def laplace_dS(sg: SmoothedGrowth, path: ContourPath, s: complex) -> complex:
    """Laplace-Stieltjes transform of the cumulative e^u(1 + cos(uW(u))).

    Meromorphic with one simple pole at s = 1 of residue 1: the identity
    1/(s-1) + laplace_cos(s-1) splits the exponential part off exactly.
    """
    s = complex(s)
    if s == 1.0:
        raise ValueError("simple pole at s = 1")
    return 1.0 / (s - 1.0) + laplace_cos(sg, path, s - 1.0)


def laplace_tau(sg: SmoothedGrowth, path: ContourPath, s: complex,
                config: Optional[QuadratureConfig] = None) -> complex:
    """Laplace transform of the tail integral; entire in s.

    Uses (tau(0) - laplace_cos(s))/s; the s = 0 singularity is removable
    because laplace_cos(0) = tau(0), and the value there is recovered by
    averaging over s in {h, -h, ih, -ih} (error O(h^4) by symmetry).
    """
    cfg = config or path.quad_config
    s = complex(s)
    tau0 = eval_tau(sg, 0.0, cfg)
    if s == 0.0:
        h = 0.05
        pts = (h, -h, 1j * h, -1j * h)
        return sum((tau0 - laplace_cos(sg, path, p)) / p for p in pts) / 4.0
    return (tau0 - laplace_cos(sg, path, s)) / s


def cauchy_circle(G: Callable[[complex], complex], s0: complex, radius: float,
                  N: int = 64) -> complex:
    """(1/2 pi i) times the circle integral of G around s0.

    N-point trapezoid on the circle, spectrally accurate for analytic G:
    ~0 for holomorphic G, ~the residue when a simple pole is enclosed.
    """
    if radius <= 0:
        raise ValueError("need radius > 0")
    if N < 16:
        raise ValueError("need N >= 16")
    rot = np.exp(2j * math.pi * np.arange(N) / N)
    total = 0.0 + 0.0j
    for e in rot:
        total += complex(G(complex(s0) + radius * complex(e))) * complex(e)
    return radius * total / N
