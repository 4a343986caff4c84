"""Half-line Poisson smoothing of a growth target.

W(y) convolves omega against the Poisson kernel P(x, y) = y / (y^2 + x^2)
on (0, inf). The rescaled substitution x = y * tan(theta) turns that into

    W(y) = integral over (0, pi/2) of omega(y * tan(theta)) d(theta)

which is the form all one-off evaluations use. Derivatives in y never
touch omega' (omega has a kink at the min-branch crossover): they use the
closed complex-pair form of the kernel derivative instead.

Evaluation comes in two tiers. `smooth` and friends run adaptive
quadrature per call; the SmoothedGrowth handle additionally carries a
fixed composite Gauss-Legendre grid in x on which omega is sampled once,
so that batch consumers (contour rays, phase sweeps, witness scans) get
W, its derivatives, and the half-plane extension W(z) as cheap
matrix-vector products over shared nodes.
"""

from __future__ import annotations

import cmath
import math
import threading
from typing import Optional, Union

import numpy as np

from .quadrature import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    geometric_edges,
    integrate,
    panel_nodes,
)
from .rates import GrowthTarget

_HALF_PI = 0.5 * math.pi

# Largest |arg z| the fixed grid resolves to ~1e-8 or better; beyond this the
# node spacing stops resolving the kernel's complex ridge.
MAX_COMPLEX_ARG = 1.29

# Taylor sector of the analytic extension around the positive axis.
SECTOR_ARG = math.pi / 6


def poisson_kernel(x, y):
    """P(x, y) = y / (y^2 + x^2) for y > 0."""
    if np.any(np.asarray(y) <= 0):
        raise ValueError("poisson_kernel needs y > 0")
    x = np.asarray(x, dtype=float)
    out = y / (y * y + x * x)
    return out if out.ndim else float(out)


def kernel_derivative(n: int, x, y):
    """n-th y-derivative of the Poisson kernel, via the complex-pair form.

    Writing P = Im(1/(x - iy)) gives

        d^n P / d y^n = Re{ (i/2) n! [ (-i)^n (x+iy)^-(n+1) - i^n (x-iy)^-(n+1) ] }

    which is exact for every n and avoids differencing. Satisfies
    |result| <= 2^(n+1) n! / (y^2 + x^2)^((n+1)/2).
    """
    if n < 0:
        raise ValueError("derivative order must be >= 0")
    if np.any(np.asarray(y) <= 0):
        raise ValueError("kernel_derivative needs y > 0")
    if n == 0:
        return poisson_kernel(x, y)
    x = np.asarray(x, dtype=float)
    fac = math.factorial(n)
    zp = (x + 1j * y) ** (-(n + 1))
    zm = (x - 1j * y) ** (-(n + 1))
    out = (0.5j * fac * ((-1j) ** n * zp - (1j) ** n * zm)).real
    return out if out.ndim else float(out)


def _theta_breakpoints(target: GrowthTarget, y: float):
    bp = target.branch_point
    if bp is None:
        return None
    t = math.atan2(bp, y)
    return [t] if 0.0 < t < _HALF_PI else None


def smooth(omega: GrowthTarget, y: float, config: Optional[QuadratureConfig] = None) -> float:
    """W(y) by adaptive quadrature on the rescaled kernel form."""
    if y <= 0:
        raise ValueError("smooth needs y > 0")
    om = omega.omega
    val, _ = integrate(
        lambda t: float(om(y * math.tan(t))),
        0.0,
        _HALF_PI,
        config or DEFAULT_CONFIG,
        points=_theta_breakpoints(omega, y),
    )
    return val


def smooth_derivative(
    omega: GrowthTarget, n: int, y: float, config: Optional[QuadratureConfig] = None
) -> float:
    """n-th derivative of W at y > 0, integrating omega against the kernel derivative.

    The x-integral is mapped through x = y tan(theta) onto a finite
    interval; the kernel derivative itself comes from the closed form, so
    omega is only ever sampled, never differentiated.
    """
    if n < 1:
        raise ValueError("smooth_derivative needs n >= 1")
    if y <= 0:
        raise ValueError("smooth_derivative needs y > 0")
    om = omega.omega

    def integrand(t):
        x = y * math.tan(t)
        sec2 = 1.0 + (x / y) ** 2
        return float(om(x)) * kernel_derivative(n, x, y) * y * sec2

    val, _ = integrate(
        integrand, 0.0, _HALF_PI, config or DEFAULT_CONFIG,
        points=_theta_breakpoints(omega, y),
    )
    return val


class SmoothedGrowth:
    """Evaluator handle for W, its derivatives, V, the phase, and W(z).

    Parameters
    ----------
    target : GrowthTarget
        omega with its envelope and min-branch crossover.
    quad_config : QuadratureConfig, optional
        Budget for the adaptive tier and for downstream consumers.
    n_max : int
        Largest derivative order served (default 6).
    grid_order, panels_per_octave : int
        Resolution of the fixed composite grid: Gauss-Legendre order per
        panel and panels per octave. The defaults resolve real arguments
        to ~1e-14 relative and complex arguments within |arg z| <= 1.26
        to better than 1e-10 (checked against the adaptive tier in tests).

    All evaluators are pure; caches only memoize exact re-evaluations and
    are lock-protected, so handles may be shared across worker threads.
    """

    def __init__(
        self,
        target: GrowthTarget,
        quad_config: Optional[QuadratureConfig] = None,
        n_max: int = 6,
        grid_order: int = 16,
        panels_per_octave: int = 2,
    ):
        self.target = target
        self.quad_config = quad_config or DEFAULT_CONFIG
        self.n_max = int(n_max)
        self._grid_order = int(grid_order)
        self._per_octave = int(panels_per_octave)
        self._lock = threading.Lock()
        self._nodes = None
        self._omega_weights = None
        self._scalar_memo = {}
        self._built = {}

    # -- fixed grid ----------------------------------------------------

    def _grid(self):
        with self._lock:
            if self._nodes is None:
                anchor = self.target.branch_point or 1.0
                edges = geometric_edges(anchor, -40, 122, self._per_octave)
                nodes, weights = panel_nodes(edges, self._grid_order)
                om = np.asarray(self.target.omega(nodes), dtype=float)
                self._nodes = nodes
                self._omega_weights = om * weights
            return self._nodes, self._omega_weights

    def _kernel_sum(self, y: np.ndarray, n: int) -> np.ndarray:
        nodes, ow = self._grid()
        out = np.empty(y.shape, dtype=float)
        x = nodes[None, :]
        # chunked: a full (len(y), len(nodes)) kernel matrix can exceed memory
        for i in range(0, y.size, 2048):
            yy = y[i : i + 2048, None]
            if n == 0:
                k = yy / (yy * yy + x * x)
            else:
                fac = math.factorial(n)
                # reciprocal first: |x + iy| spans ~50 orders across the node range
                wp = (1.0 / (x + 1j * yy)) ** (n + 1)
                wm = (1.0 / (x - 1j * yy)) ** (n + 1)
                k = (0.5j * fac * ((-1j) ** n * wp - (1j) ** n * wm)).real
            out[i : i + 2048] = k @ ow
        return out

    # -- real evaluators -----------------------------------------------

    def W(self, y) -> Union[float, np.ndarray]:
        """W(y) for scalar or array y > 0."""
        return self.derivative(y, 0)

    def derivative(self, y, n: int) -> Union[float, np.ndarray]:
        """W^(n)(y); n = 0 gives W itself."""
        if not (0 <= n <= max(self.n_max, 0)):
            raise ValueError(f"derivative order {n} outside [0, {self.n_max}]")
        arr = np.atleast_1d(np.asarray(y, dtype=float))
        if np.any(arr <= 0):
            raise ValueError("W derivatives need y > 0")
        if arr.size == 1:
            key = (n, float(arr[0]))
            with self._lock:
                hit = self._scalar_memo.get(key)
            if hit is not None:
                return hit if np.ndim(y) else float(hit)
            val = float(self._kernel_sum(arr, n)[0])
            with self._lock:
                self._scalar_memo[key] = val
            return np.array([val]) if np.ndim(y) else val
        return self._kernel_sum(arr, n)

    def V(self, y) -> Union[float, np.ndarray]:
        """V(y) = W(y) + y W'(y), the phase velocity."""
        return self.W(y) + np.asarray(y, dtype=float) * self.derivative(y, 1)

    def V_prime(self, y) -> Union[float, np.ndarray]:
        return 2.0 * self.derivative(y, 1) + np.asarray(y, dtype=float) * self.derivative(y, 2)

    def phase(self, y) -> Union[float, np.ndarray]:
        """phi(y) = y W(y); strictly increasing since phi' = V > 0."""
        return np.asarray(y, dtype=float) * self.W(y)

    def memo(self, key, build):
        """Cache an expensive derived object on this instance.

        ``build`` runs outside the lock; a duplicate build under a race
        is wasted work, not an error, since results are pure.
        """
        with self._lock:
            if key in self._built:
                return self._built[key]
        val = build()
        with self._lock:
            return self._built.setdefault(key, val)

    # -- complex evaluator ----------------------------------------------

    def kernel_complex(self, z) -> Union[complex, np.ndarray]:
        """W(z) on the right half-plane, |arg z| <= MAX_COMPLEX_ARG.

        Same node sum as the real case with kernel z / (z^2 + x^2); the
        integrand's poles sit on the imaginary axis, so the sum is
        analytic in the open half-plane and this grid resolves it up to
        the documented argument cap.
        """
        arr = np.atleast_1d(np.asarray(z, dtype=complex))
        if np.any(arr.real <= 0) or np.any(np.abs(np.angle(arr)) > MAX_COMPLEX_ARG):
            raise ValueError("complex evaluation needs |arg z| <= "
                             f"{MAX_COMPLEX_ARG} in the right half-plane")
        nodes, ow = self._grid()
        out = np.empty(arr.shape, dtype=complex)
        x = nodes[None, :]
        for i in range(0, arr.size, 1024):
            zz = arr[i : i + 1024, None]
            out[i : i + 1024] = (zz / (zz * zz + x * x)) @ ow
        return out if np.ndim(z) else complex(out[0])


def eval_V(sg: SmoothedGrowth, y) -> Union[float, np.ndarray]:
    """V(y) = W(y) + y W'(y). Positive for every valid target."""
    return sg.V(y)


def smooth_complex(sg: SmoothedGrowth, z: complex) -> complex:
    """Analytic extension W(z) in the sector |arg z| < pi/6.

    Agrees with smooth() on the positive axis and is conjugate-symmetric.
    Arguments outside the sector are rejected; the contour machinery uses
    the evaluator's wider half-plane method directly.
    """
    z = complex(z)
    if z == 0 or abs(cmath.phase(z)) >= SECTOR_ARG:
        raise ValueError("smooth_complex needs z != 0 with |arg z| < pi/6")
    return sg.kernel_complex(z)


def taylor_coeff(sg: SmoothedGrowth, n: int, x: float) -> float:
    """Series coefficient W^(n)(x) / n! of the extension around x > 0.

    Bounded by 2^(n+1) x^(-n) W(x), which keeps the series radius at x/2
    or better.
    """
    if x <= 0:
        raise ValueError("taylor_coeff needs x > 0")
    if not (0 <= n <= sg.n_max):
        raise ValueError(f"coefficient order {n} outside [0, {sg.n_max}]")
    return sg.derivative(x, n) / math.factorial(n)
