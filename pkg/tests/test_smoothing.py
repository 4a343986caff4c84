import cmath
import math

import numpy as np
import pytest

from tauberlab import (
    GrowthTarget,
    SmoothedGrowth,
    eval_V,
    kernel_derivative,
    poisson_kernel,
    smooth,
    smooth_complex,
    smooth_derivative,
    taylor_coeff,
)
from tauberlab.quadrature import integrate_complex

SQRT_W_CONST = math.pi / math.sqrt(2.0)  # W(y) = (pi/sqrt 2) sqrt(y) for omega = sqrt


# -- kernel ---------------------------------------------------------------


def test_poisson_kernel_values():
    assert poisson_kernel(0.0, 1.0) == pytest.approx(1.0)
    assert poisson_kernel(1.0, 1.0) == pytest.approx(0.5)
    assert poisson_kernel(3.0, 2.0) == pytest.approx(2.0 / 13.0)
    with pytest.raises(ValueError):
        poisson_kernel(1.0, 0.0)


def test_kernel_derivative_order_zero_is_kernel():
    assert kernel_derivative(0, 1.0, 1.0) == pytest.approx(poisson_kernel(1.0, 1.0))


def test_kernel_derivative_first_order_closed_form():
    # dP/dy = (x^2 - y^2) / (x^2 + y^2)^2
    assert kernel_derivative(1, 2.0, 1.0) == pytest.approx(3.0 / 25.0)
    for x, y in [(0.5, 1.0), (3.0, 2.0), (1.0, 4.0)]:
        expect = (x * x - y * y) / (x * x + y * y) ** 2
        assert kernel_derivative(1, x, y) == pytest.approx(expect, rel=1e-13)


def _fd3(f, y, h):
    return (-f(y - 2 * h) + 2 * f(y - h) - 2 * f(y + h) + f(y + 2 * h)) / (2 * h**3)


def test_kernel_derivative_third_order_vs_finite_difference():
    x, y = 1.0, 2.0
    f = lambda t: poisson_kernel(x, t)
    # Richardson on the second-order stencil gives a fourth-order oracle
    h = 0.02
    oracle = (4.0 * _fd3(f, y, h / 2) - _fd3(f, y, h)) / 3.0
    assert kernel_derivative(3, x, y) == pytest.approx(oracle, rel=1e-6)


@pytest.mark.parametrize("n", range(7))
def test_kernel_derivative_bound(n):
    bound = lambda x, y: 2.0 ** (n + 1) * math.factorial(n) / (y * y + x * x) ** ((n + 1) / 2)
    for x in (0.0, 0.3, 1.0, 5.0, 40.0):
        for y in (0.1, 1.0, 7.0):
            assert abs(kernel_derivative(n, x, y)) <= bound(x, y) * (1 + 1e-12)


# -- smoothing, closed-form targets ---------------------------------------


def test_smooth_constant_target(const_target):
    for y in (0.3, 1.0, 25.0):
        assert smooth(const_target, y) == pytest.approx(math.pi / 2, rel=1e-10)


def test_smooth_sqrt_target(sqrt_target):
    # oracle: independent quadrature of the defining x-integral
    for y in (1.0, 4.0, 100.0):
        val, _ = integrate_complex(
            lambda t: complex(math.sqrt(y * math.tan(t))), 0.0, math.pi / 2 - 1e-13
        )
        assert val.real == pytest.approx(SQRT_W_CONST * math.sqrt(y), rel=1e-8)
        assert smooth(sqrt_target, y) == pytest.approx(SQRT_W_CONST * math.sqrt(y), rel=1e-10)
    assert SQRT_W_CONST == pytest.approx(2.221441, abs=5e-7)


def test_smooth_log_bracket(log_target):
    w10 = smooth(log_target, 10.0)
    lo = log_target.omega(10.0)
    hi = log_target.omega(100.0) + 1.0
    assert lo <= w10 <= 2.0 * hi, f"measured bracket: {lo:.6f} <= {w10:.6f} <= 2*{hi:.6f}"


def test_smooth_rejects_bad_argument(log_target):
    with pytest.raises(ValueError):
        smooth(log_target, 0.0)


def test_smooth_derivative_constant_target(const_target):
    assert smooth_derivative(const_target, 1, 2.0) == pytest.approx(0.0, abs=1e-10)


def test_smooth_derivative_sqrt_target(sqrt_target):
    # differentiate W = (pi/sqrt 2) sqrt(y) by hand: W' = (pi/(2 sqrt 2)) / sqrt(y)
    for y in (1.0, 9.0):
        expect = SQRT_W_CONST / (2.0 * math.sqrt(y))
        assert smooth_derivative(sqrt_target, 1, y) == pytest.approx(expect, rel=1e-9)


def test_smooth_derivative_matches_finite_difference(log_target):
    y, h = 5.0, 0.02
    d1 = lambda hh: (smooth(log_target, y + hh) - smooth(log_target, y - hh)) / (2 * hh)
    oracle = (4.0 * d1(h / 2) - d1(h)) / 3.0
    got = smooth_derivative(log_target, 1, y)
    assert got >= 0.0
    assert got == pytest.approx(oracle, rel=1e-6)


@pytest.mark.parametrize("y", np.logspace(0, 3, 10).tolist())
def test_smooth_derivative_fd_grid(log_target, y):
    h = 0.01 * y
    d1 = lambda hh: (smooth(log_target, y + hh) - smooth(log_target, y - hh)) / (2 * hh)
    oracle1 = (4.0 * d1(h / 2) - d1(h)) / 3.0
    assert smooth_derivative(log_target, 1, y) == pytest.approx(oracle1, rel=1e-5)
    d2 = lambda hh: (
        smooth(log_target, y + hh) - 2 * smooth(log_target, y) + smooth(log_target, y - hh)
    ) / hh**2
    oracle2 = (4.0 * d2(h / 2) - d2(h)) / 3.0
    assert smooth_derivative(log_target, 2, y) == pytest.approx(oracle2, rel=1e-5, abs=1e-10)


# -- V --------------------------------------------------------------------


def test_eval_V_constant_and_sqrt(const_sg, sqrt_target):
    assert eval_V(const_sg, 3.0) == pytest.approx(math.pi / 2, rel=1e-9)
    sg = SmoothedGrowth(sqrt_target)
    for y in (1.0, 16.0):
        assert eval_V(sg, y) == pytest.approx(1.5 * SQRT_W_CONST * math.sqrt(y), rel=1e-9)


def test_V_positive_and_below_5W(log_sg, pow_sg):
    ys = np.logspace(-1, 5, 25)
    for sg in (log_sg, pow_sg):
        V = sg.V(ys)
        W = sg.W(ys)
        assert np.all(V > 0)
        assert np.all(V <= 5.0 * W * (1 + 1e-10))


# -- complex extension -----------------------------------------------------


def test_smooth_complex_real_axis(log_sg, log_target):
    val = smooth_complex(log_sg, 3.0 + 0.0j)
    assert val.imag == pytest.approx(0.0, abs=1e-12)
    assert val.real == pytest.approx(smooth(log_target, 3.0), rel=1e-10)


def test_smooth_complex_conjugate_symmetry(log_sg):
    z = 4.0 * cmath.exp(0.3j)
    assert smooth_complex(log_sg, z.conjugate()) == pytest.approx(
        smooth_complex(log_sg, z).conjugate(), rel=1e-12
    )


def test_smooth_complex_sector_enforced(log_sg):
    with pytest.raises(ValueError):
        smooth_complex(log_sg, 10.0 * cmath.exp(0.6j))
    with pytest.raises(ValueError):
        smooth_complex(log_sg, 0.0)


def test_smooth_complex_matches_taylor_series(log_target):
    sg = SmoothedGrowth(log_target, n_max=8)
    x0, z = 10.0, 10.0 * cmath.exp(0.05j)
    series = sum(taylor_coeff(sg, n, x0) * (z - x0) ** n for n in range(9))
    assert smooth_complex(sg, z) == pytest.approx(series, rel=1e-6)


def test_kernel_complex_wide_angle_vs_adaptive(log_sg, log_target):
    # independent adaptive check beyond the Taylor sector
    for ang in (0.8, 1.05):  # up to ~60 degrees
        z = 5.0 * cmath.exp(1j * ang)
        om = log_target.omega

        def f(t):
            x = abs(z) * math.tan(t)
            sec2 = 1.0 + math.tan(t) ** 2
            return complex(om(x)) * z / (z * z + x * x) * abs(z) * sec2

        # breakpoints: omega's kink and the kernel ridge at x = |z|
        kink = math.atan2(log_target.branch_point, abs(z))
        oracle, _ = integrate_complex(
            f, 0.0, math.pi / 2 - 1e-13, points=[kink, math.pi / 4]
        )
        assert log_sg.kernel_complex(z) == pytest.approx(oracle, rel=5e-10)


def test_kernel_complex_argument_cap(log_sg):
    with pytest.raises(ValueError):
        log_sg.kernel_complex(cmath.exp(1.4j))


# -- Taylor coefficients ----------------------------------------------------


def test_taylor_coeff_basics(log_sg, const_sg):
    assert taylor_coeff(log_sg, 0, 7.0) == pytest.approx(log_sg.W(7.0))
    assert taylor_coeff(const_sg, 1, 3.0) == pytest.approx(0.0, abs=1e-10)
    with pytest.raises(ValueError):
        taylor_coeff(log_sg, 9, 3.0)


def test_taylor_coeff_bound(log_sg):
    x = 20.0
    w = log_sg.W(x)
    for n in range(7):
        bound = 2.0 ** (n + 1) * x ** (-n) * w
        ratio = abs(taylor_coeff(log_sg, n, x)) / bound
        assert ratio <= 1.0 + 1e-6, f"n={n}: |c|/bound = {ratio:.3e}"


# -- evaluator handle properties --------------------------------------------


def test_grid_tier_matches_adaptive_tier(log_sg, log_target):
    for y in (0.5, 3.0, 47.0, 1e4):
        assert log_sg.W(y) == pytest.approx(smooth(log_target, y), rel=1e-10)
    for n in (1, 2):
        assert log_sg.derivative(20.0, n) == pytest.approx(
            smooth_derivative(log_target, n, 20.0), rel=1e-8
        )


def test_evaluator_is_pure_and_shape_consistent(log_sg):
    a = log_sg.W(11.0)
    b = log_sg.W(11.0)
    assert a == b
    arr = log_sg.W(np.array([11.0, 12.0]))
    assert arr.shape == (2,)
    assert arr[0] == pytest.approx(a, rel=1e-14)


# -- smoothing-lemma invariants on a sample grid -----------------------------

GRID = np.logspace(0, 6, 13)


def test_derivative_nonnegative_on_grid(log_sg):
    assert np.all(log_sg.derivative(GRID, 1) >= -1e-9)


@pytest.mark.parametrize("a", [0.1, 0.25, 0.5, 0.75, 1.0])
def test_scaling_inequality_on_grid(log_sg, a):
    assert np.all(log_sg.W(a * GRID) >= a * log_sg.W(GRID) - 1e-9)


@pytest.mark.parametrize("n", range(1, 7))
def test_derivative_bound_on_grid(log_sg, n):
    W = log_sg.W(GRID)
    Wn = log_sg.derivative(GRID, n)
    ratio = np.abs(Wn) * GRID**n / (2.0 ** (n + 1) * math.factorial(n) * W)
    assert np.all(ratio <= 1.0 + 1e-6)


def test_growth_sandwich_on_grid(log_sg, log_target):
    W = log_sg.W(GRID)
    lo = W / log_target.omega(GRID)
    hi = W / (log_target.omega(GRID**2) + 1.0)
    assert np.min(lo) > 0, f"measured c1 = {np.min(lo):.4f}"
    assert np.isfinite(np.max(hi)), f"measured c2 = {np.max(hi):.4f}"
    assert np.max(W / GRID) < math.pi  # far below even the crude linear bound
