import numpy as np
import pytest

from lassowave.volterra import (
    VeskProblem,
    collocation_residual,
    solve_vesk,
    vesk_residual,
)


def _exp_problem(h, t1=2.0):
    # y + int_0^t y = 1  =>  y = exp(-t)
    n = int(round(t1 / h))
    return VeskProblem(
        t0=0.0, t1=t1, h=h,
        kernel_eval=lambda t, s: np.ones_like(t),
        rhs=np.ones(n + 1), sign=+1,
    )


def test_zero_kernel_identity():
    n = 50
    rng = np.random.default_rng(3)
    g = rng.standard_normal(n + 1)
    p = VeskProblem(0.0, 1.0, 1.0 / n, lambda t, s: np.zeros_like(t), g, +1)
    y = solve_vesk(p)
    assert np.array_equal(y, g)


def test_exponential_solution():
    h = 1e-2
    p = _exp_problem(h)
    y = solve_vesk(p)
    t = p.nodes()
    err = np.max(np.abs(y - np.exp(-t)))
    assert err < 5e-5


def test_exponential_convergence_order():
    errs = []
    for h in (4e-2, 2e-2, 1e-2):
        p = _exp_problem(h)
        t = p.nodes()
        errs.append(np.max(np.abs(solve_vesk(p) - np.exp(-t))))
    for coarse, fine in zip(errs, errs[1:]):
        assert 3.0 <= coarse / fine <= 5.0


def test_sinh_resolvent():
    # y - int_0^t (t - s) y(s) ds = t  =>  y = sinh t
    h = 5e-3
    n = int(round(2.0 / h))
    t1 = 2.0
    p = VeskProblem(
        0.0, t1, h,
        kernel_eval=lambda t, s: t - s,
        rhs=h * np.arange(n + 1), sign=-1,
    )
    y = solve_vesk(p)
    err = np.max(np.abs(y - np.sinh(p.nodes())))
    assert err < 5e-5


def test_gronwall_stability():
    # |K| <= 5 on [0, 2]: solution bounded by exp(10) * max|g|
    h = 1e-2
    n = int(round(2.0 / h))
    rng = np.random.default_rng(11)
    g = rng.uniform(-1.0, 1.0, n + 1)
    p = VeskProblem(0.0, 2.0, h, lambda t, s: -5.0 * np.cos(3 * t * s), g, +1)
    y = solve_vesk(p)
    assert np.max(np.abs(y)) <= np.exp(10.0) * np.max(np.abs(g))


def test_collocation_residual_tiny():
    p = _exp_problem(2e-2)
    y = solve_vesk(p)
    assert collocation_residual(p, y) < 1e-13


def test_simpson_residual_detects_error():
    p = _exp_problem(1e-3)
    y = solve_vesk(p)
    assert vesk_residual(p, y) < 1e-5
    y_bad = y.copy()
    y_bad[len(y) // 2] += 0.1
    assert vesk_residual(p, y_bad) >= 0.05
