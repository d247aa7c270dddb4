import numpy as np
import pytest

from lassowave.fdsim import simulate_interval
from lassowave.graph import extend_potential_folded
from lassowave.kernels import (
    DIRICHLET,
    NEUMANN,
    solve_goursat_kind,
    solve_goursat_reflected_neumann,
)
from lassowave.wave_rep import (
    ControlTrace,
    eval_halfline_dirichlet,
    eval_halfline_neumann,
    eval_interval_folded,
    eval_interval_neumann_control,
    make_neumann_drive,
)


def smooth_trace(duration, n, seed=0, amplitude=1.0):
    """Random band-limited control vanishing to second order at t = 0."""
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, duration, n + 1)
    vals = np.zeros(n + 1)
    for k in range(1, 5):
        vals += rng.standard_normal() * np.sin(np.pi * k * t / duration)
    vals *= (t / duration) ** 2 * amplitude
    return ControlTrace(vals, duration / n)


def test_halfline_dirichlet_dalembert():
    n = 200
    kernel = solve_goursat_kind(np.zeros(n + 1), DIRICHLET, 2.0)
    g = smooth_trace(2.0, n, seed=1)
    for (x, t) in [(0.3, 1.1), (0.7, 1.9), (0.05, 0.4)]:
        assert eval_halfline_dirichlet(kernel, g, x, t) == pytest.approx(
            float(g.value_at(t - x)), abs=1e-12
        )


def test_halfline_causality():
    n = 100
    kernel = solve_goursat_kind(np.full(n + 1, 1.0), DIRICHLET, 1.0)
    g = smooth_trace(1.0, n, seed=2)
    assert eval_halfline_dirichlet(kernel, g, 0.8, 0.5) == 0.0
    assert eval_halfline_dirichlet(kernel, g, 0.5, 0.5) == 0.0


def test_halfline_dirichlet_vs_fd():
    # q = 1, g(t) = t^2, value at (0.5, 1.5)
    horizon = 2.0
    x_eval, t_eval = 0.5, 1.5
    errs = []
    for n_per_unit in (100, 200):
        n = int(horizon * n_per_unit)
        q = np.full(n + 1, 1.0)
        kernel = solve_goursat_kind(q, DIRICHLET, horizon)
        tt = np.linspace(0, horizon, n + 1)
        g = ControlTrace(tt**2, horizon / n)
        mine = eval_halfline_dirichlet(kernel, g, x_eval, t_eval)
        length = 2.5  # far end never influences (x, t): 2*2.5 - 0.5 > 1.5
        nn = int(length * n_per_unit)
        run = simulate_interval(
            np.full(nn + 1, 1.0), length, t_eval, ("dirichlet", g), ("dirichlet", None)
        )
        errs.append(abs(mine - run.eval(x_eval, t_eval)))
    assert errs[0] > 0  # nontrivial comparison
    assert errs[1] < errs[0] / 2.5  # second-order decay
    assert errs[1] < 5e-4


def test_halfline_neumann_pure_integral():
    # beta = (0, 1), q = 0: u(x, t) = -int_0^{t-x} g
    n = 400
    kernel = solve_goursat_kind(np.zeros(n + 1), NEUMANN, 2.0)
    g = smooth_trace(2.0, n, seed=3)
    x, t = 0.4, 1.7
    expected = -np.trapezoid(
        g.value_at(np.linspace(0, t - x, 2001)), dx=(t - x) / 2000
    )
    assert eval_halfline_neumann(kernel, g, (0, 1), x, t) == pytest.approx(
        expected, abs=1e-6
    )
    # zero drive gives zero
    zero = ControlTrace(np.zeros(n + 1), g.h)
    assert eval_halfline_neumann(kernel, zero, (0, 1), x, t) == 0.0


def test_neumann_drive_recursion_matches_closed_form():
    # with g = const and beta = (0.6, 0.8): f(t) = -(g/b1)(exp(mu t) - 1)
    n = 200
    h = 1.0 / n
    g = ControlTrace(np.full(n + 1, 2.0), h)
    b1, b2 = 0.6, 0.8
    f = make_neumann_drive(g, (b1, b2))
    t = f.nodes()
    mu = b1 / b2
    exact = -(2.0 / b1) * (np.exp(mu * t) - 1.0)
    assert np.max(np.abs(f.samples - exact)) < 2e-4


def test_halfline_neumann_vs_fd():
    # beta = (0, 1), q = 1, g = 1 on [0, 1]: value at (0.25, 1.0)
    horizon = 1.5
    x_eval, t_eval = 0.25, 1.0
    errs = []
    for n_per_unit in (100, 200):
        n = int(horizon * n_per_unit)
        kernel = solve_goursat_kind(np.full(n + 1, 1.0), NEUMANN, horizon)
        ng = int(1.0 * n_per_unit)
        g = ControlTrace(np.ones(ng + 1), 1.0 / ng)
        mine = eval_halfline_neumann(kernel, g, (0, 1), x_eval, t_eval)
        length = 1.0
        nn = int(length * n_per_unit)
        run = simulate_interval(
            np.full(nn + 1, 1.0), length, t_eval, ("neumann", g), ("dirichlet", None)
        )
        errs.append(abs(mine - run.eval(x_eval, t_eval)))
    assert errs[1] < errs[0] / 2.0
    assert errs[1] < 2e-3


def test_folded_first_reflection_signs():
    l = 1.0
    n = 400
    horizon = 4.0
    q_ext = np.zeros(n + 1)
    kernel = solve_goursat_kind(q_ext, DIRICHLET, horizon)
    g = smooth_trace(4.0, 800, seed=4)
    x, t = 0.4, 1.8  # t < 2l - x + 2l: only first reflection active
    u_d = eval_interval_folded(kernel, g, "dirichlet", l, x, t)
    u_n = eval_interval_folded(kernel, g, "neumann", l, x, t)
    direct = float(g.value_at(t - x))
    refl = float(g.value_at(t - 2 * l + x))
    assert u_d == pytest.approx(direct - refl, abs=1e-12)
    assert u_n == pytest.approx(direct + refl, abs=1e-12)


def test_folded_neumann_sign_pattern_late_times():
    # q = 0, t in (2l + x, 4l - x): images x (+), 2l-x (+), 2l+x (-)
    l = 1.0
    n = 400
    kernel = solve_goursat_kind(np.zeros(n + 1), DIRICHLET, 6.0)
    g = smooth_trace(6.0, 1200, seed=5)
    x, t = 0.3, 2.9
    u_n = eval_interval_folded(kernel, g, "neumann", l, x, t)
    expected = (
        float(g.value_at(t - x))
        + float(g.value_at(t - 2 * l + x))
        - float(g.value_at(t - 2 * l - x))
    )
    assert u_n == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("right_bc", ["dirichlet", "neumann"])
def test_folded_vs_fd_late_times(right_bc):
    # the image series must track the simulator well beyond t = 2l
    l = 1.0
    t_eval, x_eval = 3.7, 0.3
    errs = []
    for n_per_unit in (100, 200):
        n_l = int(l * n_per_unit)
        x_edge = np.linspace(0, l, n_l + 1)
        q_edge = np.sin(np.pi * x_edge)
        q_ext = extend_potential_folded(q_edge, l, 4.0)
        kernel = solve_goursat_kind(q_ext, DIRICHLET, 4.0)
        g = smooth_trace(4.0, 4 * n_per_unit, seed=6)
        mine = eval_interval_folded(kernel, g, right_bc, l, x_eval, t_eval)
        run = simulate_interval(
            q_edge, l, t_eval, ("dirichlet", g), (right_bc, None)
        )
        errs.append(abs(mine - run.eval(x_eval, t_eval)))
    assert errs[1] < errs[0] / 2.5
    assert errs[1] < 5e-4


def test_neumann_control_causality_and_leading_term():
    l = 1.0
    n = 200
    w = solve_goursat_reflected_neumann(np.zeros(n + 1), l, 3.0)
    p = smooth_trace(3.0, 600, seed=7)
    big_p = -np.append(0.0, np.cumsum(0.5 * (p.samples[1:] + p.samples[:-1]) * p.h))
    x = 0.5
    # before the wave arrives: zero
    assert eval_interval_neumann_control(w, p, l, x, 0.3) == 0.0
    # after first arrival, before the reflection at 0 returns: P(t - l + x)
    t = 0.9
    idx = t - l + x
    expected = np.interp(idx, p.nodes(), big_p)
    assert eval_interval_neumann_control(w, p, l, x, t) == pytest.approx(
        expected, abs=1e-12
    )


def test_neumann_control_vs_fd():
    # q = 1, p = 1 on [0, 0.5], outward-derivative control: u_x(l, t) = -p(t)
    l = 1.0
    x_eval, t_eval = 0.5, 2.2
    errs = []
    for n_per_unit in (100, 200):
        n_l = int(l * n_per_unit)
        q_edge = np.full(n_l + 1, 1.0)
        w = solve_goursat_reflected_neumann(q_edge, l, 3.0)
        n_p = n_per_unit // 2
        p = ControlTrace(np.ones(n_p + 1), 0.5 / n_p)
        mine = eval_interval_neumann_control(w, p, l, x_eval, t_eval)
        minus_p = ControlTrace(-p.samples, p.h)
        run = simulate_interval(
            q_edge, l, t_eval, ("dirichlet", None), ("neumann", minus_p)
        )
        errs.append(abs(mine - run.eval(x_eval, t_eval)))
    assert errs[1] < errs[0] / 2.0
    assert errs[1] < 2e-3


def test_linearity():
    n = 200
    x_nodes = np.linspace(0, 2.0, n + 1)
    kernel = solve_goursat_kind(1.0 + 0.3 * np.sin(2 * x_nodes), DIRICHLET, 2.0)
    g1 = smooth_trace(2.0, n, seed=8)
    g2 = smooth_trace(2.0, n, seed=9)
    a, b = 2.0, -0.7
    combo = ControlTrace(a * g1.samples + b * g2.samples, g1.h)
    x, t = 0.6, 1.8
    lhs = eval_halfline_dirichlet(kernel, combo, x, t)
    rhs = a * eval_halfline_dirichlet(kernel, g1, x, t) + b * eval_halfline_dirichlet(
        kernel, g2, x, t
    )
    assert lhs == pytest.approx(rhs, abs=1e-12)
