"""Explicit finite-difference forward simulator for the lasso graph.

This is the verification oracle for every synthesized control, so it shares
no code with the kernel representations.  Leapfrog interior updates, a ghost
point for the Neumann tip, and scalar solves for the two vertices:

  tip x = l:        outward derivative = f1 (boundary+interior problem) or 0,
                    i.e. u_x(l, t) = -f1(t); ghost u(l+h) = u(l-h) - 2h f1.
  vertex x = 0:     u1(0) = u3(0) = v, u2(0) = v + f2 (plus u3 = v + f3 and a
                    flux source f1 for the three-control problem); the flux
                    balance with second-order one-sided derivatives gives a
                    scalar equation for v each step.
  artificial x = a: continuity and zero flux joining the two half-ring edges.

Conventions: all vertex derivatives point outward from the vertex into the
edge; time step dt = cfl * h.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CFLViolation, NonCommensurate
from .graph import LassoGeometry, LassoGrid, PotentialSpec
from .wave_rep import ControlTrace

P1 = "P1"
P2 = "P2"


@dataclass
class ControlSet:
    """Controls for one run: boundary f1 plus vertex jumps f2 (and f3)."""

    f1: ControlTrace | None = None
    f2: ControlTrace | None = None
    f3: ControlTrace | None = None
    problem_tag: str = P1

    def horizon(self) -> float:
        spans = [c.duration for c in (self.f1, self.f2, self.f3) if c is not None]
        return max(spans) if spans else 0.0


@dataclass
class WaveTrajectory:
    grid: LassoGrid
    t_final: float
    u_final: tuple[np.ndarray, np.ndarray, np.ndarray]
    ut_final: tuple[np.ndarray, np.ndarray, np.ndarray]
    controls: ControlSet | None = None
    snapshots: list = field(default_factory=list)
    energy: np.ndarray | None = None
    energy_times: np.ndarray | None = None
    vertex_flux_residual: float = 0.0


def final_state(traj: WaveTrajectory):
    """Final snapshot and the centered-in-time velocity estimate."""
    return traj.u_final, traj.ut_final


def _resample(trace: ControlTrace | None, dt: float, n_levels: int) -> np.ndarray:
    """Control values at t_k = k dt.

    Controls are zero outside their span, except that the first node just past
    the end is linearly extrapolated: the extra level used by the centered
    velocity estimate needs a smooth continuation, not a cutoff.
    """
    if trace is None:
        return np.zeros(n_levels)
    t = dt * np.arange(n_levels)
    vals = trace.value_at(t)
    just_past = (t > trace.duration + 1e-12) & (t <= trace.duration + 1.5 * dt)
    if np.any(just_past) and len(trace.samples) > 1:
        end = trace.samples[-1]
        slope = (trace.samples[-1] - trace.samples[-2]) / trace.h
        vals = np.where(just_past, end + slope * (t - trace.duration), vals)
    return vals


def _interior(nxt, cur, prv, q, h, dt):
    nxt[1:-1] = (
        2.0 * cur[1:-1]
        - prv[1:-1]
        + dt * dt
        * ((cur[:-2] - 2.0 * cur[1:-1] + cur[2:]) / (h * h) - q[1:-1] * cur[1:-1])
    )


def _energy(cur, nxt, q, h, dt):
    ut = (nxt - cur) / dt
    mid = 0.5 * (nxt + cur)
    ux = np.diff(mid) / h
    e = 0.5 * (
        np.trapezoid(ut**2, dx=h) + np.sum(ux**2) * h + np.trapezoid(q * mid**2, dx=h)
    )
    return e


def _flux_residual(u1, u2, u3, h, tag, f_controls, k, hgrid=None):
    """Third-order one-sided outward flux sum at the vertex (diagnostic only)."""
    def d(u):
        return (-11.0 * u[0] + 18.0 * u[1] - 9.0 * u[2] + 2.0 * u[3]) / (6.0 * h)

    total = d(u1) + d(u2) + d(u3)
    if tag == P2:
        total -= f_controls
    return abs(total)


def simulate_p1(
    geom: LassoGeometry,
    q: PotentialSpec,
    controls: ControlSet,
    T: float,
    grid: LassoGrid,
    store_stride: int = 0,
    initial=None,
) -> WaveTrajectory:
    return _simulate(geom, q, controls, T, grid, P1, store_stride, initial)


def simulate_p2(
    geom: LassoGeometry,
    q: PotentialSpec,
    controls: ControlSet,
    T: float,
    grid: LassoGrid,
    store_stride: int = 0,
    initial=None,
) -> WaveTrajectory:
    return _simulate(geom, q, controls, T, grid, P2, store_stride, initial)


def simulate_free(
    geom: LassoGeometry,
    q: PotentialSpec,
    phi1,
    phi2,
    T: float,
    grid: LassoGrid,
    store_stride: int = 0,
) -> WaveTrajectory:
    """Uncontrolled evolution from initial state (phi1, phi2)."""
    return _simulate(
        geom, q, ControlSet(problem_tag=P1), T, grid, P1, store_stride, (phi1, phi2)
    )


def _simulate(geom, q, controls, T, grid, tag, store_stride, initial):
    h, dt = grid.h, grid.dt
    if dt > h + 1e-15:
        raise CFLViolation(f"dt = {dt} exceeds h = {h}")
    n1, n2 = grid.n1, grid.n2
    m_steps = int(round(T / dt))
    if abs(m_steps * dt - T) > 1e-9 * max(1.0, T):
        raise NonCommensurate("T is not a multiple of dt")

    f1 = _resample(controls.f1, dt, m_steps + 2)
    f2 = _resample(controls.f2, dt, m_steps + 2)
    f3 = _resample(controls.f3, dt, m_steps + 2)

    q1, q2, q3 = q.q1, q.q2, q.q3

    if initial is None:
        u1p, u2p, u3p = np.zeros(n1 + 1), np.zeros(n2 + 1), np.zeros(n2 + 1)
        u1c, u2c, u3c = np.zeros(n1 + 1), np.zeros(n2 + 1), np.zeros(n2 + 1)
        _apply_vertices(u1c, u2c, u3c, tag, f1[1], f2[1], f3[1], h)
        if tag == P1:
            # from rest the tip moves like the running integral of the drive
            u1c[n1] = -0.5 * dt * (f1[0] + f1[1])
    else:
        phi1, phi2 = initial
        u1p, u2p, u3p = (np.asarray(a, dtype=float).copy() for a in phi1)
        v1, v2, v3 = (np.asarray(a, dtype=float) for a in phi2)
        u1c = _taylor_start(u1p, v1, q1, h, dt, tip="neumann0")
        u2c = _taylor_start(u2p, v2, q2, h, dt)
        u3c = _taylor_start(u3p, v3, q3, h, dt)
        _apply_vertices(u1c, u2c, u3c, tag, f1[1], f2[1], f3[1], h)
        _apply_artificial(u2c, u3c)

    snapshots = []
    energies = []
    energy_times = []
    flux_worst = 0.0

    if store_stride:
        snapshots.append((0.0, u1p.copy(), u2p.copy(), u3p.copy()))

    u_final = None
    u_before = None
    u_after = None

    for k in range(1, m_steps + 1):
        # at loop entry: u*c holds level k, u*p holds level k - 1
        u1n = np.empty(n1 + 1)
        u2n = np.empty(n2 + 1)
        u3n = np.empty(n2 + 1)
        _interior(u1n, u1c, u1p, q1, h, dt)
        _interior(u2n, u2c, u2p, q2, h, dt)
        _interior(u3n, u3c, u3p, q3, h, dt)

        # pendant tip: ghost point with outward-derivative data
        tip_drive = f1[k] if tag == P1 else 0.0
        u1n[n1] = (
            2.0 * u1c[n1]
            - u1p[n1]
            + dt * dt
            * (
                (2.0 * u1c[n1 - 1] - 2.0 * u1c[n1] - 2.0 * h * tip_drive) / (h * h)
                - q1[n1] * u1c[n1]
            )
        )

        _apply_artificial(u2n, u3n)
        _apply_vertices(u1n, u2n, u3n, tag, f1[k + 1], f2[k + 1], f3[k + 1], h)

        if k == m_steps:
            u_final = (u1c.copy(), u2c.copy(), u3c.copy())
            u_before = (u1p.copy(), u2p.copy(), u3p.copy())
            u_after = (u1n, u2n, u3n)

        if store_stride and (k % store_stride == 0 or k == m_steps):
            snapshots.append((k * dt, u1c.copy(), u2c.copy(), u3c.copy()))
            energies.append(
                _energy(u1c, u1n, q1, h, dt)
                + _energy(u2c, u2n, q2, h, dt)
                + _energy(u3c, u3n, q3, h, dt)
            )
            energy_times.append((k + 0.5) * dt)
        if n1 >= 3 and n2 >= 3:
            flux_worst = max(
                flux_worst,
                _flux_residual(u1n, u2n, u3n, h, tag, f1[k + 1], k),
            )

        u1p, u1c = u1c, u1n
        u2p, u2c = u2c, u2n
        u3p, u3c = u3c, u3n

    if u_final is None:
        # m_steps == 0: the state is the initial one
        u_final = (u1p.copy(), u2p.copy(), u3p.copy())
        ut_final = (np.zeros(n1 + 1), np.zeros(n2 + 1), np.zeros(n2 + 1))
    else:
        ut_final = tuple(
            (nxt - prv) / (2.0 * dt) for nxt, prv in zip(u_after, u_before)
        )

    return WaveTrajectory(
        grid=grid,
        t_final=T,
        u_final=u_final,
        ut_final=ut_final,
        controls=controls,
        snapshots=snapshots,
        energy=np.asarray(energies) if energies else None,
        energy_times=np.asarray(energy_times) if energy_times else None,
        vertex_flux_residual=flux_worst,
    )


def _taylor_start(u0, v0, qe, h, dt, tip=None):
    """First leapfrog level from initial displacement and velocity."""
    u1 = u0 + dt * v0
    lap = np.zeros_like(u0)
    lap[1:-1] = (u0[:-2] - 2.0 * u0[1:-1] + u0[2:]) / (h * h)
    if tip == "neumann0":
        lap[-1] = (2.0 * u0[-2] - 2.0 * u0[-1]) / (h * h)
    u1 += 0.5 * dt * dt * (lap - qe * u0)
    return u1


def _apply_artificial(u2, u3):
    w = (4.0 * (u2[-2] + u3[-2]) - (u2[-3] + u3[-3])) / 6.0
    u2[-1] = w
    u3[-1] = w


def _apply_vertices(u1, u2, u3, tag, f1_val, f2_val, f3_val, h):
    s = 4.0 * (u1[1] + u2[1] + u3[1]) - (u1[2] + u2[2] + u3[2])
    if tag == P1:
        v = (s - 3.0 * f2_val) / 9.0
        u1[0] = v
        u2[0] = v + f2_val
        u3[0] = v
    else:
        v = (s - 3.0 * (f2_val + f3_val) - 2.0 * h * f1_val) / 9.0
        u1[0] = v
        u2[0] = v + f2_val
        u3[0] = v + f3_val


class IntervalRun:
    """Full space-time history of a single-edge run, for oracle comparisons."""

    def __init__(self, h, dt, history):
        self.h = h
        self.dt = dt
        self.history = history  # shape (levels, nodes)

    def eval(self, x, t):
        fi = t / self.dt
        fj = x / self.h
        i0 = min(int(fi), self.history.shape[0] - 2)
        j0 = min(int(fj), self.history.shape[1] - 2)
        di, dj = fi - i0, fj - j0
        hmat = self.history
        return float(
            hmat[i0, j0] * (1 - di) * (1 - dj)
            + hmat[i0 + 1, j0] * di * (1 - dj)
            + hmat[i0, j0 + 1] * (1 - di) * dj
            + hmat[i0 + 1, j0 + 1] * di * dj
        )


def simulate_interval(
    q_samples: np.ndarray,
    length: float,
    T: float,
    left: tuple,
    right: tuple,
    cfl: float = 0.5,
) -> IntervalRun:
    """Oracle run on a single interval (0, length) from rest.

    left/right are ('dirichlet', trace) or ('neumann', trace) with trace the
    plain u_x data at that end (None means homogeneous).  Zero initial data.
    """
    q_samples = np.asarray(q_samples, dtype=float)
    n = len(q_samples) - 1
    h = length / n
    dt = cfl * h
    m_steps = int(round(T / dt))
    kind_l, trace_l = left
    kind_r, trace_r = right
    gl = _resample(trace_l, dt, m_steps + 1)
    gr = _resample(trace_r, dt, m_steps + 1)

    hist = np.zeros((m_steps + 1, n + 1))
    up = np.zeros(n + 1)
    uc = np.zeros(n + 1)
    if m_steps >= 1:
        if kind_l == "dirichlet":
            uc[0] = gl[1]
        else:
            uc[0] = -0.5 * dt * (gl[0] + gl[1])
        if kind_r == "dirichlet":
            uc[-1] = gr[1]
        else:
            uc[-1] = 0.5 * dt * (gr[0] + gr[1])
        hist[1] = uc

    for k in range(1, m_steps):
        un = np.empty(n + 1)
        _interior(un, uc, up, q_samples, h, dt)
        if kind_l == "dirichlet":
            un[0] = gl[k + 1]
        else:
            un[0] = (
                2.0 * uc[0]
                - up[0]
                + dt * dt
                * ((2.0 * uc[1] - 2.0 * uc[0] - 2.0 * h * gl[k]) / (h * h) - q_samples[0] * uc[0])
            )
        if kind_r == "dirichlet":
            un[-1] = gr[k + 1]
        else:
            un[-1] = (
                2.0 * uc[-1]
                - up[-1]
                + dt * dt
                * ((2.0 * uc[-2] - 2.0 * uc[-1] + 2.0 * h * gr[k]) / (h * h) - q_samples[-1] * uc[-1])
            )
        hist[k + 1] = un
        up, uc = uc, un

    return IntervalRun(h, dt, hist)
