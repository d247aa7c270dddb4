"""Transformation kernels k(x, s) for the wave operator on a half line.

The kernel solves, on the triangle 0 <= x <= s <= horizon,

    k_ss - k_xx + q(x) k = 0,
    beta1 k(0, s) + beta2 k_x(0, s) = 0,
    k(x, x) = -(1/2) int_0^x q,

with (beta1, beta2) restricted to pure Dirichlet (1, 0) or Neumann (0, 1).

Numerical scheme: rotate to characteristic coordinates xi = (s + x)/2,
eta = (s - x)/2.  The boundary condition at x = 0 is absorbed by reflecting
the problem to x < 0 (odd reflection for Dirichlet, even for Neumann),
which turns the mixed problem into a pure characteristic problem on the
quarter plane xi, eta >= 0 with data on both axes:

    K(xi, eta) = A(xi) + B(eta) - int_0^xi int_0^eta q(|xi'-eta'|) K dxi' deta'

where A = -(1/2) Q on the diagonal and B = -+ (1/2) Q on the reflected axis
(Q the antiderivative of the evenly extended potential).  The double-integral
equation is solved by successive approximation with two-dimensional
trapezoid quadrature; the iteration is unconditionally convergent for
bounded q on a bounded horizon.  The characteristic grid uses step h/2 so
every (x, s) node of the physical h-grid is a characteristic grid point.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import HorizonExceeded, NonFinite, UnsupportedBC
from .graph import extend_potential_folded

DIRICHLET = "dirichlet"
NEUMANN = "neumann"

_MAX_ITER = 50
_TOL = 1e-12


@dataclass
class Kernel:
    """Resolved kernel on the triangle 0 <= x <= s <= horizon at step h.

    values[i, j] ~ k(x_i, s_j) for j >= i; the first subdiagonal holds a
    linear extrapolation so bilinear interpolation stays second order up to
    the diagonal.  diag_trace[i] = k(x_i, x_i) exactly at nodes.
    """

    h: float
    horizon: float
    bc_kind: str
    values: np.ndarray
    diag_trace: np.ndarray
    q_ext: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0] - 1

    def _check_horizon(self, s) -> None:
        if np.max(s) > self.horizon + 1e-9 * max(1.0, self.horizon):
            raise HorizonExceeded(
                f"s = {np.max(s):.6g} beyond kernel horizon {self.horizon:.6g}"
            )

    def eval(self, x, s) -> np.ndarray:
        """Bilinear kernel evaluation; zero for s < x (outside the triangle)."""
        x = np.asarray(x, dtype=float)
        s = np.asarray(s, dtype=float)
        self._check_horizon(s)
        x, s = np.broadcast_arrays(x, s)
        fi = np.clip(x / self.h, 0.0, self.n)
        fj = np.clip(s / self.h, 0.0, self.n)
        i0 = np.minimum(fi.astype(int), self.n - 1)
        j0 = np.minimum(fj.astype(int), self.n - 1)
        di = fi - i0
        dj = fj - j0
        v = self.values
        out = (
            v[i0, j0] * (1 - di) * (1 - dj)
            + v[i0 + 1, j0] * di * (1 - dj)
            + v[i0, j0 + 1] * (1 - di) * dj
            + v[i0 + 1, j0 + 1] * di * dj
        )
        return np.where(s >= x - 1e-12, out, 0.0)

    def deriv_x(self, x, s) -> np.ndarray:
        """d k / d x, centered where possible, one-sided toward the diagonal."""
        x = np.asarray(x, dtype=float)
        s = np.asarray(s, dtype=float)
        x, s = np.broadcast_arrays(x, s)
        h = self.h
        centered_ok = (x + h <= s + 1e-12) & (x - h >= -1e-12)
        xc = np.where(centered_ok, x, h)
        central = (self.eval(xc + h, s) - self.eval(xc - h, s)) / (2 * h)
        xb = np.where(x - 2 * h >= -1e-12, x, 2 * h)
        backward = (
            3 * self.eval(xb, s) - 4 * self.eval(xb - h, s) + self.eval(xb - 2 * h, s)
        ) / (2 * h)
        return np.where(centered_ok, central, backward)

    def diag_at(self, x) -> np.ndarray:
        """k(x, x) by linear interpolation of the nodal diagonal."""
        grid = self.h * np.arange(self.n + 1)
        return np.interp(np.asarray(x, dtype=float), grid, self.diag_trace)


def _cumtrap2d(f: np.ndarray, delta: float) -> np.ndarray:
    c = np.cumsum(f, axis=0)
    c = delta * (c - 0.5 * f - 0.5 * f[0:1, :])
    c2 = np.cumsum(c, axis=1)
    return delta * (c2 - 0.5 * c - 0.5 * c[:, 0:1])


def solve_goursat(q_ext: np.ndarray, bc: tuple[float, float], horizon: float) -> Kernel:
    """Resolve the kernel for an extended potential sampled on [0, horizon].

    bc must be (1, 0) for Dirichlet or (0, 1) for Neumann; the general mixed
    condition is not part of the solver.
    """
    if tuple(bc) == (1, 0):
        bc_kind = DIRICHLET
    elif tuple(bc) == (0, 1):
        bc_kind = NEUMANN
    else:
        raise UnsupportedBC(f"only (1,0) or (0,1) supported, got {bc}")
    return _solve(np.asarray(q_ext, dtype=float), bc_kind, horizon)


def solve_goursat_kind(q_ext: np.ndarray, bc_kind: str, horizon: float) -> Kernel:
    if bc_kind not in (DIRICHLET, NEUMANN):
        raise UnsupportedBC(bc_kind)
    return _solve(np.asarray(q_ext, dtype=float), bc_kind, horizon)


def _solve(q_ext: np.ndarray, bc_kind: str, horizon: float) -> Kernel:
    n = len(q_ext) - 1
    if n < 1 or horizon <= 0:
        raise ValueError("need at least two potential samples and a positive horizon")
    h = horizon / n
    delta = 0.5 * h
    nd = 2 * n

    # potential and its antiderivative on the half-step characteristic grid
    xg = h * np.arange(n + 1)
    xd = delta * np.arange(nd + 1)
    qd = np.interp(xd, xg, q_ext)
    big_q = cumulative_trapezoid(qd, dx=delta, initial=0.0)

    a_vec = -0.5 * big_q
    b_vec = 0.5 * big_q if bc_kind == DIRICHLET else -0.5 * big_q

    if not np.any(q_ext):
        k_char = np.zeros((nd + 1, nd + 1))
    else:
        k0 = a_vec[:, None] + b_vec[None, :]
        idx = np.abs(np.arange(nd + 1)[:, None] - np.arange(nd + 1)[None, :])
        qmat = qd[idx]
        k_char = k0.copy()
        scale = max(1.0, float(np.max(np.abs(k0))))
        for _ in range(_MAX_ITER):
            k_new = k0 - _cumtrap2d(qmat * k_char, delta)
            if not np.all(np.isfinite(k_new)):
                raise NonFinite("successive approximation diverged")
            change = float(np.max(np.abs(k_new - k_char)))
            k_char = k_new
            if change < _TOL * scale:
                break
        # the exact solution is (anti)symmetric under (xi, eta) swap; enforce it
        if bc_kind == DIRICHLET:
            k_char = 0.5 * (k_char - k_char.T)
        else:
            k_char = 0.5 * (k_char + k_char.T)

    # read the physical triangle off the characteristic grid
    ii, jj = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    values = np.where(jj >= ii, k_char[ii + jj, jj - ii], 0.0)
    if bc_kind == DIRICHLET:
        values[0, :] = 0.0
    # first subdiagonal: linear extrapolation keeps bilinear cells second order
    if n >= 2:
        i = np.arange(0, n - 1)
        values[i + 1, i] = 2.0 * values[i + 1, i + 1] - values[i + 1, i + 2]
    values[n, n - 1] = values[n, n]

    diag = -0.5 * big_q[::2]
    return Kernel(
        h=h, horizon=horizon, bc_kind=bc_kind, values=values,
        diag_trace=diag, q_ext=q_ext.copy(),
    )


def solve_goursat_reflected_neumann(q1: np.ndarray, edge_length: float, horizon: float) -> Kernel:
    """Kernel w for a Neumann condition at the far edge end.

    Built from the reversed potential q~(x) = q(edge_length - x), extended
    evenly about the edge end and periodically, with a Neumann condition at 0.
    """
    q_rev = np.asarray(q1, dtype=float)[::-1]
    q_ext = extend_potential_folded(q_rev, edge_length, horizon)
    return solve_goursat_kind(q_ext, NEUMANN, horizon)


def normal_derivative_at_zero(kernel: Kernel) -> np.ndarray:
    """Samples of r(s) = d_x k(0, s) on the s-grid.

    Neumann kernels return exact zeros (that is the boundary condition).
    Dirichlet kernels use the one-sided second-order stencil in x; the first
    two nodes, where the stencil does not fit in the triangle, come from the
    corner limit r(0) = -q(0)/2 and linear extrapolation.
    """
    n = kernel.n
    r = np.zeros(n + 1)
    if kernel.bc_kind == NEUMANN:
        return r
    v = kernel.values
    h = kernel.h
    j = np.arange(2, n + 1)
    r[j] = (-3.0 * v[0, j] + 4.0 * v[1, j] - v[2, j]) / (2.0 * h)
    r[0] = -0.5 * kernel.q_ext[0]
    if n >= 3:
        r[1] = 2.0 * r[2] - r[3]
    elif n >= 2:
        r[1] = r[2]
    return r


def export_csv(kernel: Kernel, path) -> None:
    """Dump the resolved triangle as (x, s, k) rows, for debugging."""
    with open(path, "w") as fh:
        fh.write("x,s,k\n")
        for i in range(kernel.n + 1):
            for j in range(i, kernel.n + 1):
                fh.write(
                    f"{i * kernel.h:.17g},{j * kernel.h:.17g},{kernel.values[i, j]:.17g}\n"
                )


def _cache_key(q_ext: np.ndarray, bc_kind: str, h: float, horizon: float) -> str:
    digest = hashlib.sha1()
    digest.update(np.ascontiguousarray(q_ext).tobytes())
    digest.update(f"|{bc_kind}|{h:.17g}|{horizon:.17g}".encode())
    return digest.hexdigest()


class KernelCache:
    """Binary on-disk cache keyed by (potential hash, bc, step, horizon)."""

    def __init__(self, directory):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    def get_or_build(self, q_ext: np.ndarray, bc_kind: str, horizon: float) -> Kernel:
        q_ext = np.asarray(q_ext, dtype=float)
        h = horizon / (len(q_ext) - 1)
        key = _cache_key(q_ext, bc_kind, h, horizon)
        path = os.path.join(self.directory, f"kernel-{key}.npz")
        if os.path.exists(path):
            data = np.load(path)
            return Kernel(
                h=float(data["h"]), horizon=float(data["horizon"]),
                bc_kind=str(data["bc_kind"]), values=data["values"],
                diag_trace=data["diag_trace"], q_ext=data["q_ext"],
            )
        kernel = solve_goursat_kind(q_ext, bc_kind, horizon)
        np.savez_compressed(
            path, h=kernel.h, horizon=kernel.horizon, bc_kind=kernel.bc_kind,
            values=kernel.values, diag_trace=kernel.diag_trace, q_ext=kernel.q_ext,
        )
        return kernel
