"""Second-kind Volterra solver: y(t) + sign * int_t0^t K(t,s) y(s) ds = g(t).

Collocation with composite-trapezoid product integration gives a dense
lower-triangular system solved by forward substitution.  Kernels are
supplied as vectorized callbacks so callers can compose shifted or
reflected transformation kernels without materializing new arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import solve_triangular

from .errors import SingularDiagonal


@dataclass
class VeskProblem:
    t0: float
    t1: float
    h: float
    kernel_eval: Callable[[np.ndarray, np.ndarray], np.ndarray]
    rhs: np.ndarray
    sign: int = 1

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("step must be positive")
        n = int(round((self.t1 - self.t0) / self.h))
        if abs(self.t0 + n * self.h - self.t1) > 1e-9 * max(1.0, abs(self.t1)):
            raise ValueError("step does not divide the interval")
        if len(self.rhs) != n + 1:
            raise ValueError("rhs length does not match the grid")

    @property
    def n(self) -> int:
        return len(self.rhs) - 1

    def nodes(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.n + 1)


def trapezoid_weights(n: int, h: float) -> np.ndarray:
    """Lower-triangular product-quadrature weights W[i, j] for int_{t0}^{t_i}."""
    w = np.tril(np.full((n + 1, n + 1), h))
    w[:, 0] = h / 2.0
    idx = np.arange(n + 1)
    w[idx, idx] = h / 2.0
    w[0, 0] = 0.0
    return w


def kernel_matrix(p: VeskProblem) -> np.ndarray:
    t = p.nodes()
    tt, ss = np.meshgrid(t, t, indexing="ij")
    k = np.asarray(p.kernel_eval(tt, ss), dtype=float)
    return np.tril(k)


def solve_vesk(p: VeskProblem) -> np.ndarray:
    """Solve the collocation equations by forward substitution."""
    n = p.n
    a = np.eye(n + 1) + p.sign * trapezoid_weights(n, p.h) * kernel_matrix(p)
    diag = np.diag(a)
    if np.min(np.abs(diag)) < 1e-12:
        raise SingularDiagonal("1 + sign*h/2*K(t,t) vanished at a node")
    return solve_triangular(a, np.asarray(p.rhs, dtype=float), lower=True)


def collocation_residual(p: VeskProblem, y: np.ndarray) -> float:
    """Residual of the solved triangular system with the same quadrature."""
    n = p.n
    a = np.eye(n + 1) + p.sign * trapezoid_weights(n, p.h) * kernel_matrix(p)
    r = a @ np.asarray(y, dtype=float) - p.rhs
    scale = max(1.0, float(np.max(np.abs(p.rhs))))
    return float(np.max(np.abs(r))) / scale


def vesk_residual(p: VeskProblem, y: np.ndarray) -> float:
    """Independent residual check: recompute the integral with Simpson quadrature."""
    t = p.nodes()
    y = np.asarray(y, dtype=float)
    worst = 0.0
    for i in range(len(t)):
        if i == 0:
            integral = 0.0
        elif i == 1:
            integral = 0.5 * p.h * (
                p.kernel_eval(t[1], t[0]) * y[0] + p.kernel_eval(t[1], t[1]) * y[1]
            )
        else:
            kv = np.asarray(p.kernel_eval(np.full(i + 1, t[i]), t[: i + 1]))
            integral = simpson(kv * y[: i + 1], dx=p.h)
        worst = max(worst, abs(y[i] + p.sign * integral - p.rhs[i]))
    return float(worst)


def convolution_matrix(w_samples: np.ndarray, h: float) -> np.ndarray:
    """Lower-triangular trapezoid matrix for (w * y)(t_i) = int_0^{t_i} w(t_i - s) y(s) ds."""
    n = len(w_samples) - 1
    i, j = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    c = np.where(j <= i, w_samples[np.clip(i - j, 0, n)], 0.0)
    return trapezoid_weights(n, h) * c
