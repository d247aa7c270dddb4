"""Closed-form solution representations driven by transformation kernels.

All formulas share one building block: a boundary trace convolved with a
kernel slice,  g(t - z) + int_z^t k(z, s) g(t - s) ds,  summed over image
points z produced by reflections.  Traces vanish for negative arguments, so
every representation is causal: a point x is exactly zero until the first
image reaches it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import BadBC
from .kernels import Kernel

L2 = "L2"
H1_ZERO_START = "H1_zero_start"
H1_ZERO_BOTH = "H1_zero_both"

_ENDPOINT_SNAP = 1e-9


@dataclass
class ControlTrace:
    """A control sampled uniformly on [0, n*h]; zero outside that interval."""

    samples: np.ndarray
    h: float
    regularity_tag: str = L2
    cumulative: np.ndarray | None = None

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        scale = max(1.0, float(np.max(np.abs(self.samples))) if len(self.samples) else 1.0)
        if self.regularity_tag in (H1_ZERO_START, H1_ZERO_BOTH):
            if abs(self.samples[0]) > _ENDPOINT_SNAP * scale:
                raise ValueError("H1 trace with zero start must begin at 0")
            self.samples[0] = 0.0
        if self.regularity_tag == H1_ZERO_BOTH:
            if abs(self.samples[-1]) > _ENDPOINT_SNAP * scale:
                raise ValueError("H1_0 trace must end at 0")
            self.samples[-1] = 0.0

    @property
    def duration(self) -> float:
        return self.h * (len(self.samples) - 1)

    def nodes(self) -> np.ndarray:
        return self.h * np.arange(len(self.samples))

    def value_at(self, t) -> np.ndarray:
        """Linear interpolation; identically zero outside [0, duration]."""
        t = np.asarray(t, dtype=float)
        inside = (t >= 0.0) & (t <= self.duration)
        v = np.interp(t, self.nodes(), self.samples, left=0.0, right=0.0)
        return np.where(inside, v, 0.0)

    def cumulative_trace(self) -> "ControlTrace":
        """Running integral as a new trace (trapezoid, exact on the grid)."""
        if self.cumulative is None:
            cum = cumulative_trapezoid(self.samples, dx=self.h, initial=0.0)
        else:
            cum = self.cumulative
        return ControlTrace(cum, self.h, H1_ZERO_START)

    @staticmethod
    def zeros(n: int, h: float, tag: str = L2) -> "ControlTrace":
        return ControlTrace(np.zeros(n + 1), h, tag)


def _kernel_term(kernel: Kernel, image: float, trace: ControlTrace, t: float) -> float:
    """g(t - image) + int_image^t k(image, s) g(t - s) ds."""
    direct = float(trace.value_at(t - image))
    span = t - image
    if span <= 0:
        return direct
    m = max(1, int(round(span / kernel.h)))
    s = np.linspace(image, t, m + 1)
    vals = kernel.eval(image, s) * trace.value_at(t - s)
    return direct + float(np.trapezoid(vals, dx=span / m))


def eval_halfline_dirichlet(kernel: Kernel, g: ControlTrace, x: float, t: float) -> float:
    """u(x, t) for the half line with u(0, t) = g(t); zero for x >= t."""
    if x >= t:
        return 0.0
    return _kernel_term(kernel, x, g, t)


def pad_to(trace: ControlTrace, t_max: float) -> ControlTrace:
    """Extend a trace by zeros so its grid covers [0, t_max]."""
    if t_max <= trace.duration + 1e-12:
        return trace
    extra = int(np.ceil((t_max - trace.duration) / trace.h - 1e-9))
    samples = np.concatenate([trace.samples, np.zeros(extra)])
    return ControlTrace(samples, trace.h, trace.regularity_tag)


def make_neumann_drive(
    g: ControlTrace, beta: tuple[float, float], t_max: float | None = None
) -> ControlTrace:
    """Trace f with beta2 f' - beta1 f = -g, f(0) = 0 (trapezoid-exact recursion).

    The drive keeps evolving after the data stops, so the grid is extended to
    t_max before integrating.
    """
    b1, b2 = beta
    if b2 == 0:
        raise BadBC("beta2 must be nonzero for Neumann or mixed data")
    if t_max is not None:
        g = pad_to(g, t_max)
    mu = b1 / b2
    e = np.exp(mu * g.h)
    f = np.zeros_like(g.samples)
    for i in range(1, len(f)):
        f[i] = e * f[i - 1] - (g.h / (2 * b2)) * (g.samples[i] + e * g.samples[i - 1])
    return ControlTrace(f, g.h, H1_ZERO_START)


def eval_halfline_neumann(
    kernel: Kernel, g: ControlTrace, beta: tuple[float, float], x: float, t: float
) -> float:
    """u(x, t) for the half line with beta1 u(0,t) + beta2 u_x(0,t) = g(t)."""
    if x >= t:
        return 0.0
    f = make_neumann_drive(g, beta, t_max=t)
    return _kernel_term(kernel, x, f, t)


def folded_images(l: float, x: float, t: float, right_bc: str):
    """Image points and signs for an interval (0, l) with data at x = 0.

    Dirichlet far end: + for 2nl + x, - for 2nl - x.
    Neumann far end: the reflected wave keeps its sign at x = l and flips at
    x = 0, so the signs alternate in pairs: (2nl + x) carries (-1)^n and
    (2nl - x) carries (-1)^(n+1).
    """
    out = []
    n = 0
    while True:
        plus = 2 * n * l + x
        minus = 2 * n * l - x
        any_in = False
        if plus <= t:
            sign = 1.0 if right_bc == "dirichlet" else (-1.0) ** n
            out.append((plus, sign))
            any_in = True
        if n >= 1 and minus <= t:
            sign = -1.0 if right_bc == "dirichlet" else (-1.0) ** (n + 1)
            out.append((minus, sign))
            any_in = True
        if not any_in and 2 * n * l - abs(x) > t:
            break
        n += 1
    return out


def eval_interval_folded(
    kernel: Kernel, h_trace: ControlTrace, right_bc: str, l: float, x: float, t: float
) -> float:
    """u(x, t) on (0, l) with u(0, t) = h(t) and a homogeneous far end.

    The kernel must come from the evenly-about-l, periodically extended
    potential.  right_bc is 'dirichlet' or 'neumann'.
    """
    if right_bc not in ("dirichlet", "neumann"):
        raise BadBC(right_bc)
    total = 0.0
    for image, sign in folded_images(l, x, t, right_bc):
        total += sign * _kernel_term(kernel, image, h_trace, t)
    return total


def neumann_control_images(l: float, x: float, t: float):
    """Images (2m+1)l -+ x with signs (-1)^m and (-1)^(m+1)."""
    out = []
    m = 0
    while (2 * m + 1) * l - x <= t:
        near = (2 * m + 1) * l - x
        far = (2 * m + 1) * l + x
        out.append((near, (-1.0) ** m))
        if far <= t:
            out.append((far, (-1.0) ** (m + 1)))
        m += 1
    return out


def eval_interval_neumann_control(
    w_kernel: Kernel, p: ControlTrace, l: float, x: float, t: float
) -> float:
    """u(x, t) on (0, l): u(0, t) = 0, outward derivative p(t) applied at x = l.

    Uses the reflected-potential kernel w and the running integral
    P(t) = -int_0^t p.  The control is the derivative pointing from the
    boundary into the edge, i.e. u_x(l, t) = -p(t).
    """
    padded = pad_to(p, t)
    big_p = ControlTrace(
        -cumulative_trapezoid(padded.samples, dx=padded.h, initial=0.0),
        padded.h,
        H1_ZERO_START,
    )
    total = 0.0
    for image, sign in neumann_control_images(l, x, t):
        total += sign * _kernel_term(w_kernel, image, big_p, t)
    return total
