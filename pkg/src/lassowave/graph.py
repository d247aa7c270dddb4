"""Geometry, grids, potentials, targets, and discrete norms for the lasso graph.

The graph is a pendant edge e1 = (0, l) attached at x = 0 to a ring of
circumference 2a.  The ring is represented as two edges e2, e3 = (0, a),
both parametrized away from the attachment vertex, joined at an artificial
Kirchhoff-Neumann vertex at x = a.  All sampled functions live on uniform
grids with the same step h on every edge.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import NonCommensurate, TargetNotH10

DEFAULT_CFL = 0.5


@dataclass(frozen=True)
class LassoGeometry:
    """Edge lengths of the lasso: pendant length l, half-ring length a."""

    l: float
    a: float

    def __post_init__(self):
        if not (self.l > 0 and self.a > 0):
            raise ValueError("edge lengths must be positive")

    @property
    def t_star(self) -> float:
        """Control half-time for the boundary+interior problem, a + l."""
        return self.a + self.l

    @property
    def t_upper(self) -> float:
        """Minimal horizon for the three-control problem, max(a, l)."""
        return max(self.a, self.l)

    @property
    def ring_circumference(self) -> float:
        return 2.0 * self.a


@dataclass(frozen=True)
class LassoGrid:
    """Uniform discretization: step h, n1 = l/h cells on e1, n2 = a/h on e2, e3."""

    h: float
    n1: int
    n2: int
    dt: float
    cfl: float

    def __post_init__(self):
        if not (0.0 < self.cfl <= 1.0):
            raise ValueError("cfl must lie in (0, 1]")

    def x1(self) -> np.ndarray:
        return self.h * np.arange(self.n1 + 1)

    def x2(self) -> np.ndarray:
        return self.h * np.arange(self.n2 + 1)


def _cells(length: float, n_per_unit: int) -> int:
    cells = length * n_per_unit
    n = int(round(cells))
    if n == 0 or abs(cells - n) > 1e-9 * max(1.0, abs(cells)):
        raise NonCommensurate(
            f"length {length} is not an integer multiple of h = 1/{n_per_unit}"
        )
    return n


def build_grid(geom: LassoGeometry, n_per_unit: int, cfl: float = DEFAULT_CFL) -> LassoGrid:
    """Build the uniform grid with h = 1/n_per_unit.

    Both l and a must be integer multiples of h; grids are constructed from
    integer cell counts, never by rounding l/h.
    """
    if n_per_unit <= 0:
        raise ValueError("n_per_unit must be positive")
    h = 1.0 / n_per_unit
    n1 = _cells(geom.l, n_per_unit)
    n2 = _cells(geom.a, n_per_unit)
    return LassoGrid(h=h, n1=n1, n2=n2, dt=cfl * h, cfl=cfl)


@dataclass(frozen=True)
class PotentialSpec:
    """Real potential sampled on the three edges; kind is a provenance tag."""

    q1: np.ndarray
    q2: np.ndarray
    q3: np.ndarray
    kind: str = "table"
    value: float | None = None

    def __post_init__(self):
        for arr in (self.q1, self.q2, self.q3):
            if not np.all(np.isfinite(arr)):
                raise ValueError("potential samples must be finite")
        if self.kind == "zero":
            for arr in (self.q1, self.q2, self.q3):
                if np.any(arr != 0.0):
                    raise ValueError("'zero' potential must be exactly zero")

    @property
    def is_zero(self) -> bool:
        return (
            not np.any(self.q1) and not np.any(self.q2) and not np.any(self.q3)
        )

    @staticmethod
    def zero(grid: LassoGrid) -> "PotentialSpec":
        return PotentialSpec(
            q1=np.zeros(grid.n1 + 1),
            q2=np.zeros(grid.n2 + 1),
            q3=np.zeros(grid.n2 + 1),
            kind="zero",
            value=0.0,
        )

    @staticmethod
    def constant(grid: LassoGrid, c: float) -> "PotentialSpec":
        if c == 0.0:
            return PotentialSpec.zero(grid)
        return PotentialSpec(
            q1=np.full(grid.n1 + 1, float(c)),
            q2=np.full(grid.n2 + 1, float(c)),
            q3=np.full(grid.n2 + 1, float(c)),
            kind="constant",
            value=float(c),
        )

    @staticmethod
    def from_callable(grid: LassoGrid, f1, f2=None, f3=None) -> "PotentialSpec":
        f2 = f2 if f2 is not None else f1
        f3 = f3 if f3 is not None else f2
        return PotentialSpec(
            q1=np.asarray(f1(grid.x1()), dtype=float),
            q2=np.asarray(f2(grid.x2()), dtype=float),
            q3=np.asarray(f3(grid.x2()), dtype=float),
            kind="table",
        )


def fold_index(i: int, n_edge: int) -> int:
    """Index of grid node i under even reflection about n_edge and 2*n_edge periodicity."""
    m = i % (2 * n_edge)
    return m if m <= n_edge else 2 * n_edge - m


def extend_potential_folded(q_edge: np.ndarray, edge_length: float, horizon: float) -> np.ndarray:
    """Extend edge samples evenly about x = edge_length, then periodically.

    The result satisfies q_ext(2 n L +- x) = q_edge(x) at every grid node.
    A horizon shorter than the edge returns the plain restriction.
    """
    q_edge = np.asarray(q_edge, dtype=float)
    n_edge = len(q_edge) - 1
    if n_edge < 1:
        raise ValueError("need at least two samples")
    h = edge_length / n_edge
    n_out = int(round(horizon / h))
    if abs(n_out * h - horizon) > 1e-9 * max(1.0, horizon):
        raise NonCommensurate("horizon is not a grid multiple of the edge step")
    if n_out <= n_edge:
        return q_edge[: n_out + 1].copy()
    idx = np.array([fold_index(i, n_edge) for i in range(n_out + 1)])
    return q_edge[idx]


def derivative(samples: np.ndarray, h: float) -> np.ndarray:
    """Second-order derivative samples: centered interior, one-sided at the ends."""
    return np.gradient(samples, h, edge_order=2)


def _ring_samples(phi2: np.ndarray, phi3: np.ndarray) -> np.ndarray:
    """Concatenate the two half-ring edges into one closed-ring array (0, 2a)."""
    joint = 0.5 * (phi2[-1] + phi3[-1])
    return np.concatenate([phi2[:-1], [joint], phi3[-2::-1]])


def norm_H(phi: tuple[np.ndarray, np.ndarray, np.ndarray], grid: LassoGrid) -> float:
    """Composite-trapezoid L2 norm over the whole graph."""
    s = 0.0
    for arr in phi:
        s += np.trapezoid(np.asarray(arr, dtype=float) ** 2, dx=grid.h)
    return float(np.sqrt(s))


def norm_H1(phi: tuple[np.ndarray, np.ndarray, np.ndarray], grid: LassoGrid) -> float:
    """Graph H1 norm: L2 norm plus derivative L2 norms on e1 and on the closed ring."""
    p1, p2, p3 = (np.asarray(a, dtype=float) for a in phi)
    s = norm_H((p1, p2, p3), grid) ** 2
    s += np.trapezoid(derivative(p1, grid.h) ** 2, dx=grid.h)
    ring = _ring_samples(p2, p3)
    s += np.trapezoid(derivative(ring, grid.h) ** 2, dx=grid.h)
    return float(np.sqrt(s))


@dataclass(frozen=True)
class TargetState:
    """Shape target phi1 and velocity target phi2, sampled on all three edges.

    space_tag is one of 'H10', 'H1', 'H'.  Only 'H10' carries a continuity
    requirement: the three edge values at the vertex agree and the ring is
    closed; phi2 is a plain L2 target with no such constraint.
    """

    phi1: tuple[np.ndarray, np.ndarray, np.ndarray] | None
    phi2: tuple[np.ndarray, np.ndarray, np.ndarray] | None
    space_tag: str = "H10"
    grid: LassoGrid | None = None

    def validate(self) -> None:
        if self.space_tag == "H10" and self.phi1 is not None:
            p1, p2, p3 = self.phi1
            scale = max(norm_H1(self.phi1, self.grid), 1e-300) if self.grid else 1.0
            tol = 1e-9 * max(scale, 1.0)
            mismatch = max(
                abs(p1[0] - p2[0]), abs(p1[0] - p3[0]), abs(p2[-1] - p3[-1])
            )
            if mismatch > tol:
                raise TargetNotH10(
                    f"vertex mismatch {mismatch:.3e} exceeds tolerance {tol:.3e}"
                )


def zero_state(grid: LassoGrid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return (
        np.zeros(grid.n1 + 1),
        np.zeros(grid.n2 + 1),
        np.zeros(grid.n2 + 1),
    )


def sample_state(grid, f1, f2, f3) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample three edge callables on the grid."""
    return (
        np.asarray(f1(grid.x1()), dtype=float),
        np.asarray(f2(grid.x2()), dtype=float),
        np.asarray(f3(grid.x2()), dtype=float),
    )


def save_edge_csv(path, x: np.ndarray, values: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "value"])
        for xi, vi in zip(x, values):
            writer.writerow([f"{xi:.17g}", f"{vi:.17g}"])


def load_edge_csv(path) -> tuple[np.ndarray, np.ndarray]:
    xs, vs = [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            xs.append(float(row["x"]))
            vs.append(float(row["value"]))
    return np.asarray(xs), np.asarray(vs)


def resample_edge(x: np.ndarray, values: np.ndarray, x_new: np.ndarray) -> np.ndarray:
    """Linear resampling onto a target grid; exact when nodes coincide."""
    return np.interp(x_new, x, values)
