"""Wave-equation control on a lasso graph: synthesis, simulation, spectra."""

from .graph import (
    LassoGeometry,
    LassoGrid,
    PotentialSpec,
    TargetState,
    build_grid,
    extend_potential_folded,
    norm_H,
    norm_H1,
)

__all__ = [
    "LassoGeometry",
    "LassoGrid",
    "PotentialSpec",
    "TargetState",
    "build_grid",
    "extend_potential_folded",
    "norm_H",
    "norm_H1",
]

__version__ = "0.1.0"
