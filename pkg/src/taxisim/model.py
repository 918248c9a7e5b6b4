"""Right-hand side of the regularized degenerate taxis-consumption system.

The bacterial density u diffuses with mobility u^(l-1) v, drifts up nutrient
gradients with mobility u^l v, and grows by +uv; the nutrient v diffuses with
unit coefficient and is consumed by -uv.  Both fluxes carry zero normal
component across the boundary.  The reaction term uses the identical cellwise
product uv in both equations, so any consistent one-step method conserves the
discrete total mass of u + v exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import (
    Grid,
    ScalarField,
    _axis_slices,
    _laplacian_array,
    interior_face_gradient,
    interior_face_mean,
)

__all__ = [
    "ModelParams",
    "State",
    "InvalidInitialData",
    "PositivityViolation",
    "regularize_initial",
    "rhs",
    "rhs_arrays",
    "stability_dt",
]


class InvalidInitialData(ValueError):
    """Initial data violates u0 >= 0 or v0 > 0."""


class PositivityViolation(ValueError):
    """A field that must be strictly positive is not."""


@dataclass(frozen=True)
class ModelParams:
    l: float
    epsilon: float
    b: float = 1.0
    face_mean: str = "arithmetic"

    def __post_init__(self) -> None:
        if self.l < 1.0:
            raise ValueError(f"diffusion exponent l must be >= 1, got {self.l}")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0,1), got {self.epsilon}")
        if self.b <= 0.0:
            raise ValueError(f"energy constant b must be positive, got {self.b}")
        if self.face_mean not in ("arithmetic", "harmonic"):
            raise ValueError(f"unknown face mean {self.face_mean!r}")


@dataclass
class State:
    """Solution pair plus simulation clock and running consumption integral."""

    u: ScalarField
    v: ScalarField
    t: float = 0.0
    cumulative_uv: float = 0.0

    @property
    def grid(self) -> Grid:
        return self.u.grid


def regularize_initial(u0: ScalarField, v0: ScalarField,
                       params: ModelParams) -> State:
    """Shift u0 by epsilon; reject data outside u0 >= 0, v0 > 0."""
    if u0.grid is not v0.grid and u0.grid != v0.grid:
        raise InvalidInitialData("u0 and v0 must share one grid")
    bad_u = np.argwhere(u0.values < 0.0)
    if bad_u.size:
        cell = tuple(int(i) for i in bad_u[0])
        raise InvalidInitialData(
            f"u0 negative at cell {cell}: {u0.values[cell]!r}")
    bad_v = np.argwhere(v0.values <= 0.0)
    if bad_v.size:
        cell = tuple(int(i) for i in bad_v[0])
        raise InvalidInitialData(
            f"v0 nonpositive at cell {cell}: {v0.values[cell]!r}")
    u = ScalarField(u0.grid, u0.values + params.epsilon, copy=False)
    return State(u=u, v=v0.copy(), t=0.0, cumulative_uv=0.0)


def _mobilities(u: np.ndarray, params: ModelParams):
    """Cellwise diffusion coefficient u^(l-1) v and taxis coefficient u^l v
    are built from a single power evaluation."""
    l = params.l
    if l == 1.0:
        return None, u  # u^0 = 1 exactly
    p1 = u ** (l - 1.0)
    return p1, p1 * u


def rhs_arrays(u: np.ndarray, v: np.ndarray, grid: Grid, params: ModelParams,
               source=None) -> tuple[np.ndarray, np.ndarray]:
    """Array-level right-hand side; `source` is an optional (f_u, f_v) pair."""
    p1, pl = _mobilities(u, params)
    coef_d = v if p1 is None else p1 * v
    coef_t = pl * v
    du = np.zeros_like(u)
    dv = np.zeros_like(v)
    mean = params.face_mean
    for axis, ha in enumerate(grid.h):
        gu = interior_face_gradient(u, axis, ha)
        gv = interior_face_gradient(v, axis, ha)
        df = interior_face_mean(coef_d, axis, mean)
        tf = interior_face_mean(coef_t, axis, mean)
        flux = df * gu - tf * gv
        lo, hi = _axis_slices(u.ndim, axis)
        du[lo] += flux / ha
        du[hi] -= flux / ha
        dv[lo] += gv / ha
        dv[hi] -= gv / ha
    r = u * v
    du += r
    dv -= r
    if source is not None:
        du += source[0]
        dv += source[1]
    return du, dv


def rhs(state: State, params: ModelParams) -> tuple[ScalarField, ScalarField]:
    """Time derivative (du, dv) of the regularized system on `state`."""
    du, dv = rhs_arrays(state.u.values, state.v.values, state.grid, params)
    return (ScalarField(state.grid, du, copy=False),
            ScalarField(state.grid, dv, copy=False))


def stability_dt(state: State, params: ModelParams,
                 safety: float = 0.4) -> float:
    """Explicit diffusion step bound dt <= safety * h^2 / (2 * dim * Dmax).

    Dmax majorizes the unit nutrient diffusivity, the degenerate mobility
    u^(l-1) v, and the taxis mobility u^l v scaled by the largest nutrient
    face gradient.
    """
    u = state.u.values
    v = state.v.values
    grid = state.grid
    p1, pl = _mobilities(u, params)
    coef_d = v if p1 is None else p1 * v
    coef_t = pl * v
    gv_max = 0.0
    for axis, ha in enumerate(grid.h):
        g = np.abs(np.diff(v, axis=axis)).max() / ha
        if g > gv_max:
            gv_max = g
    dmax = max(1.0, float(coef_d.max()), float(coef_t.max()) * gv_max)
    hmin = min(grid.h)
    return safety * hmin * hmin / (2.0 * grid.dim * dmax)
