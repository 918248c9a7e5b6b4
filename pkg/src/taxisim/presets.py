"""Initial-data presets: nonnegative bacteria u0 and strictly positive
nutrient v0 on a given grid."""
from __future__ import annotations

import numpy as np

from .grid import Grid, ScalarField

__all__ = ["make_initial"]

_FRONT_MODES = 4  # low-frequency cosine noise band


def make_initial(preset: str, grid: Grid, params: dict,
                 seed: int = 0) -> tuple[ScalarField, ScalarField]:
    if preset == "constant":
        return (ScalarField.full(grid, params.get("a", 1.0)),
                ScalarField.full(grid, params.get("b", 1.0)))

    v0 = ScalarField.full(grid, params.get("v", 1.0))

    if preset == "gaussian_colony":
        amplitude = params.get("amplitude", 1.0)
        width = params.get("width", 0.1)
        center = params.get("center")
        if center is None:
            center = [0.5 * L for L in grid.domain.lengths]
        coords = grid.meshgrid()
        r2 = np.zeros(grid.shape)
        for axis, c in enumerate(center):
            r2 += (coords[axis] - c) ** 2
        u0 = ScalarField(grid, amplitude * np.exp(-r2 / (2.0 * width ** 2)),
                         copy=False)
        return u0, v0

    if preset == "perturbed_front":
        base = params.get("base", 1.0)
        noise_amp = params.get("noise_amp", 0.01)
        rng = np.random.default_rng(seed)
        coords = grid.meshgrid()
        noise = np.zeros(grid.shape)
        weight = 0.0
        for k in range(1, _FRONT_MODES + 1):
            for axis in range(grid.dim):
                c = rng.uniform(-1.0, 1.0)
                noise += c * np.cos(k * np.pi * coords[axis]
                                    / grid.domain.lengths[axis])
                weight += abs(c)
        if weight > 0.0:
            noise *= noise_amp / weight  # |perturbation| <= noise_amp < base
        u0 = ScalarField(grid, base + noise, copy=False)
        return u0, v0

    if preset == "checker":
        lo = params.get("lo", 0.5)
        hi = params.get("hi", 1.5)
        tiles = int(params.get("tiles", 4))
        coords = grid.meshgrid()
        parity = np.zeros(grid.shape, dtype=int)
        for axis in range(grid.dim):
            parity += np.floor(coords[axis] / grid.domain.lengths[axis]
                               * tiles).astype(int)
        u0 = ScalarField(grid, np.where(parity % 2 == 0, lo, hi), copy=False)
        return u0, v0

    raise ValueError(f"unknown preset {preset!r}")
