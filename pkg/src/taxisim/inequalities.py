"""Numerical stress tests for the two functional inequalities behind the
a-priori estimates.

Both inequalities are existential in their constants, so no "violation" is
ever declared: each check reports the left side, every bracketed right-hand
term, and their ratio; fitting a constant over a family of fields means
taking the maximal ratio.  Sampled fields are band-limited cosine series
(Neumann-symmetric), since high-frequency grid noise makes the discrete
gradient a poor stand-in for the continuous one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import (
    Grid,
    ScalarField,
    face_quadrature,
    integrate,
    interior_face_gradient,
    interior_face_mean,
)
from .model import PositivityViolation

__all__ = [
    "IneqReport",
    "check_ineq_61",
    "check_ineq_64",
    "fit_constant",
    "cosine_family",
]


@dataclass
class IneqReport:
    lhs: float
    rhs_terms: dict
    ratio: float
    params: dict = field(default_factory=dict)
    field_seed: int | None = None


def _check_positive_pair(phi: ScalarField, psi: ScalarField) -> None:
    if not float(phi.values.min()) > 0.0:
        raise PositivityViolation("phi must be strictly positive")
    if not float(psi.values.min()) > 0.0:
        raise PositivityViolation("psi must be strictly positive")


def _cross_dissipation(num: np.ndarray, den: np.ndarray,
                       gfield: np.ndarray, grid: Grid) -> float:
    """Face sum of (num/den) |grad gfield|^2."""
    total = 0.0
    for axis, h in enumerate(grid.h):
        g = interior_face_gradient(gfield, axis, h)
        mn = interior_face_mean(num, axis)
        md = interior_face_mean(den, axis)
        total += float(np.sum((mn / md) * g * g * face_quadrature(grid, axis)))
    return total


def _weighted_grad_sq(weight: np.ndarray, gfield: np.ndarray,
                      grid: Grid) -> float:
    """Face sum of weight * |grad gfield|^2, weight averaged to faces."""
    total = 0.0
    for axis, h in enumerate(grid.h):
        g = interior_face_gradient(gfield, axis, h)
        mw = interior_face_mean(weight, axis)
        total += float(np.sum(mw * g * g * face_quadrature(grid, axis)))
    return total


def _quartic_quotient(psi: np.ndarray, grid: Grid) -> float:
    """Face sum of |grad psi|^4 / psi^3."""
    total = 0.0
    for axis, h in enumerate(grid.h):
        g = interior_face_gradient(psi, axis, h)
        m = interior_face_mean(psi, axis)
        total += float(np.sum(g ** 4 / m ** 3 * face_quadrature(grid, axis)))
    return total


def check_ineq_61(phi: ScalarField, psi: ScalarField, p: float,
                  field_seed: int | None = None) -> IneqReport:
    """Interpolation bound: int phi^(p+1) psi against the dissipation bracket
    {int (phi/psi)|grad psi|^2 + int (psi/phi)|grad phi|^2 + int phi psi}
    times int phi^p."""
    if p < 1.0:
        raise ValueError(f"exponent p must be >= 1, got {p}")
    _check_positive_pair(phi, psi)
    grid = phi.grid
    f, s = phi.values, psi.values
    lhs = integrate(ScalarField(grid, f ** (p + 1.0) * s, copy=False))
    bracket = (_cross_dissipation(f, s, s, grid)
               + _cross_dissipation(s, f, f, grid)
               + integrate(ScalarField(grid, f * s, copy=False)))
    factor = integrate(ScalarField(grid, f ** p, copy=False))
    denom = bracket * factor
    ratio = lhs / denom if denom > 0.0 else math.inf
    return IneqReport(lhs=lhs,
                      rhs_terms={"bracket": bracket, "factor": factor},
                      ratio=ratio, params={"p": p}, field_seed=field_seed)


def check_ineq_64(phi: ScalarField, psi: ScalarField, p: float, eta: float,
                  field_seed: int | None = None) -> IneqReport:
    """Young-type bound on int phi^(p+1) psi |grad psi|^2; the right side
    carries the eta-weighted phi-dissipation, two terms scaled by the quartic
    gradient quotient of psi, and a mass term.  Ratios are reported with the
    inequality's unquantified constant set to 1."""
    if p < 1.0:
        raise ValueError(f"exponent p must be >= 1, got {p}")
    if eta <= 0.0:
        raise ValueError(f"eta must be positive, got {eta}")
    _check_positive_pair(phi, psi)
    grid = phi.grid
    f, s = phi.values, psi.values
    sup_psi = float(s.max())
    lhs = _weighted_grad_sq(f ** (p + 1.0) * s, s, grid)
    f4 = _quartic_quotient(s, grid)
    int_fp1s = integrate(ScalarField(grid, f ** (p + 1.0) * s, copy=False))
    terms = {
        "eta_grad_phi": eta * _weighted_grad_sq(f ** (p - 1.0) * s, f, grid),
        "mixed": (sup_psi + sup_psi ** 3 / eta) * int_fp1s * f4,
        "mass_power": sup_psi ** 2
        * integrate(ScalarField(grid, f, copy=False)) ** (2.0 * p + 1.0) * f4,
        "base": sup_psi ** 2 * integrate(ScalarField(grid, f * s, copy=False)),
    }
    denom = sum(terms.values())
    if lhs == 0.0:
        ratio = 0.0
    else:
        ratio = lhs / denom if denom > 0.0 else math.inf
    return IneqReport(lhs=lhs, rhs_terms=terms, ratio=ratio,
                      params={"p": p, "eta": eta}, field_seed=field_seed)


def fit_constant(family, check, **params) -> float:
    """Maximal ratio of `check` over an iterable of (phi, psi) pairs."""
    best = None
    for i, (phi, psi) in enumerate(family):
        rep = check(phi, psi, field_seed=i, **params)
        if best is None or rep.ratio > best:
            best = rep.ratio
    if best is None:
        raise ValueError("empty field family")
    return best


def _random_smooth(rng: np.random.Generator, grid: Grid, modes: int,
                   lo: float, hi: float) -> ScalarField:
    coords = grid.meshgrid()
    raw = np.zeros(grid.shape)
    if grid.dim == 1:
        ks = [(k,) for k in range(1, modes + 1)]
    else:
        ks = [(kx, ky) for kx in range(modes + 1) for ky in range(modes + 1)
              if (kx, ky) != (0, 0)]
    for k in ks:
        amp = rng.normal()
        term = np.ones(grid.shape) * amp
        for axis, ka in enumerate(k):
            if ka:
                term = term * np.cos(ka * np.pi * coords[axis]
                                     / grid.domain.lengths[axis])
        raw += term
    span = raw.max() - raw.min()
    if span < 1e-30:
        return ScalarField.full(grid, 0.5 * (lo + hi))
    vals = lo + (hi - lo) * (raw - raw.min()) / span
    return ScalarField(grid, vals, copy=False)


def cosine_family(grid: Grid, count: int, seed: int, modes: int = 3,
                  lo_range=(0.1, 1.0), hi_range=(1.0, 10.0)):
    """Seeded list of (phi, psi) pairs of smooth positive fields."""
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(count):
        lo = rng.uniform(*lo_range)
        hi = rng.uniform(*hi_range)
        phi = _random_smooth(rng, grid, modes, lo, hi)
        lo = rng.uniform(*lo_range)
        hi = rng.uniform(*hi_range)
        psi = _random_smooth(rng, grid, modes, lo, hi)
        pairs.append((phi, psi))
    return pairs
