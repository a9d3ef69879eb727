"""Nonrelativistic 1-D eigenvalues and the relativistic energy map.

The two-step scheme: solve the standard Hamiltonian -lap/2 + U for its
eigenvalues eps_n, then map each to a relativistic level
E_n = sqrt(1 + 2 eps_n) (Compton units), with the series approximant
E ~ 1 + eps - eps^2/2 tracked alongside.

Discretizations: the free particle uses the periodic spectral grid (exact
plane-wave eigenstates); everything else uses the symmetric 3-point
finite-difference Laplacian with Dirichlet walls, which is second order in
dx and Richardson-refinable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError, InputError, NumericalFailureError, UnsupportedError
from .grid import Grid1D


@dataclass(frozen=True)
class Free:
    pass


@dataclass(frozen=True)
class Harmonic:
    omega0: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.omega0) and self.omega0 > 0):
            raise InputError(f"omega0 must be positive and finite, got {self.omega0!r}")


@dataclass(frozen=True)
class Box:
    width: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.width) and self.width > 0):
            raise InputError(f"width must be positive and finite, got {self.width!r}")


@dataclass(frozen=True)
class Tabulated:
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or not np.all(np.isfinite(v)):
            raise InputError("tabulated potential must be a finite 1-D array")
        object.__setattr__(self, "values", v)


PotentialSpec = Union[Free, Harmonic, Box, Tabulated]


def harmonic_levels(omega0: float, count: int) -> np.ndarray:
    """Analytic oscillator levels (n + 1/2) omega0."""
    return (np.arange(count) + 0.5) * omega0


def box_levels(width: float, count: int) -> np.ndarray:
    """Analytic infinite-well levels pi^2 m^2 / (2 width^2), m = 1..count."""
    m = np.arange(1, count + 1)
    return (np.pi * m / width) ** 2 / 2.0


def _dirichlet_eigen(u: np.ndarray, h: float, count: int) -> np.ndarray:
    diag = 1.0 / (h * h) + u
    off = np.full(len(u) - 1, -0.5 / (h * h))
    try:
        vals = eigh_tridiagonal(
            diag, off, select="i", select_range=(0, count - 1), eigvals_only=True
        )
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"tridiagonal eigensolver failed: {exc}") from exc
    return np.asarray(vals, dtype=float)


def nonrel_eigen(potential: PotentialSpec, grid: Grid1D, count: int) -> np.ndarray:
    """Lowest `count` eigenvalues of -lap/2 + U, ascending."""
    if not (isinstance(count, (int, np.integer)) and count >= 1):
        raise InputError(f"count must be a positive integer, got {count!r}")
    if count > grid.n // 4:
        raise InputError(
            f"count={count} exceeds the resolution guard n/4 = {grid.n // 4}"
        )
    if isinstance(potential, Free):
        eps = np.sort(grid.wavenumbers**2) / 2.0
        return eps[:count]
    if isinstance(potential, Harmonic):
        u = 0.5 * potential.omega0**2 * grid.x**2
        return _dirichlet_eigen(u, grid.dx, count)
    if isinstance(potential, Box):
        # the well supplies its own interior mesh; grid.n sets the resolution
        h = potential.width / (grid.n + 1)
        return _dirichlet_eigen(np.zeros(grid.n), h, count)
    if isinstance(potential, Tabulated):
        if potential.values.shape != (grid.n,):
            raise InputError(
                f"tabulated potential length {len(potential.values)} != grid n={grid.n}"
            )
        return _dirichlet_eigen(potential.values, grid.dx, count)
    raise InputError(f"unknown potential spec {potential!r}")


def nonrel_eigen_richardson(potential: PotentialSpec, grid: Grid1D, count: int) -> np.ndarray:
    """One Richardson step: (4 eps_{2n} - eps_n) / 3 cancels the O(dx^2) error."""
    if isinstance(potential, Tabulated):
        raise UnsupportedError("tabulated potentials cannot be grid-refined")
    coarse = nonrel_eigen(potential, grid, count)
    fine = nonrel_eigen(potential, Grid1D(2 * grid.n, grid.length), count)
    return (4.0 * fine - coarse) / 3.0


@dataclass(frozen=True)
class SpectrumResult:
    epsilon: np.ndarray = field(repr=False)
    E: np.ndarray = field(repr=False)
    E_series: np.ndarray = field(repr=False)
    rel_gap: np.ndarray = field(repr=False)


def relativistic_map(epsilon) -> SpectrumResult:
    """E_n = sqrt(1 + 2 eps_n) with its quadratic series approximant."""
    eps = np.atleast_1d(np.asarray(epsilon, dtype=float))
    if eps.ndim != 1 or not np.all(np.isfinite(eps)):
        raise InputError("epsilon must be a finite 1-D array")
    bad = np.flatnonzero(eps <= -0.5)
    if len(bad):
        i = int(bad[0])
        raise DomainError(
            f"relativistic map undefined at index {i}: epsilon={eps[i]} <= -1/2"
        )
    e = np.sqrt(1.0 + 2.0 * eps)
    e_series = 1.0 + eps - 0.5 * eps * eps
    rel_gap = np.abs(e - e_series) / e
    return SpectrumResult(epsilon=eps, E=e, E_series=e_series, rel_gap=rel_gap)
