"""Periodic 1-D grid with unitary FFT and spectral differentiation.

The domain is x in [-L/2, L/2) sampled at n even points, dx = L/n.  Mode
wavenumbers follow the transform layout k_j = 2*pi*j/L for j in [-n/2, n/2).
Transforms are unitary (symmetric 1/sqrt(n)) so Parseval holds with no extra
bookkeeping.  Localized data should keep >= 6 sigma of clearance from the
wrap point; evolve.gaussian_packet warns when that is violated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class Grid1D:
    n: int
    length: float

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise InputError(f"n must be an integer, got {self.n!r}")
        if self.n < 8 or self.n % 2 != 0:
            raise InputError(f"n must be even and >= 8, got {self.n}")
        if not (np.isfinite(self.length) and self.length > 0):
            raise InputError(f"length must be positive and finite, got {self.length!r}")

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def x(self) -> np.ndarray:
        """Sample points, centered so x=0 sits at index n//2."""
        return (np.arange(self.n) - self.n // 2) * self.dx

    @property
    def wavenumbers(self) -> np.ndarray:
        """k_j = 2 pi j / L in FFT layout."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    def integrate(self, values: np.ndarray) -> float | complex:
        """Periodic quadrature (the trapezoid rule collapses to dx * sum)."""
        values = np.asarray(values)
        if values.shape != (self.n,):
            raise InputError(f"expected {self.n} values, got shape {values.shape}")
        return self.dx * values.sum()

    def deriv(self, values: np.ndarray, order: int) -> np.ndarray:
        """Spectral derivative of a raw array; complex output in general."""
        if order not in (1, 2, 3, 4):
            raise InputError(f"derivative order must be 1..4, got {order!r}")
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != (self.n,):
            raise InputError(f"expected {self.n} values, got shape {values.shape}")
        ik = 1j * self.wavenumbers
        return np.fft.ifft(ik**order * np.fft.fft(values))


@dataclass(frozen=True)
class ComplexField:
    """n complex samples living on a grid (point or mode space)."""

    grid: Grid1D
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (self.grid.n,):
            raise InputError(
                f"field length {vals.shape} does not match grid n={self.grid.n}"
            )
        object.__setattr__(self, "values", vals)


def transform(fld: ComplexField, direction: str = "forward") -> ComplexField:
    """Unitary DFT between point space and mode space."""
    if direction == "forward":
        out = np.fft.fft(fld.values, norm="ortho")
    elif direction == "inverse":
        out = np.fft.ifft(fld.values, norm="ortho")
    else:
        raise InputError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    return ComplexField(fld.grid, out)


def spectral_derivative(fld: ComplexField, order: int) -> ComplexField:
    return ComplexField(fld.grid, fld.grid.deriv(fld.values, order))
