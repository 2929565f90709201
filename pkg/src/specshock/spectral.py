"""Fourier transform engine: grids, spectral differentiation, windowed filtering.

Transform convention: coefficients carry the grid spacing,
``u_hat(omega_n) = delta * sum_j u(x_j) exp(-i omega_n x_j)`` with
``omega_n = 2 pi n / L``, and synthesis divides by the domain length.  With
this scaling a filter response multiplies coefficients directly and the zero
mode equals the integral of the field.

Non-periodic axes are handled by even (mirror) doubling: the sample block is
reflected once, the doubled signal is periodic, and restriction to the first
half recovers the original samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform 1D/2D grid.  Non-periodic axes are sampled at cell centers."""

    points: tuple[int, ...]
    lengths: tuple[float, ...]
    origins: tuple[float, ...]
    periodic: tuple[bool, ...]

    def __post_init__(self):
        if not (1 <= len(self.points) <= 2):
            raise ValueError("only 1D and 2D grids are supported")
        if not len(self.points) == len(self.lengths) == len(self.origins) == len(self.periodic):
            raise ValueError("per-axis tuples must have equal length")
        for n, length, per in zip(self.points, self.lengths, self.periodic):
            if n < 4:
                raise ValueError("need at least 4 points per axis")
            if per and n % 2:
                raise ValueError("periodic axes need an even point count")
            if not length > 0:
                raise ValueError("axis length must be positive")

    @classmethod
    def line(cls, n: int, start: float, end: float, periodic: bool = True) -> "Grid":
        return cls((n,), (end - start,), (start,), (periodic,))

    @classmethod
    def box(cls, nx, ny, x_range, y_range, periodic=(True, True)) -> "Grid":
        return cls(
            (nx, ny),
            (x_range[1] - x_range[0], y_range[1] - y_range[0]),
            (x_range[0], y_range[0]),
            tuple(periodic),
        )

    @property
    def ndim(self) -> int:
        return len(self.points)

    def spacing(self, axis: int = 0) -> float:
        return self.lengths[axis] / self.points[axis]

    def coordinates(self, axis: int = 0) -> np.ndarray:
        n = self.points[axis]
        d = self.spacing(axis)
        offset = 0.0 if self.periodic[axis] else 0.5
        return self.origins[axis] + (np.arange(n) + offset) * d

    def mesh(self) -> tuple[np.ndarray, ...]:
        axes = [self.coordinates(a) for a in range(self.ndim)]
        return tuple(np.meshgrid(*axes, indexing="ij"))

    def wavenumbers(self, axis: int = 0) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.points[axis], d=self.spacing(axis))

    def doubled(self, axis: int) -> "Grid":
        """Grid of the even extension along one axis (periodic, twice the span)."""
        points = list(self.points)
        lengths = list(self.lengths)
        periodic = list(self.periodic)
        points[axis] *= 2
        lengths[axis] *= 2
        periodic[axis] = True
        return Grid(tuple(points), tuple(lengths), self.origins, tuple(periodic))


@dataclass
class SpectralField:
    """Samples of a real field on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.points:
            raise ValueError(
                f"sample shape {self.values.shape} does not match grid {self.grid.points}"
            )


# -- array-level core -------------------------------------------------------
# These operate on arrays whose *last* `grid.ndim` axes are the spatial axes,
# so stacked conserved components (ncomp, nx[, ny]) go through unchanged.


def _array_axis(values: np.ndarray, grid: Grid, axis: int) -> int:
    return values.ndim - grid.ndim + axis


def _reshape_along(arr: np.ndarray, values_ndim: int, axis: int) -> np.ndarray:
    shape = [1] * values_ndim
    shape[axis] = arr.size
    return arr.reshape(shape)


def filter_axis(values: np.ndarray, grid: Grid, response: np.ndarray, axis: int) -> np.ndarray:
    """Multiply the spectrum along one axis by a real response, back to physical."""
    aax = _array_axis(values, grid, axis)
    if len(response) != grid.points[axis]:
        raise ValueError("response length does not match grid axis")
    spec = np.fft.fft(values, axis=aax)
    spec *= _reshape_along(np.asarray(response, dtype=float), values.ndim, aax)
    return np.fft.ifft(spec, axis=aax).real


def derivative_axis(
    values: np.ndarray, grid: Grid, axis: int, response: np.ndarray | None = None
) -> np.ndarray:
    """Spectral first derivative along one axis, optionally windowed.

    The Nyquist mode carries no derivative contribution.
    """
    aax = _array_axis(values, grid, axis)
    n = grid.points[axis]
    omega = grid.wavenumbers(axis)
    sym = 1j * omega
    if n % 2 == 0:
        sym[n // 2] = 0.0
    if response is not None:
        if len(response) != n:
            raise ValueError("response length does not match grid axis")
        sym = sym * np.asarray(response, dtype=float)
    spec = np.fft.fft(values, axis=aax)
    spec *= _reshape_along(sym, values.ndim, aax)
    return np.fft.ifft(spec, axis=aax).real


def mirror_extend_axis(values: np.ndarray, grid: Grid, axis: int) -> np.ndarray:
    """Even extension along an axis: [a, b, c, d] -> [a, b, c, d, d, c, b, a]."""
    aax = _array_axis(values, grid, axis)
    return np.concatenate([values, np.flip(values, axis=aax)], axis=aax)


def restrict_axis(values: np.ndarray, grid: Grid, axis: int) -> np.ndarray:
    """Undo :func:`mirror_extend_axis`, keeping the first half."""
    aax = _array_axis(values, grid, axis)
    n = values.shape[aax] // 2
    index = [slice(None)] * values.ndim
    index[aax] = slice(0, n)
    return values[tuple(index)]


def mirror_derivative_axis(
    values: np.ndarray, grid: Grid, axis: int, response: np.ndarray | None = None
) -> np.ndarray:
    """Derivative along a non-periodic axis via even doubling, then restriction."""
    doubled = grid.doubled(axis)
    ext = mirror_extend_axis(values, grid, axis)
    return restrict_axis(derivative_axis(ext, doubled, axis, response), doubled, axis)


# -- field-level operations --------------------------------------------------


def dft_coefficients(field: SpectralField) -> np.ndarray:
    """Spacing-scaled Fourier coefficients of a periodic field.

    For constant c the zero coefficient is c*L (1D); a forward/inverse round
    trip reproduces the samples to rounding.
    """
    grid = field.grid
    if not all(grid.periodic):
        raise ValueError("dft_coefficients requires a fully periodic grid")
    if not np.all(np.isfinite(field.values)):
        raise ValueError("samples must be finite")
    coeffs = np.fft.fftn(field.values).astype(complex)
    for axis in range(grid.ndim):
        omega = grid.wavenumbers(axis)
        phase = grid.spacing(axis) * np.exp(-1j * omega * grid.origins[axis])
        coeffs *= _reshape_along(phase, coeffs.ndim, axis)
    return coeffs


def inverse_dft(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    """Synthesize samples from spacing-scaled coefficients."""
    values = np.asarray(coeffs, dtype=complex).copy()
    for axis in range(grid.ndim):
        omega = grid.wavenumbers(axis)
        phase = np.exp(1j * omega * grid.origins[axis]) / grid.spacing(axis)
        values *= _reshape_along(phase, values.ndim, axis)
    return np.fft.ifftn(values).real


def filter_fourier(field: SpectralField, response: np.ndarray, axis: int = 0) -> SpectralField:
    """Windowed transform: scale the coefficients along one axis by a response."""
    return SpectralField(field.grid, filter_axis(field.values, field.grid, response, axis))


def diff_filtered(
    field: SpectralField, response: np.ndarray | None = None, axis: int = 0
) -> SpectralField:
    """Filtering and differentiation in one pass; plain derivative when response is None."""
    return SpectralField(field.grid, derivative_axis(field.values, field.grid, axis, response))


def mirror_extend(field: SpectralField, axis: int = 0) -> SpectralField:
    return SpectralField(
        field.grid.doubled(axis), mirror_extend_axis(field.values, field.grid, axis)
    )
