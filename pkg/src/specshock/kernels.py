"""Lowpass filter kernels: sinc-Gaussian (RSK) and Lagrange interpolation weights.

The workhorse kernel is the regularized Shannon kernel, a sinc interpolator
under a Gaussian window.  Its passband is controlled by the single ratio
``r = sigma / delta`` (window width in grid units): larger ``r`` keeps more of
the spectrum, smaller ``r`` smooths harder.  The Lagrange family provides the
fixed-order polynomial alternative used for post-processing.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import erf

RSK = "rsk"
LAGRANGE = "lagrange"

#: Stencil half-width wide enough that the truncated Gaussian tail of the
#: sinc-Gaussian weights stays below 1e-10 for ratios up to ~3.2.
DEFAULT_HALF_WIDTH = 32


@dataclass(frozen=True)
class FilterSpec:
    """Parameters that fully determine a lowpass filter.

    family      -- "rsk" or "lagrange"
    half_width  -- W; the physical stencil spans 2W+1 nodes (2W half-shifted)
    ratio       -- r = sigma/delta for the rsk family (ignored for lagrange)
    spacing     -- grid spacing delta
    """

    family: str
    half_width: int = DEFAULT_HALF_WIDTH
    ratio: float = 1.0
    spacing: float = 1.0

    def __post_init__(self):
        if self.family not in (RSK, LAGRANGE):
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.half_width < 1:
            raise ValueError("half_width must be >= 1")
        if self.family == RSK and not self.ratio > 0:
            raise ValueError("ratio must be positive for the rsk family")
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")

    @property
    def sigma(self) -> float:
        return self.ratio * self.spacing

    def with_ratio(self, ratio: float) -> "FilterSpec":
        return replace(self, ratio=ratio)


def rsk_value(offset, spec: FilterSpec):
    """Sinc-Gaussian kernel value at a physical offset from the node.

    sin(pi x / d)/(pi x / d) * exp(-x^2 / (2 sigma^2)); the removable
    singularity at x = 0 evaluates to exactly 1.  Accepts scalars or arrays.
    """
    if spec.family != RSK:
        raise ValueError("rsk_value requires an rsk-family spec")
    offset = np.asarray(offset, dtype=float)
    if not np.all(np.isfinite(offset)):
        raise ValueError("offset must be finite")
    # np.sinc(z) = sin(pi z)/(pi z) with sinc(0) = 1 exactly
    value = np.sinc(offset / spec.spacing) * np.exp(-(offset**2) / (2.0 * spec.sigma**2))
    return value if value.ndim else float(value)


def lagrange_weight(j: int, x, spec: FilterSpec):
    """Cardinal Lagrange weight for node x_j = j*delta among nodes k*delta, |k| <= W."""
    if spec.family != LAGRANGE:
        raise ValueError("lagrange_weight requires a lagrange-family spec")
    w = spec.half_width
    if not -w <= j <= w:
        raise ValueError(f"node index {j} outside [-{w}, {w}]")
    x = np.asarray(x, dtype=float)
    value = np.ones_like(x)
    xj = j * spec.spacing
    for k in range(-w, w + 1):
        if k == j:
            continue
        xk = k * spec.spacing
        value = value * (x - xk) / (xj - xk)
    return value if value.ndim else float(value)


def rsk_response(spec: FilterSpec, wavenumbers):
    """Continuous Fourier magnitude response of the sinc-Gaussian kernel.

    Closed form via error functions, normalized so the response at zero
    wavenumber is exactly 1 (the filter preserves the field mean).  Even in
    omega and non-increasing on [0, pi/delta].
    """
    if spec.family != RSK:
        raise ValueError("rsk_response requires an rsk-family spec")
    omega = np.asarray(wavenumbers, dtype=float)
    sig = spec.sigma
    cut = np.pi / spec.spacing
    root2 = np.sqrt(2.0)
    top = 0.5 * (erf(sig * (cut - omega) / root2) + erf(sig * (cut + omega) / root2))
    return top / erf(sig * cut / root2)


def halfshift_weights(spec: FilterSpec) -> np.ndarray:
    """Weights for interpolating to mid-mesh points, one half cell off the nodes.

    Returns the 2W weights for nodes at offsets (m - 1/2)*delta,
    m = -W+1 .. W, renormalized to sum exactly to 1 so that constants (and the
    field mean) survive filtering unchanged.
    """
    w = spec.half_width
    m = np.arange(-w + 1, w + 1)
    if spec.family == RSK:
        weights = rsk_value((m - 0.5) * spec.spacing, spec)
    else:
        # Lagrange interpolation at the midpoint of 2W consecutive nodes
        nodes = (m - 0.5).astype(float)
        weights = np.empty(2 * w)
        for i in range(2 * w):
            others = np.delete(nodes, i)
            weights[i] = np.prod((0.0 - others) / (nodes[i] - others))
    return weights / weights.sum()


def halfshift_response(spec: FilterSpec, wavenumbers) -> np.ndarray:
    """Transfer function of one half-shift interpolation pass.

    Real and even because the weight sequence is symmetric about the midpoint;
    identically zero at the Nyquist wavenumber pi/delta.
    """
    omega = np.asarray(wavenumbers, dtype=float)
    w = spec.half_width
    weights = halfshift_weights(spec)
    m = np.arange(-w + 1, w + 1)
    phase = np.cos(np.outer(omega, (m - 0.5) * spec.spacing))
    out = phase @ weights
    return out.reshape(omega.shape)


def lagrange_response(spec: FilterSpec, n: int) -> np.ndarray:
    """Half-shift Lagrange filter response sampled at the n-point grid wavenumbers.

    Wavenumbers follow FFT ordering for a periodic grid of n points with the
    spec's spacing; the zero-wavenumber response is 1.
    """
    if spec.family != LAGRANGE:
        raise ValueError("lagrange_response requires a lagrange-family spec")
    omega = 2.0 * np.pi * np.fft.fftfreq(n, d=spec.spacing)
    return halfshift_response(spec, omega)
