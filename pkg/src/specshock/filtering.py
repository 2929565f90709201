"""Physical-domain filtering: the two-step mid-mesh filter, TV sensor, post-processing.

The two-step filter predicts mid-mesh values from nodes and reconstructs nodes
from the mid-mesh values with the same symmetric half-shift weights; its
periodic transfer function is the product of the two half-shift responses.
One of the two passes runs with a reduced ratio (a stronger window) than the
nominal one.  Activation during time integration is controlled by a total
variation growth sensor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import LAGRANGE, FilterSpec, halfshift_weights

#: Ghost-fill policies for non-periodic stencils.
BC_PERIODIC = "periodic"
BC_MIRROR = "mirror"
BC_MIRROR_ODD = "mirror_odd"
BC_EDGE = "edge"
_BC_KINDS = (BC_PERIODIC, BC_MIRROR, BC_MIRROR_ODD, BC_EDGE)


@dataclass(frozen=True)
class SensorConfig:
    """Total-variation growth switch.

    The filter fires when TV after a full RK4 cycle exceeds ``threshold`` times
    the TV after the previous cycle.  Systems monitor the density field.
    """

    threshold: float = 1.0 + 1e-4
    monitored_field: str = "density"

    def __post_init__(self):
        if not self.threshold > 1.0:
            raise ValueError("sensor threshold must exceed 1")
        if self.monitored_field not in ("scalar", "density"):
            raise ValueError(f"unknown monitored field {self.monitored_field!r}")


def _correlate_valid(values: np.ndarray, weights: np.ndarray, axis: int) -> np.ndarray:
    """Correlation keeping only outputs whose full stencil fits."""
    windows = np.lib.stride_tricks.sliding_window_view(values, len(weights), axis=axis)
    return windows @ weights


def extend(values: np.ndarray, pad: int, bc: str, axis: int = -1) -> np.ndarray:
    """Ghost-fill an array along one axis by `pad` samples on each side.

    Mirror ghosts reflect about the half-sample planes just outside the block
    and keep reflecting for pads wider than the block (even- or odd-periodic
    images, matching a channel bounded by two symmetry planes).
    """
    if bc not in _BC_KINDS:
        raise ValueError(f"unknown boundary kind {bc!r}")
    axis = axis % values.ndim
    n = values.shape[axis]
    if bc == BC_EDGE:
        widths = [(0, 0)] * values.ndim
        widths[axis] = (pad, pad)
        return np.pad(values, widths, mode="edge")
    positions = np.arange(-pad, n + pad)
    if bc == BC_PERIODIC:
        return np.take(values, positions % n, axis=axis)
    folded = positions % (2 * n)
    mirrored = folded >= n
    idx = np.where(mirrored, 2 * n - 1 - folded, folded)
    out = np.take(values, idx, axis=axis)
    if bc == BC_MIRROR_ODD:
        sign = np.where(mirrored, -1.0, 1.0)
        shape = [1] * values.ndim
        shape[axis] = sign.size
        out = out * sign.reshape(shape)
    return out


def predict_midpoints(values: np.ndarray, spec: FilterSpec, axis: int = -1) -> np.ndarray:
    """Mid-mesh values from nodal values with half-shift weights.

    Input is an already ghost-extended block; only midpoints whose full 2W
    stencil fits are returned (output is 2W-1 shorter than the input).  The
    k-th output is the midpoint after input node k + W - 1.
    """
    w = spec.half_width
    axis = axis % values.ndim
    if values.shape[axis] < 2 * w:
        raise ValueError("stencil exceeds the extended array")
    return _correlate_valid(values, halfshift_weights(spec), axis)


def reconstruct_nodes(midpoints: np.ndarray, spec: FilterSpec, axis: int = -1) -> np.ndarray:
    """Nodal values back from mid-mesh values; mirror image of the prediction pass.

    The k-th output node sits between input midpoints k + W - 1 and k + W.
    """
    w = spec.half_width
    axis = axis % midpoints.ndim
    if midpoints.shape[axis] < 2 * w:
        raise ValueError("stencil exceeds the extended array")
    return _correlate_valid(midpoints, halfshift_weights(spec), axis)


def physical_filter(
    values: np.ndarray,
    spec_strong: FilterSpec,
    spec_weak: FilterSpec,
    bc: str,
    axis: int = -1,
) -> np.ndarray:
    """Two-step filter: predict midpoints with the reduced-ratio spec, reconstruct
    with the nominal one.  Ghost values follow `bc`; output matches the input shape.
    """
    if spec_strong.half_width != spec_weak.half_width:
        raise ValueError("both filter passes must share the stencil half-width")
    w = spec_strong.half_width
    axis = axis % values.ndim
    n = values.shape[axis]
    ext = extend(values, 2 * w, bc, axis=axis)
    mid = predict_midpoints(ext, spec_weak, axis=axis)
    nodes = reconstruct_nodes(mid, spec_strong, axis=axis)
    index = [slice(None)] * values.ndim
    index[axis] = slice(1, n + 1)
    return nodes[tuple(index)]


def total_variation(values: np.ndarray, periodic=False) -> float:
    """Sum of absolute neighbor differences; 2D fields sum both axes.

    `periodic` adds the wrap-around difference, per axis for 2D (pass a bool
    or a per-axis tuple).
    """
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise ValueError("total variation needs at least two samples")
    if isinstance(periodic, (bool, np.bool_)):
        periodic = (periodic,) * values.ndim
    tv = 0.0
    for axis in range(values.ndim):
        tv += float(np.abs(np.diff(values, axis=axis)).sum())
        if periodic[axis]:
            first = np.take(values, 0, axis=axis)
            last = np.take(values, -1, axis=axis)
            tv += float(np.abs(first - last).sum())
    return tv


def sensor_should_filter(tv_prev: float, tv_curr: float, cfg: SensorConfig) -> bool:
    """True when total variation grew beyond the configured ratio."""
    if tv_prev < 0:
        raise ValueError("total variation cannot be negative")
    if tv_prev == 0.0:
        return tv_curr > 0.0
    return tv_curr > cfg.threshold * tv_prev


def postprocess_lagrange(values: np.ndarray, order: int, bc: str, axis: int = -1) -> np.ndarray:
    """One presentation pass of the two-step filter with Lagrange weights.

    `order` is the number of stencil points per side of a midpoint; 2 and 4
    are the filters used after the final time step.
    """
    if order not in (2, 4):
        raise ValueError("post-processing order must be 2 or 4")
    spec = FilterSpec(LAGRANGE, half_width=order)
    return physical_filter(values, spec, spec, bc, axis=axis)


def local_filter_near_shock(
    values: np.ndarray, window_halfwidth: int, order: int = 2, bc: str = BC_EDGE
) -> np.ndarray:
    """Post-process only around the steepest gradient of a 1D profile.

    Samples outside ``shock index +- window_halfwidth`` are returned
    bit-identical to the input.
    """
    if window_halfwidth < 1:
        raise ValueError("window_halfwidth must be >= 1")
    values = np.asarray(values, dtype=float)
    if values.ndim != 1:
        raise ValueError("local filtering works on 1D profiles")
    shock = int(np.argmax(np.abs(np.diff(values))))
    filtered = postprocess_lagrange(values, order, bc)
    out = values.copy()
    lo = max(0, shock - window_halfwidth)
    hi = min(values.size, shock + window_halfwidth + 1)
    out[lo:hi] = filtered[lo:hi]
    return out
