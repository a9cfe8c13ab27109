"""Phase recovery along the central row of a fringe set.

Three stages, each a pure function returning a new PhaseProfile:

1. four_step_phase: wrapped phase from the arctangent of the four
   shifted intensities, range (-pi, pi].
2. unwrap_1d: remove 2*pi jumps, anchored so the center sample keeps
   its wrapped value.
3. smooth_cubic: least-squares cubic through the unwrapped profile,
   which removes noise without touching the low-order shape the
   distortion analysis needs.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientDataError, ParameterError, ShapeError
from .template_gen import FringePattern

#: Below this magnitude both arctangent inputs count as a contrast
#: dropout and the column inherits its nearest valid neighbor.
CONTRAST_EPS = 1e-9

_STATES = ("wrapped", "unwrapped", "smoothed")


@dataclass(frozen=True)
class PhaseProfile:
    """1-D phase samples (radians) along one image row.

    state is one of "wrapped", "unwrapped", "smoothed"; center_index is
    the column of the image center the downstream fit anchors on.
    """

    values: np.ndarray = field(repr=False)
    state: str
    center_index: int

    def __post_init__(self):
        if self.state not in _STATES:
            raise ParameterError(f"state must be one of {_STATES}, got {self.state!r}")
        if self.values.ndim != 1:
            raise ShapeError(f"profile must be 1-D, got shape {self.values.shape}")
        if not (0 <= self.center_index < self.values.size):
            raise ParameterError(
                f"center_index {self.center_index} outside [0, {self.values.size})"
            )

    def __len__(self):
        return self.values.size


def _raster(image) -> np.ndarray:
    if isinstance(image, FringePattern):
        return image.data
    return np.asarray(image, dtype=np.float64)


def _fill_undefined(wrapped: np.ndarray, undefined: np.ndarray) -> np.ndarray:
    """Replace flagged columns with the nearest valid column's value."""
    valid_idx = np.flatnonzero(~undefined)
    if valid_idx.size == 0:
        raise ParameterError("every column is a contrast dropout; no phase information")
    if valid_idx.size == wrapped.size:
        return wrapped
    bad_idx = np.flatnonzero(undefined)
    # nearest valid index on each side; pick whichever is closer
    pos = np.searchsorted(valid_idx, bad_idx)
    left = valid_idx[np.clip(pos - 1, 0, valid_idx.size - 1)]
    right = valid_idx[np.clip(pos, 0, valid_idx.size - 1)]
    nearest = np.where(bad_idx - left <= right - bad_idx, left, right)
    out = wrapped.copy()
    out[bad_idx] = wrapped[nearest]
    return out


def four_step_phase(i1, i2, i3, i4, row: int) -> PhaseProfile:
    """Wrapped phase of one row: arctan2(I4 - I2, I1 - I3), in (-pi, pi].

    The four patterns must share dimensions. Columns where both
    arctangent inputs are below CONTRAST_EPS carry no phase and inherit
    the nearest valid column before unwrapping.
    """
    rasters = [_raster(p) for p in (i1, i2, i3, i4)]
    shape = rasters[0].shape
    if any(r.shape != shape for r in rasters[1:]):
        raise ShapeError(f"pattern shapes differ: {[r.shape for r in rasters]}")
    if len(shape) != 2:
        raise ShapeError(f"patterns must be 2-D rasters, got shape {shape}")
    height, width = shape
    if not (0 <= row < height):
        raise ParameterError(f"row {row} outside [0, {height})")

    sin_term = rasters[3][row] - rasters[1][row]
    cos_term = rasters[0][row] - rasters[2][row]
    wrapped = np.arctan2(sin_term, cos_term)
    # arctan2 yields [-pi, pi]; fold the closed lower endpoint to +pi
    wrapped[wrapped == -np.pi] = np.pi
    undefined = (np.abs(sin_term) < CONTRAST_EPS) & (np.abs(cos_term) < CONTRAST_EPS)
    if undefined.any():
        wrapped = _fill_undefined(wrapped, undefined)
    return PhaseProfile(wrapped, "wrapped", center_index=width // 2)


def unwrap_1d(profile: PhaseProfile) -> PhaseProfile:
    """Sequential 2*pi-jump removal, anchored at the center column.

    Equivalent to unwrapping outward from center_index in both
    directions: the output differs from np.unwrap only by the global
    multiple of 2*pi that puts the center sample back in (-pi, pi].
    """
    if profile.state != "wrapped":
        raise ParameterError(f"unwrap_1d expects a wrapped profile, got {profile.state!r}")
    unwrapped = np.unwrap(profile.values)
    c = profile.center_index
    offset = 2.0 * np.pi * np.round((unwrapped[c] - profile.values[c]) / (2.0 * np.pi))
    return PhaseProfile(unwrapped - offset, "unwrapped", c)


def smooth_cubic(profile: PhaseProfile) -> PhaseProfile:
    """Least-squares cubic through the profile, evaluated per column.

    The fit runs on x scaled into [0, 1] for conditioning; coefficients
    are not exposed here, only the smoothed samples.
    """
    if profile.state == "wrapped":
        raise ParameterError("smooth_cubic expects an unwrapped profile")
    n = len(profile)
    if n < 4:
        raise InsufficientDataError(f"cubic smoothing needs >= 4 samples, got {n}")
    x = np.arange(n, dtype=np.float64)
    scale = float(n - 1)
    coeffs = np.polyfit(x / scale, profile.values, 3)
    smoothed = np.polyval(coeffs, x / scale)
    return PhaseProfile(smoothed, "smoothed", profile.center_index)
