"""From smoothed radial phase to a radial distortion profile.

The smoothed central-row phase of a distorted fringe capture differs
from the ideal linear carrier only where the lens displaced pixels
radially. The chain here is:

1. fit_undistorted_line: least-squares line through the central
   n points (default 9); its slope k = 2*pi*f0 defines the carrier the
   lens did not distort.
2. modulated_phase: subtract that line from the whole row.
3. symmetrize: rotate the negative-radius branch 180 degrees about the
   center onto the positive branch and average, enforcing the radial
   symmetry assumption.
4. extend_profile: least-squares cubic over the measured radii,
   evaluated out to the image half-diagonal.
5. phase_to_distortion: delta_r(r) = delta_phi(r) / (2*pi*f0), the
   radial displacement in pixels at distorted radius r.

build_profile composes the five steps and rejects any result whose
forward map r + delta_r(r) is not strictly increasing, because the
remap stage must invert it.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InsufficientDataError,
    NonInvertibleProfileError,
    NumericError,
    ParameterError,
    ShapeError,
)
from .phase_demod import PhaseProfile


@dataclass(frozen=True)
class LinearFit:
    """Line k*x + phi0 fitted to the undistorted central phase."""

    k: float
    phi0: float

    def __post_init__(self):
        if not np.isfinite(self.k) or not np.isfinite(self.phi0):
            raise ParameterError("fit parameters must be finite")

    @property
    def f0(self) -> float:
        # derived, so the identity f0 = k/(2*pi) holds by construction
        return self.k / (2.0 * np.pi)


@dataclass(frozen=True)
class ModulatedPhase:
    """Modulated phase indexed by radial distance u >= 0 from center."""

    values: np.ndarray = field(repr=False)
    source: str = "positive-branch"

    def __post_init__(self):
        if self.values.ndim != 1:
            raise ShapeError(f"modulated phase must be 1-D, got {self.values.shape}")
        if self.source not in ("positive-branch", "averaged"):
            raise ParameterError(f"unknown source {self.source!r}")

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class DistortionProfile:
    """Radial distortion calibration result.

    cubic holds (a3, a2, a1, a0) of the extended modulated-phase
    polynomial delta_phi(r), r in distorted-image pixels; r_max is the
    ceiling of the image half-diagonal; dims is (width, height) of the
    calibration capture.
    """

    center: tuple
    f0: float
    cubic: tuple
    r_max: int
    dims: tuple

    def __post_init__(self):
        width, height = self.dims
        if width < 1 or height < 1:
            raise ParameterError(f"bad dims {self.dims}")
        if self.f0 <= 0 or not np.isfinite(self.f0):
            raise ParameterError(f"f0 must be positive and finite, got {self.f0}")
        if len(self.cubic) != 4 or not all(np.isfinite(c) for c in self.cubic):
            raise ParameterError(f"cubic must be 4 finite coefficients, got {self.cubic}")
        half_diag = math.hypot(width / 2.0, height / 2.0)
        # ceil convention: r_max covers the farthest corner, so it can
        # sit up to (but not including) 1 px above the exact value
        if not (0.0 <= self.r_max - half_diag < 1.0):
            raise ParameterError(
                f"r_max {self.r_max} inconsistent with half-diagonal {half_diag:.4f}"
            )

    def delta_phi(self, r):
        """Extended modulated phase at distorted radius r (radians)."""
        return np.polyval(self.cubic, r)

    def delta_r(self, r):
        """Radial displacement at distorted radius r (pixels)."""
        return self.delta_phi(r) / (2.0 * np.pi * self.f0)

    def forward_map(self, r):
        """Undistorted radius for distorted radius r: m(r) = r + delta_r."""
        return np.asarray(r, dtype=np.float64) + self.delta_r(r)

    def table(self):
        """(r, delta_r) sampled at 1-px steps over [0, r_max]."""
        r = np.arange(self.r_max + 1, dtype=np.float64)
        return r, self.delta_r(r)


def half_diagonal_radius(dims) -> int:
    """r_max for an image: ceiling of the center-to-corner distance."""
    width, height = dims
    if width < 1 or height < 1:
        raise ParameterError(f"bad dims {dims}")
    return int(math.ceil(math.hypot(width / 2.0, height / 2.0)))


def fit_undistorted_line(phase: PhaseProfile, n_points: int = 9) -> LinearFit:
    """Least-squares line over the central n_points of the phase.

    The window is centered on phase.center_index; the fit is computed
    on window-centered abscissae for stability and mapped back, so k
    and phi0 refer to absolute column coordinates.
    """
    if phase.state == "wrapped":
        raise ParameterError("fit requires an unwrapped or smoothed profile")
    if n_points < 3 or n_points % 2 == 0:
        raise ParameterError(f"n_points must be odd and >= 3, got {n_points}")
    c = phase.center_index
    half = n_points // 2
    if c - half < 0 or c + half >= len(phase):
        raise ParameterError(
            f"window of {n_points} around column {c} exceeds [0, {len(phase)})"
        )
    u = np.arange(-half, half + 1, dtype=np.float64)
    y = phase.values[c - half:c + half + 1]
    # centered window: sum(u) = 0 decouples the normal equations, so the
    # closed form is both exact in structure and better conditioned than
    # a generic solver on absolute columns
    k = float(np.dot(u, y) / np.dot(u, u))
    y_at_center = float(np.mean(y))
    if k <= 0:
        raise NumericError(
            f"central phase slope {k:.3e} is not positive; "
            "fringes must increase in phase along +x"
        )
    phi0 = y_at_center - k * c
    return LinearFit(k=float(k), phi0=float(phi0))


def modulated_phase(phase: PhaseProfile, fit: LinearFit) -> np.ndarray:
    """Signed per-column modulated phase: values - (k*x + phi0)."""
    if phase.state == "wrapped":
        raise ParameterError("modulated phase requires an unwrapped or smoothed profile")
    x = np.arange(len(phase), dtype=np.float64)
    return phase.values - (fit.k * x + fit.phi0)


def symmetrize(delta: np.ndarray, center_index: int) -> ModulatedPhase:
    """Average the 180-degree-rotated negative branch onto the positive.

    avg(u) = (delta(c + u) - delta(c - u)) / 2 for u = 0 .. the largest
    radius present on both sides. The sign flip is the point rotation: a
    mirror without it would cancel the antisymmetric signal instead of
    reinforcing it.
    """
    delta = np.asarray(delta, dtype=np.float64)
    if delta.ndim != 1:
        raise ShapeError(f"expected 1-D modulated phase, got {delta.shape}")
    n = delta.size
    if not (0 < center_index < n - 1):
        raise ParameterError(f"center {center_index} must be interior to [0, {n - 1}]")
    u_max = min(center_index, n - 1 - center_index)
    u = np.arange(u_max + 1)
    avg = 0.5 * (delta[center_index + u] - delta[center_index - u])
    return ModulatedPhase(avg, source="averaged")


def _scaled_cubic_fit(u: np.ndarray, values: np.ndarray) -> tuple:
    """Cubic least squares with abscissa scaled into [0, 1].

    Scaling keeps the Vandermonde matrix well conditioned for radii in
    the hundreds; coefficients are rescaled back exactly (powers of the
    scale divide out).
    """
    scale = float(u[-1]) if u[-1] > 0 else 1.0
    b = np.polyfit(u / scale, values, 3)
    return tuple(b / scale ** np.array([3.0, 2.0, 1.0, 0.0]))


def extend_profile(avg: ModulatedPhase, r_max: int) -> tuple:
    """Cubic (a3, a2, a1, a0) fitted over the measured radii.

    The polynomial extrapolates the modulated phase from the measured
    span (at most half the row) out to the half-diagonal r_max, where
    the image corners live.
    """
    n = len(avg)
    if n < 4:
        raise InsufficientDataError(f"cubic extension needs >= 4 samples, got {n}")
    if r_max < n:
        raise ParameterError(f"r_max {r_max} shorter than the measured span {n}")
    u = np.arange(n, dtype=np.float64)
    return _scaled_cubic_fit(u, avg.values)


def phase_to_distortion(profile: DistortionProfile, r):
    """delta_r(r) = delta_phi(r) / (2*pi*f0), in pixels."""
    if profile.f0 <= 0:
        raise ParameterError(f"f0 must be positive, got {profile.f0}")
    return profile.delta_r(r)


def assert_invertible(profile: DistortionProfile) -> None:
    """Reject profiles whose forward map is not strictly increasing.

    Checked on the 1-px table, the same sampling the remap inversion
    uses.
    """
    r, dr = profile.table()
    m = r + dr
    if not np.all(np.isfinite(m)):
        raise NonInvertibleProfileError("forward map is not finite over [0, r_max]")
    if np.any(np.diff(m) <= 0.0):
        bad = int(np.flatnonzero(np.diff(m) <= 0.0)[0])
        raise NonInvertibleProfileError(
            f"forward map r + delta_r(r) stops increasing near r = {bad}"
        )


def build_profile(phase: PhaseProfile, dims, n_points: int = 9) -> DistortionProfile:
    """Compose fit, subtraction, symmetrization and extension.

    dims is (width, height) of the calibration capture; the distortion
    center is fixed at the geometric image center (width/2, height/2)
    and the phase row must have been demodulated from these images.
    """
    if phase.state != "smoothed":
        raise ParameterError(f"build_profile expects a smoothed profile, got {phase.state!r}")
    width, height = dims
    if len(phase) != width:
        raise ShapeError(f"profile length {len(phase)} does not match width {width}")
    if phase.center_index != width // 2:
        raise ParameterError(
            f"center_index {phase.center_index} is not the central column {width // 2}"
        )
    fit = fit_undistorted_line(phase, n_points)
    delta = modulated_phase(phase, fit)
    averaged = symmetrize(delta, phase.center_index)
    r_max = half_diagonal_radius(dims)
    cubic = extend_profile(averaged, r_max)
    profile = DistortionProfile(
        center=(width / 2.0, height / 2.0),
        f0=fit.f0,
        cubic=cubic,
        r_max=r_max,
        dims=(int(width), int(height)),
    )
    assert_invertible(profile)
    return profile


def fit_profile_from_delta_r(r, delta_r, f0: float, dims) -> DistortionProfile:
    """Build a profile from known delta_r samples (oracle path).

    Used to package simulator ground truth in the same form the
    measured pipeline produces: delta_phi = 2*pi*f0*delta_r is fitted
    with the same scaled cubic.
    """
    r = np.asarray(r, dtype=np.float64)
    delta_r = np.asarray(delta_r, dtype=np.float64)
    if r.shape != delta_r.shape or r.ndim != 1:
        raise ShapeError(f"radius and delta_r shapes differ: {r.shape} vs {delta_r.shape}")
    if r.size < 4:
        raise InsufficientDataError(f"need >= 4 samples, got {r.size}")
    if f0 <= 0:
        raise ParameterError(f"f0 must be positive, got {f0}")
    cubic = _scaled_cubic_fit(r, 2.0 * np.pi * f0 * delta_r)
    profile = DistortionProfile(
        center=(dims[0] / 2.0, dims[1] / 2.0),
        f0=float(f0),
        cubic=cubic,
        r_max=half_diagonal_radius(dims),
        dims=(int(dims[0]), int(dims[1])),
    )
    assert_invertible(profile)
    return profile
