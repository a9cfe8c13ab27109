"""Synthetic wide-angle lens: the ground-truth oracle for the pipeline.

A RadialModel maps undistorted radius r_u to captured radius r_d.
Scenes are analytic functions of undistorted coordinates; rendering a
distorted capture samples the scene at r_u = model_inverse(r_d) along
the same ray, which is exact (no resampling of a rendered image is
involved). Ground-truth displacement at distorted radius r is therefore
model_inverse(r) - r, directly comparable with a measured profile.

Two classic parameterizations are provided:

- polynomial: r_d = r_u * (1 + k1*r_u^2 + k2*r_u^4)
- division:   r_d = r_u / (1 + lambda*r_u^2)

A positive division lambda (or negative k1) compresses the periphery:
barrel distortion, displacement positive when measured in the captured
frame.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NumericError, ParameterError
from .distortion_profile import DistortionProfile, fit_profile_from_delta_r, half_diagonal_radius
from .template_gen import DEFAULT_A, DEFAULT_B

#: Range over which monotonicity is verified at model construction;
#: rendering re-checks the actual frame range.
DEFAULT_MONOTONE_RANGE = 600.0


@dataclass(frozen=True)
class RadialModel:
    """Parametric radial lens map, ground truth for the simulator.

    kind is "polynomial" or "division"; params holds (k1, k2) or
    (lambda,). center is the distortion center in pixels, or None to
    use the frame center at render time.
    """

    kind: str
    params: tuple
    center: tuple = None

    def __post_init__(self):
        if self.kind not in ("polynomial", "division"):
            raise ParameterError(f"unknown model kind {self.kind!r}")
        n_expected = 2 if self.kind == "polynomial" else 1
        if len(self.params) != n_expected or not all(np.isfinite(p) for p in self.params):
            raise ParameterError(f"{self.kind} model needs {n_expected} finite params")

    @staticmethod
    def polynomial(k1: float, k2: float = 0.0, center=None, r_check=DEFAULT_MONOTONE_RANGE):
        model = RadialModel("polynomial", (float(k1), float(k2)), center)
        _check_monotone(model, r_check)
        return model

    @staticmethod
    def division(lam: float, center=None, r_check=DEFAULT_MONOTONE_RANGE):
        model = RadialModel("division", (float(lam),), center)
        _check_monotone(model, r_check)
        return model

    @staticmethod
    def identity(center=None):
        return RadialModel("polynomial", (0.0, 0.0), center)


def _check_monotone(model: RadialModel, r_limit: float) -> None:
    """Reject parameterizations that fold the field back on itself."""
    if r_limit <= 0:
        return
    r = np.linspace(0.0, r_limit, 4097)
    try:
        r_d = model_forward(model, r)
    except ParameterError:
        raise
    if np.any(np.diff(r_d) <= 0.0) or not np.all(np.isfinite(r_d)):
        raise ParameterError(
            f"{model.kind} model {model.params} is not strictly increasing on [0, {r_limit}]"
        )


def model_forward(model: RadialModel, r_u):
    """Captured radius for undistorted radius r_u (closed form)."""
    r_u = np.asarray(r_u, dtype=np.float64)
    if np.any(r_u < 0):
        raise ParameterError("undistorted radius must be >= 0")
    if model.kind == "polynomial":
        k1, k2 = model.params
        r2 = r_u * r_u
        return r_u * (1.0 + k1 * r2 + k2 * r2 * r2)
    lam = model.params[0]
    return r_u / (1.0 + lam * r_u * r_u)


def model_inverse(model: RadialModel, r_d):
    """Undistorted radius with model_forward(r_u) = r_d within 1e-9 px.

    The division model inverts in closed form (the root continuous at
    zero, written division-safe as 2*r_d / (1 + sqrt(1 - 4*lambda*r_d^2))
    so the identity case stays exact). The polynomial model runs damped
    Newton from r_u = r_d, which converges on any monotone
    parameterization.
    """
    r_d = np.asarray(r_d, dtype=np.float64)
    if np.any(r_d < 0):
        raise ParameterError("captured radius must be >= 0")
    if model.kind == "division":
        lam = model.params[0]
        disc = 1.0 - 4.0 * lam * r_d * r_d
        if np.any(disc < 0.0):
            raise ParameterError(
                f"radius {float(np.max(r_d)):.1f} outside the invertible range of "
                f"lambda={lam}"
            )
        return 2.0 * r_d / (1.0 + np.sqrt(disc))
    k1, k2 = model.params
    if k1 == 0.0 and k2 == 0.0:
        return r_d.copy() if r_d.ndim else float(r_d)
    r_u = r_d.astype(np.float64).copy()
    for _ in range(100):
        r2 = r_u * r_u
        residual = r_u * (1.0 + k1 * r2 + k2 * r2 * r2) - r_d
        if np.all(np.abs(residual) < 1e-12):
            break
        slope = 1.0 + 3.0 * k1 * r2 + 5.0 * k2 * r2 * r2
        step = residual / slope
        # keep iterates in the physical half-line
        r_u = np.maximum(r_u - step, 0.0)
    else:
        raise NumericError(f"model inversion did not converge for {model.kind} {model.params}")
    return r_u if r_d.ndim else float(r_u)


def ground_truth_delta_r(model: RadialModel, r):
    """Exact radial displacement at distorted radius r: r_u(r) - r."""
    r = np.asarray(r, dtype=np.float64)
    return model_inverse(model, r) - r


def ground_truth_profile(model: RadialModel, dims, f0: float) -> DistortionProfile:
    """Package exact displacement as a DistortionProfile.

    The cubic is fitted to the true curve over [0, r_max], so the
    profile matches the measured pipeline's representation; the fit
    residual (not measurement error) is its only deviation from truth.
    """
    r = np.arange(half_diagonal_radius(dims) + 1, dtype=np.float64)
    return fit_profile_from_delta_r(r, ground_truth_delta_r(model, r), f0, dims)


# ---------------------------------------------------------------------------
# scenes: analytic functions of undistorted pixel coordinates


def fringe_scene(f0: float, A: float = DEFAULT_A, B: float = DEFAULT_B,
                 shift_index: int = 0, freq_scale: float = 1.0):
    """Vertical sinusoidal fringes; freq_scale stands in for the screen
    distance (a nearer screen shows proportionally more cycles per
    pixel, leaving the lens geometry untouched)."""
    if f0 <= 0 or freq_scale <= 0:
        raise ParameterError(f"f0 and freq_scale must be positive, got {f0}, {freq_scale}")
    if shift_index not in (0, 1, 2, 3):
        raise ParameterError(f"shift_index must be in {{0,1,2,3}}, got {shift_index}")
    f_eff = f0 * freq_scale
    shift = shift_index * (np.pi / 2.0)

    def scene(x, y):
        return A + B * np.cos(2.0 * np.pi * f_eff * x + shift)

    return scene


def checkerboard_scene(square: int = 64, low: float = 0.0, high: float = 255.0,
                       softness: float = 0.0):
    """Checkerboard with optionally softened edges.

    softness is the approximate edge half-width in pixels; 0 gives hard
    edges. Soft edges model an optically band-limited capture and are
    what preserve subpixel edge positions through rendering; a hard
    analytic checker quantizes edge locations to whole pixels.
    """
    if square < 1:
        raise ParameterError(f"square must be >= 1, got {square}")
    if softness < 0:
        raise ParameterError(f"softness must be >= 0, got {softness}")
    mid = 0.5 * (low + high)
    amp = 0.5 * (high - low)

    def scene(x, y):
        gx = np.sin(np.pi * np.asarray(x, dtype=np.float64) / square)
        gy = np.sin(np.pi * np.asarray(y, dtype=np.float64) / square)
        if softness == 0.0:
            v = np.sign(gx) * np.sign(gy)
        else:
            gain = square / (np.pi * softness)
            v = np.tanh(gain * gx) * np.tanh(gain * gy)
        return mid + amp * v

    return scene


def grid_scene(spacing: int = 64, line_width: float = 3.0,
               background: float = 255.0, line_value: float = 0.0):
    """Straight dark rulings every `spacing` pixels in both directions."""
    if spacing < 2 or line_width <= 0 or line_width >= spacing:
        raise ParameterError(f"bad grid geometry: spacing={spacing}, line_width={line_width}")

    def scene(x, y):
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        dx = np.abs(x - spacing * np.round(x / spacing))
        dy = np.abs(y - spacing * np.round(y / spacing))
        on_line = (dx < line_width / 2.0) | (dy < line_width / 2.0)
        return np.where(on_line, line_value, background)

    return scene


# ---------------------------------------------------------------------------
# rendering


def render_distorted(scene, model: RadialModel, dims, noise_sigma: float = 0.0,
                     vignette_strength: float = 0.0, seed=None) -> np.ndarray:
    """Synthesize the capture of a scene through the lens model.

    dims is (width, height). Each captured pixel at radius r_d from the
    distortion center takes the scene value at radius
    r_u = model_inverse(r_d) along the same ray. Optional multiplicative
    vignetting v = 1 - strength*(r_d/half_diag)^2 and additive Gaussian
    noise (gray levels, seeded) model capture imperfections.
    """
    width, height = int(dims[0]), int(dims[1])
    if width < 1 or height < 1:
        raise ParameterError(f"bad dims {dims}")
    if noise_sigma < 0:
        raise ParameterError(f"noise_sigma must be >= 0, got {noise_sigma}")
    if not (0.0 <= vignette_strength <= 1.0):
        raise ParameterError(f"vignette_strength must be in [0, 1], got {vignette_strength}")

    x0, y0 = model.center if model.center is not None else (width / 2.0, height / 2.0)
    yy, xx = np.indices((height, width), dtype=np.float64)
    dx = xx - x0
    dy = yy - y0
    r_d = np.hypot(dx, dy)
    _check_monotone_frame(model, float(r_d.max()))

    r_u = model_inverse(model, r_d)
    safe_r = np.where(r_d > 0.0, r_d, 1.0)
    scale = np.where(r_d > 0.0, r_u / safe_r, 1.0)
    data = np.asarray(scene(x0 + scale * dx, y0 + scale * dy), dtype=np.float64)

    if vignette_strength > 0.0:
        half_diag = np.hypot(width / 2.0, height / 2.0)
        data = data * (1.0 - vignette_strength * (r_d / half_diag) ** 2)
    if noise_sigma > 0.0:
        rng = np.random.default_rng(seed)
        data = data + rng.normal(0.0, noise_sigma, size=data.shape)
    return data


def _check_monotone_frame(model: RadialModel, r_needed: float) -> None:
    """Monotonicity over the undistorted radii this frame actually uses."""
    r_u_max = float(model_inverse(model, np.array([max(r_needed, 1.0)]))[0])
    fwd = model_forward(model, np.linspace(0.0, r_u_max, 2049))
    if not np.all(np.isfinite(fwd)) or np.any(np.diff(fwd) <= 0.0):
        raise NumericError(
            f"{model.kind} model {model.params} folds within the frame radius {r_needed:.0f}"
        )


def render_template_set(model: RadialModel, dims, f0: float, A: float = DEFAULT_A,
                        B: float = DEFAULT_B, freq_scale: float = 1.0,
                        noise_sigma: float = 0.0, vignette_strength: float = 0.0,
                        seed=None):
    """The four distorted fringe captures (shift order 0..3*pi/2).

    Noise, when enabled, is drawn from one seeded generator across the
    four frames, so a single seed pins the whole set.
    """
    rng = np.random.default_rng(seed) if noise_sigma > 0.0 else None
    frames = []
    for k in range(4):
        frame = render_distorted(
            fringe_scene(f0, A, B, shift_index=k, freq_scale=freq_scale),
            model, dims, vignette_strength=vignette_strength,
        )
        if rng is not None:
            frame = frame + rng.normal(0.0, noise_sigma, size=frame.shape)
        frames.append(frame)
    return tuple(frames)
