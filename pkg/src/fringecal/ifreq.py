"""Instantaneous frequency of a fringe row by wavelet ridge detection.

A bank of analytic Morlet wavelets is convolved with the row; at each
column the frequency whose coefficient magnitude wins is the ridge.
A flat ridge across the central columns means the fringe carrier is
locally unmodulated there, i.e. the center of the image is effectively
distortion free, which is what licenses anchoring the linear fit on the
central points.

Convolution runs directly in the spatial domain: rows are short (a few
thousand samples), so direct evaluation beats transform round trips and
avoids wraparound artifacts.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from ._parallel import run_indexed

#: Morlet center frequency (radians); the classic trade-off value where
#: the admissibility correction is negligible.
OMEGA0 = 6.0

#: Kernel support is truncated at this many Gaussian standard deviations.
SUPPORT_SIGMAS = 4.0


@dataclass(frozen=True)
class RidgeResult:
    """Per-column ridge of the wavelet scalogram.

    frequencies[i] is the grid frequency with the largest coefficient
    magnitude at column i; ridge_indices holds its position in
    scale_grid. low_confidence marks columns within one wavelet support
    of either signal edge (cone of influence). no_ridge is set when the
    input carries no oscillation to detect.
    """

    frequencies: np.ndarray = field(repr=False)
    coefficients_max: np.ndarray = field(repr=False)
    scale_grid: np.ndarray = field(repr=False)
    ridge_indices: np.ndarray = field(repr=False)
    low_confidence: np.ndarray = field(repr=False)
    center_index: int
    no_ridge: bool = False


@dataclass(frozen=True)
class FlatnessReport:
    """Ridge deviation over a centered window, in grid steps."""

    window: int
    center_index: int
    max_deviation_steps: int
    median_frequency: float
    passed: bool


def default_frequency_grid(f0: float, n_scales: int = 200) -> np.ndarray:
    """Geometric grid bracketing an expected carrier generously.

    Spans f0/4 up to min(4*f0, 0.45) cycles/pixel.
    """
    if f0 <= 0:
        raise ParameterError(f"f0 must be positive, got {f0}")
    f_max = min(4.0 * f0, 0.45)
    f_min = f0 / 4.0
    if not f_min < f_max:
        raise ParameterError(f"cannot bracket f0={f0} below Nyquist")
    return np.geomspace(f_min, f_max, n_scales)


def _morlet_kernel(scale: float) -> np.ndarray:
    """L1-normalized analytic Morlet at the given scale, zero-mean.

    Truncation at SUPPORT_SIGMAS leaves a tiny residual mean, which is
    subtracted so a constant offset cannot leak into the magnitudes.
    """
    half = int(np.ceil(SUPPORT_SIGMAS * scale))
    t = np.arange(-half, half + 1, dtype=np.float64) / scale
    kernel = (np.pi ** -0.25) * np.exp(1j * OMEGA0 * t) * np.exp(-0.5 * t * t) / scale
    return kernel - kernel.mean()


def _magnitude_row(signal: np.ndarray, freq: float) -> np.ndarray:
    scale = OMEGA0 / (2.0 * np.pi * freq)
    kernel = _morlet_kernel(scale)
    half = (kernel.size - 1) // 2
    # full-mode convolution sliced to the signal span; 'same' would fail
    # when the kernel outgrows a short signal
    conv = np.convolve(signal.astype(np.complex128), kernel, mode="full")
    return np.abs(conv[half:half + signal.size])


def wavelet_ifreq(signal, f_min: float, f_max: float, n_scales: int = 200) -> RidgeResult:
    """Ridge frequencies of a 1-D intensity signal.

    The grid covers [f_min, f_max] geometrically with n_scales points;
    frequencies are in cycles/pixel and must sit inside (0, 0.5).
    """
    signal = np.asarray(signal, dtype=np.float64)
    if signal.ndim != 1:
        raise ParameterError(f"signal must be 1-D, got shape {signal.shape}")
    if signal.size < 64:
        raise ParameterError(f"signal too short for ridge analysis: {signal.size} < 64")
    if not (0.0 < f_min < f_max < 0.5):
        raise ParameterError(f"need 0 < f_min < f_max < 0.5, got [{f_min}, {f_max}]")
    if n_scales < 2:
        raise ParameterError(f"n_scales must be >= 2, got {n_scales}")

    grid = np.geomspace(f_min, f_max, n_scales)
    n = signal.size
    center = n // 2
    degenerate_grid = np.unique(grid).size < 2
    flat_signal = np.ptp(signal) == 0.0
    if degenerate_grid or flat_signal:
        return RidgeResult(
            frequencies=np.full(n, np.nan),
            coefficients_max=np.zeros(n),
            scale_grid=grid,
            ridge_indices=np.zeros(n, dtype=np.intp),
            low_confidence=np.ones(n, dtype=bool),
            center_index=center,
            no_ridge=True,
        )

    detrended = signal - signal.mean()
    rows = run_indexed(n_scales, lambda i: _magnitude_row(detrended, grid[i]))
    magnitudes = np.vstack(rows)

    ridge_idx = np.argmax(magnitudes, axis=0)
    columns = np.arange(n)
    best = magnitudes[ridge_idx, columns]

    # cone of influence: half support of the winning wavelet per column
    win_scale = OMEGA0 / (2.0 * np.pi * grid[ridge_idx])
    half_support = np.ceil(SUPPORT_SIGMAS * win_scale)
    low_conf = (columns < half_support) | (columns > n - 1 - half_support)

    return RidgeResult(
        frequencies=grid[ridge_idx],
        coefficients_max=best,
        scale_grid=grid,
        ridge_indices=ridge_idx,
        low_confidence=low_conf,
        center_index=center,
    )


def central_flatness(ridge: RidgeResult, window: int) -> FlatnessReport:
    """Max ridge deviation from its median over a centered window.

    Deviation is counted in grid steps (the grid is geometric, so a
    step is the natural resolution unit); the pass flag allows at most
    one step.
    """
    if window < 1 or window % 2 == 0:
        raise ParameterError(f"window must be odd and positive, got {window}")
    if ridge.no_ridge:
        raise ParameterError("no ridge was detected; flatness is undefined")
    c = ridge.center_index
    half = window // 2
    if c - half < 0 or c + half >= ridge.frequencies.size:
        raise ParameterError(
            f"window of {window} around column {c} exceeds [0, {ridge.frequencies.size})"
        )
    idx = ridge.ridge_indices[c - half:c + half + 1].astype(np.int64)
    median_idx = int(np.round(np.median(idx)))
    deviation = int(np.max(np.abs(idx - median_idx)))
    return FlatnessReport(
        window=window,
        center_index=c,
        max_deviation_steps=deviation,
        median_frequency=float(ridge.scale_grid[median_idx]),
        passed=deviation <= 1,
    )
