"""Phase-shifted sinusoidal fringe templates.

The calibration templates are vertical fringes: intensity varies as a
cosine along x and is constant along y. Four templates with phase
offsets of 0, pi/2, pi and 3*pi/2 form one calibration set. Patterns
are kept as float64 rasters internally and quantized only on export so
algorithmic error stays separate from quantization error.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ShapeError

#: Default background and modulation for 8-bit export: 128 +/- 100 uses
#: most of the range without clipping.
DEFAULT_A = 128.0
DEFAULT_B = 100.0


@dataclass(frozen=True)
class FringeParams:
    """Parameters of one fringe template.

    f0 is the carrier frequency in cycles/pixel along x; A is the
    background intensity, B the modulation amplitude (same arbitrary
    units); shift_index in {0, 1, 2, 3} selects the phase shift
    shift_index * pi/2.
    """

    width: int
    height: int
    f0: float
    A: float = DEFAULT_A
    B: float = DEFAULT_B
    shift_index: int = 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ParameterError(f"dimensions must be >= 1, got {self.width}x{self.height}")
        if not np.isfinite(self.f0) or self.f0 <= 0:
            raise ParameterError(f"f0 must be positive, got {self.f0}")
        if self.A <= 0 or self.B <= 0:
            raise ParameterError(f"A and B must be positive, got A={self.A}, B={self.B}")
        if self.A - self.B < 0:
            raise ParameterError(f"A - B must be >= 0, got {self.A - self.B}")
        if self.shift_index not in (0, 1, 2, 3):
            raise ParameterError(f"shift_index must be in {{0,1,2,3}}, got {self.shift_index}")

    @property
    def phase_shift(self) -> float:
        return self.shift_index * (np.pi / 2.0)


@dataclass(frozen=True)
class FringePattern:
    """A real-valued grayscale raster, row-major, shape (height, width)."""

    width: int
    height: int
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.data.shape != (self.height, self.width):
            raise ShapeError(
                f"data shape {self.data.shape} does not match {self.height}x{self.width}"
            )
        if not np.all(np.isfinite(self.data)):
            raise ParameterError("pattern intensities must be finite")


def generate_fringe(params: FringeParams) -> FringePattern:
    """Render one template: A + B*cos(2*pi*f0*x + shift_index*pi/2).

    Rows are bit-identical by construction (one row is computed and
    tiled).
    """
    x = np.arange(params.width, dtype=np.float64)
    row = params.A + params.B * np.cos(2.0 * np.pi * params.f0 * x + params.phase_shift)
    data = np.tile(row, (params.height, 1))
    return FringePattern(params.width, params.height, data)


def generate_template_set(width, height, f0, A=DEFAULT_A, B=DEFAULT_B):
    """The four templates in shift order 0, pi/2, pi, 3*pi/2.

    Opposite pairs satisfy I1 + I3 = I2 + I4 = 2A exactly up to float
    rounding.
    """
    return tuple(
        generate_fringe(FringeParams(width, height, f0, A, B, shift_index=k))
        for k in range(4)
    )


def quantize(data: np.ndarray, depth: int = 8) -> np.ndarray:
    """Round a float raster to unsigned integers of the given bit depth.

    Raises when values fall outside the representable range rather than
    clipping silently; templates are designed so A + B fits the depth.
    """
    if depth == 8:
        limit, dtype = 255, np.uint8
    elif depth == 16:
        limit, dtype = 65535, np.uint16
    else:
        raise ParameterError(f"depth must be 8 or 16, got {depth}")
    rounded = np.rint(np.asarray(data, dtype=np.float64))
    if rounded.min() < 0 or rounded.max() > limit:
        raise ParameterError(
            f"intensities [{rounded.min()}, {rounded.max()}] exceed {depth}-bit range"
        )
    return rounded.astype(dtype)
