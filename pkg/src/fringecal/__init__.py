"""Radial lens distortion calibration from phase-shifted fringe images.

Display four sinusoidal fringe templates on a flat screen, capture them
through the lens under test, and this package turns the captures into a
radial distortion profile and undistorts arbitrary images with it. A
synthetic-lens simulator provides ground truth for closed-loop testing.

Typical flow::

    from fringecal import (
        RadialModel, render_template_set, four_step_phase, unwrap_1d,
        smooth_cubic, build_profile, calibrate_image,
    )

    lens = RadialModel.division(5e-7)
    i1, i2, i3, i4 = render_template_set(lens, (512, 512), f0=0.0625)
    wrapped = four_step_phase(i1, i2, i3, i4, row=256)
    profile = build_profile(smooth_cubic(unwrap_1d(wrapped)), (512, 512))
    straight = calibrate_image(distorted_image, profile)
"""

from .errors import (
    FringecalError,
    InsufficientDataError,
    NonInvertibleProfileError,
    NumericError,
    ParameterError,
    ShapeError,
)
from .template_gen import (
    DEFAULT_A,
    DEFAULT_B,
    FringeParams,
    FringePattern,
    generate_fringe,
    generate_template_set,
    quantize,
)
from .phase_demod import PhaseProfile, four_step_phase, smooth_cubic, unwrap_1d
from .ifreq import (
    FlatnessReport,
    RidgeResult,
    central_flatness,
    default_frequency_grid,
    wavelet_ifreq,
)
from .distortion_profile import (
    DistortionProfile,
    LinearFit,
    ModulatedPhase,
    build_profile,
    extend_profile,
    fit_profile_from_delta_r,
    fit_undistorted_line,
    half_diagonal_radius,
    modulated_phase,
    phase_to_distortion,
    symmetrize,
)
from .remap import RemapGrid, bilinear_sample, build_remap_grid, calibrate_image
from .simulator import (
    RadialModel,
    checkerboard_scene,
    fringe_scene,
    grid_scene,
    ground_truth_delta_r,
    ground_truth_profile,
    model_forward,
    model_inverse,
    render_distorted,
    render_template_set,
)
from .io_formats import (
    export_curve_csv,
    export_curve_svg,
    load_image,
    load_profile,
    profile_to_document,
    save_image,
    save_profile,
)

__version__ = "0.1.0"

__all__ = [
    "FringecalError", "ParameterError", "InsufficientDataError", "ShapeError",
    "NumericError", "NonInvertibleProfileError",
    "FringeParams", "FringePattern", "generate_fringe", "generate_template_set",
    "quantize", "DEFAULT_A", "DEFAULT_B",
    "PhaseProfile", "four_step_phase", "unwrap_1d", "smooth_cubic",
    "RidgeResult", "FlatnessReport", "wavelet_ifreq", "central_flatness",
    "default_frequency_grid",
    "LinearFit", "ModulatedPhase", "DistortionProfile", "fit_undistorted_line",
    "modulated_phase", "symmetrize", "extend_profile", "phase_to_distortion",
    "build_profile", "fit_profile_from_delta_r", "half_diagonal_radius",
    "RemapGrid", "build_remap_grid", "bilinear_sample", "calibrate_image",
    "RadialModel", "model_forward", "model_inverse", "ground_truth_delta_r",
    "ground_truth_profile", "fringe_scene", "checkerboard_scene", "grid_scene",
    "render_distorted", "render_template_set",
    "save_image", "load_image", "save_profile", "load_profile",
    "profile_to_document", "export_curve_csv", "export_curve_svg",
    "__version__",
]
