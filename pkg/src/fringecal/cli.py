"""Command-line surface for a full calibration session.

Subcommands:

- gen-templates: write the four phase-shifted fringe templates to show
  on the display.
- calibrate: turn four captured fringe images into a distortion
  profile JSON (optionally with report CSV/SVG artifacts).
- apply: undistort an image with a saved profile.
- simulate: synthesize distorted captures and ground truth with the
  built-in lens model, for closed-loop testing without hardware.

Exit codes: 0 success, 2 parameter error, 3 shape mismatch, 4 numeric
failure (e.g. a non-invertible profile). FRINGECAL_THREADS caps worker
threads for the resampling and wavelet sweeps.
"""

import argparse
import logging
import os
import sys

import numpy as np

from .errors import FringecalError, ParameterError, ShapeError
from . import io_formats
from .distortion_profile import build_profile, half_diagonal_radius, modulated_phase, \
    fit_undistorted_line
from .ifreq import central_flatness, default_frequency_grid, wavelet_ifreq
from .phase_demod import four_step_phase, smooth_cubic, unwrap_1d
from .remap import build_remap_grid, calibrate_image
from .simulator import (
    RadialModel,
    checkerboard_scene,
    grid_scene,
    ground_truth_delta_r,
    render_distorted,
    render_template_set,
)
from .template_gen import generate_template_set, quantize

log = logging.getLogger("fringecal")


def _positive(kind):
    def parse(text):
        value = kind(text)
        if value <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fringecal",
        description="Radial lens distortion calibration from phase-shifted fringe images.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-templates", help="write the four fringe templates")
    p.add_argument("--width", type=_positive(int), default=1080)
    p.add_argument("--height", type=_positive(int), default=1920)
    p.add_argument("--f0", type=_positive(float), default=0.0625,
                   help="carrier frequency, cycles/pixel (default 1/16)")
    p.add_argument("--a", type=float, default=128.0, help="background intensity")
    p.add_argument("--b", type=float, default=100.0, help="modulation amplitude")
    p.add_argument("--depth", type=int, choices=(8, 16), default=8)
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_gen_templates)

    p = sub.add_parser("calibrate", help="measure a distortion profile from four captures")
    p.add_argument("--images", nargs=4, required=True, metavar=("I1", "I2", "I3", "I4"),
                   help="captures with phase shifts 0, pi/2, pi, 3*pi/2")
    p.add_argument("--out", required=True, help="profile JSON path")
    p.add_argument("--row", type=int, default=None,
                   help="row to demodulate (default: central row)")
    p.add_argument("--n-points", type=int, default=9,
                   help="central points for the undistorted line fit")
    p.add_argument("--window", type=int, default=9,
                   help="columns for the ridge flatness check")
    p.add_argument("--n-scales", type=int, default=200,
                   help="frequency grid size for the ridge sweep")
    p.add_argument("--report", action="store_true",
                   help="also write ridge/modulated-phase/delta-r CSVs and an SVG plot")
    p.add_argument("--provenance", default="", help="free-text capture metadata")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("apply", help="undistort an image with a saved profile")
    p.add_argument("--profile", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--fill", type=float, default=0.0,
                   help="value for pixels that map outside the capture")
    p.add_argument("--expand", action="store_true",
                   help="grow the canvas to hold the whole undistorted frame")
    p.add_argument("--force-rebuild", action="store_true",
                   help="remap even when image dims differ from the profile")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("simulate", help="render distorted scenes with a synthetic lens")
    p.add_argument("--model", choices=("division", "polynomial", "identity"),
                   default="division")
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="division model coefficient")
    p.add_argument("--k1", type=float, default=None, help="polynomial r^2 coefficient")
    p.add_argument("--k2", type=float, default=0.0, help="polynomial r^4 coefficient")
    p.add_argument("--dims", type=_positive(int), nargs=2, default=(512, 512),
                   metavar=("W", "H"))
    p.add_argument("--scene", choices=("fringe", "checker", "grid", "all"), default="fringe")
    p.add_argument("--f0", type=_positive(float), default=0.0625)
    p.add_argument("--freq-scale", type=_positive(float), default=1.0,
                   help="carrier scale standing in for the screen distance")
    p.add_argument("--a", type=float, default=128.0)
    p.add_argument("--b", type=float, default=100.0)
    p.add_argument("--square", type=_positive(int), default=64, help="checker square size")
    p.add_argument("--softness", type=float, default=0.0,
                   help="checker edge half-width in px (0 = hard)")
    p.add_argument("--spacing", type=_positive(int), default=64, help="grid line spacing")
    p.add_argument("--line-width", type=_positive(float), default=3.0)
    p.add_argument("--noise-sigma", type=float, default=0.0,
                   help="additive Gaussian noise, gray levels")
    p.add_argument("--vignette", type=float, default=0.0,
                   help="radial brightness falloff strength in [0, 1]")
    p.add_argument("--seed", type=int, default=0, help="noise seed")
    p.add_argument("--depth", type=int, choices=(8, 16), default=8)
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_simulate)
    return parser


# ---------------------------------------------------------------------------
# command handlers


def cmd_gen_templates(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    patterns = generate_template_set(args.width, args.height, args.f0, args.a, args.b)
    for k, pattern in enumerate(patterns):
        path = os.path.join(args.out, f"template_{k}.png")
        io_formats.save_image(path, quantize(pattern.data, args.depth))
        log.info("wrote %s", path)
    print(f"f0 = {args.f0}")
    print(f"wrote 4 templates ({args.width}x{args.height}, {args.depth}-bit) to {args.out}")
    return 0


def _load_capture_set(paths):
    images = [io_formats.load_image(p) for p in paths]
    arrays = []
    for path, img in zip(paths, images):
        if img.ndim != 2:
            raise ShapeError(f"{path}: calibration captures must be grayscale")
        arrays.append(img.astype(np.float64))
    shape = arrays[0].shape
    for path, arr in zip(paths, arrays):
        if arr.shape != shape:
            raise ShapeError(f"capture sizes differ: {path} is {arr.shape}, expected {shape}")
    return arrays


def cmd_calibrate(args) -> int:
    i1, i2, i3, i4 = _load_capture_set(args.images)
    height, width = i1.shape
    row = args.row if args.row is not None else height // 2
    log.info("demodulating row %d of %dx%d captures", row, width, height)

    wrapped = four_step_phase(i1, i2, i3, i4, row)
    smoothed = smooth_cubic(unwrap_1d(wrapped))
    profile = build_profile(smoothed, (width, height), n_points=args.n_points)
    io_formats.save_profile(profile, args.out, provenance=args.provenance)

    grid = default_frequency_grid(profile.f0, args.n_scales)
    ridge = wavelet_ifreq(i1[row], float(grid[0]), float(grid[-1]), args.n_scales)
    flatness = central_flatness(ridge, args.window)

    print(f"f0 = {profile.f0:.6f} cycles/px")
    print(f"r_max = {profile.r_max} px")
    if flatness.passed:
        print(f"central flatness: pass ({flatness.max_deviation_steps} grid steps "
              f"over {flatness.window} columns)")
    else:
        print(f"warning: central flatness check failed "
              f"({flatness.max_deviation_steps} grid steps over {flatness.window} columns); "
              "the central region may be distorted")
    print(f"wrote {args.out}")

    if args.report:
        out_dir = os.path.dirname(os.path.abspath(args.out))
        ridge_path = os.path.join(out_dir, "ridge.csv")
        lines = ["column,frequency,magnitude"]
        lines += [f"{i},{float(f)!r},{float(m)!r}" for i, (f, m)
                  in enumerate(zip(ridge.frequencies, ridge.coefficients_max))]
        io_formats.atomic_write_text(ridge_path, "\n".join(lines) + "\n")

        fit = fit_undistorted_line(smoothed, args.n_points)
        delta = modulated_phase(smoothed, fit)
        mod_path = os.path.join(out_dir, "modulated_phase.csv")
        lines = ["column,delta_phi"]
        lines += [f"{i},{float(d)!r}" for i, d in enumerate(delta)]
        io_formats.atomic_write_text(mod_path, "\n".join(lines) + "\n")

        csv_path = os.path.join(out_dir, "delta_r.csv")
        svg_path = os.path.join(out_dir, "delta_r.svg")
        io_formats.export_curve_csv(profile, csv_path)
        io_formats.export_curve_svg(profile, svg_path)
        print(f"report: {ridge_path}, {mod_path}, {csv_path}, {svg_path}")
    return 0


def _expanded_dims(profile, src_dims):
    """Canvas that holds every source border pixel after undistortion."""
    src_w, src_h = src_dims
    cx, cy = src_w / 2.0, src_h / 2.0
    edge_x = np.arange(src_w, dtype=np.float64)
    edge_y = np.arange(src_h, dtype=np.float64)
    border_x = np.concatenate([edge_x, edge_x,
                               np.zeros(src_h), np.full(src_h, src_w - 1.0)])
    border_y = np.concatenate([np.zeros(src_w), np.full(src_w, src_h - 1.0),
                               edge_y, edge_y])
    dx = border_x - cx
    dy = border_y - cy
    r_src = np.minimum(np.hypot(dx, dy), float(profile.r_max))
    r_out = r_src + profile.delta_r(r_src)
    scale = np.where(r_src > 0, r_out / np.where(r_src > 0, r_src, 1.0), 1.0)
    half_x = float(np.max(np.abs(scale * dx)))
    half_y = float(np.max(np.abs(scale * dy)))
    return 2 * int(np.ceil(half_x)), 2 * int(np.ceil(half_y))


def cmd_apply(args) -> int:
    profile = io_formats.load_profile(args.profile)
    image = io_formats.load_image(args.input)
    height, width = image.shape[:2]

    if (width, height) != profile.dims and not args.force_rebuild:
        raise ShapeError(
            f"image is {width}x{height} but the profile was calibrated at "
            f"{profile.dims[0]}x{profile.dims[1]}; pass --force-rebuild to remap anyway"
        )
    if args.expand:
        out_dims = _expanded_dims(profile, (width, height))
        log.info("expanded canvas: %dx%d", *out_dims)
        grid = build_remap_grid(profile, out_dims=out_dims, src_dims=(width, height))
        result = calibrate_image(image, grid, fill=args.fill)
    else:
        result = calibrate_image(image, profile, fill=args.fill,
                                 allow_rebuild=args.force_rebuild)

    limit = 255 if image.dtype == np.uint8 else 65535
    out = np.clip(np.rint(result), 0, limit).astype(image.dtype)
    io_formats.save_image(args.out, out)
    print(f"wrote {args.out} ({out.shape[1]}x{out.shape[0]})")
    return 0


def _build_model(args) -> RadialModel:
    r_check = float(half_diagonal_radius(args.dims))
    if args.model == "identity":
        return RadialModel.identity()
    if args.model == "division":
        if args.lam is None:
            raise ParameterError("--lambda is required for the division model")
        return RadialModel.division(args.lam, r_check=r_check)
    if args.k1 is None:
        raise ParameterError("--k1 is required for the polynomial model")
    return RadialModel.polynomial(args.k1, args.k2, r_check=r_check)


def cmd_simulate(args) -> int:
    if args.noise_sigma < 0:
        raise ParameterError(f"--noise-sigma must be >= 0, got {args.noise_sigma}")
    model = _build_model(args)
    dims = tuple(args.dims)
    os.makedirs(args.out, exist_ok=True)
    limit = 255 if args.depth == 8 else 65535
    written = []

    def write(name, data):
        path = os.path.join(args.out, name)
        io_formats.save_image(path, quantize(np.clip(data, 0, limit), args.depth))
        written.append(path)

    if args.scene in ("fringe", "all"):
        frames = render_template_set(
            model, dims, args.f0, args.a, args.b, freq_scale=args.freq_scale,
            noise_sigma=args.noise_sigma, vignette_strength=args.vignette, seed=args.seed,
        )
        for k, frame in enumerate(frames):
            write(f"fringe_{k}.png", frame)
    if args.scene in ("checker", "all"):
        scene = checkerboard_scene(args.square, softness=args.softness)
        write("checker.png", render_distorted(
            scene, model, dims, noise_sigma=args.noise_sigma,
            vignette_strength=args.vignette, seed=args.seed))
    if args.scene in ("grid", "all"):
        scene = grid_scene(args.spacing, args.line_width)
        write("grid.png", render_distorted(
            scene, model, dims, noise_sigma=args.noise_sigma,
            vignette_strength=args.vignette, seed=args.seed))

    r = np.arange(half_diagonal_radius(dims) + 1, dtype=np.float64)
    dr = ground_truth_delta_r(model, r)
    lines = ["r,delta_r"]
    lines += [f"{ri:.1f},{float(di)!r}" for ri, di in zip(r, dr)]
    csv_path = os.path.join(args.out, "ground_truth_delta_r.csv")
    io_formats.atomic_write_text(csv_path, "\n".join(lines) + "\n")
    written.append(csv_path)

    for path in written:
        print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except FringecalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
