"""Persistence: images (PNG, PGM/PPM), profile JSON, curve CSV/SVG.

Every write lands in a temporary file in the destination directory and
is renamed into place, so a crashed writer can never leave a partially
written file under the target name.

Supported rasters: 8/16-bit grayscale (PNG and PGM P5) and 8-bit RGB
(PNG and PPM P6). PNG goes through Pillow; the netpbm formats are
simple enough to code directly (16-bit samples are big-endian per the
format definition).

The profile document is JSON: floats serialize via repr, which round
trips float64 exactly, and the embedded 1-px (r, delta_r) table makes a
saved profile auditable without code.
"""

import io
import json
import math
import os
import tempfile

import numpy as np
from PIL import Image

from .errors import NonInvertibleProfileError, ParameterError, ShapeError
from .distortion_profile import DistortionProfile

PROFILE_VERSION = 1


# ---------------------------------------------------------------------------
# atomic writes


def atomic_write_bytes(path, payload: bytes) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


# ---------------------------------------------------------------------------
# images


def _validate_raster(array: np.ndarray) -> np.ndarray:
    array = np.asarray(array)
    if array.dtype == np.uint8:
        if array.ndim not in (2, 3) or (array.ndim == 3 and array.shape[2] != 3):
            raise ShapeError(f"uint8 rasters must be HxW or HxWx3, got {array.shape}")
    elif array.dtype == np.uint16:
        if array.ndim != 2:
            raise ShapeError(f"16-bit rasters must be grayscale HxW, got {array.shape}")
    else:
        raise ParameterError(
            f"rasters must be uint8 or uint16 (quantize first), got dtype {array.dtype}"
        )
    return array


def save_image(path, array: np.ndarray) -> None:
    """Write a raster; format chosen by extension (.png, .pgm, .ppm)."""
    array = _validate_raster(array)
    suffix = os.path.splitext(os.fspath(path))[1].lower()
    if suffix == ".png":
        # Pillow infers L / RGB / I;16 from dtype and shape
        image = Image.fromarray(array)
        buffer = io.BytesIO()
        image.save(buffer, format="PNG")
        atomic_write_bytes(path, buffer.getvalue())
    elif suffix == ".pgm":
        if array.ndim != 2:
            raise ParameterError("PGM holds grayscale only; use .ppm for color")
        atomic_write_bytes(path, _encode_pnm(array))
    elif suffix == ".ppm":
        if array.ndim != 3:
            raise ParameterError("PPM holds color only; use .pgm for grayscale")
        atomic_write_bytes(path, _encode_pnm(array))
    else:
        raise ParameterError(f"unsupported image extension {suffix!r}")


def load_image(path) -> np.ndarray:
    """Read a raster back as uint8/uint16, grayscale or RGB."""
    suffix = os.path.splitext(os.fspath(path))[1].lower()
    if suffix in (".pgm", ".ppm"):
        with open(path, "rb") as handle:
            return _decode_pnm(handle.read())
    if suffix != ".png":
        raise ParameterError(f"unsupported image extension {suffix!r}")
    with Image.open(path) as image:
        mode = image.mode
        if mode == "L":
            return np.asarray(image, dtype=np.uint8)
        if mode in ("I;16", "I"):
            data = np.asarray(image)
            if data.min() < 0 or data.max() > 65535:
                raise ParameterError(f"PNG sample range {data.min()}..{data.max()} not 16-bit")
            return data.astype(np.uint16)
        if mode == "RGB":
            return np.asarray(image, dtype=np.uint8)
    raise ParameterError(f"unsupported PNG mode {mode!r}")


def _encode_pnm(array: np.ndarray) -> bytes:
    color = array.ndim == 3
    magic = b"P6" if color else b"P5"
    if color and array.dtype != np.uint8:
        raise ParameterError("PPM output supports 8-bit samples only")
    maxval = 255 if array.dtype == np.uint8 else 65535
    height, width = array.shape[:2]
    header = b"%s\n%d %d\n%d\n" % (magic, width, height, maxval)
    if array.dtype == np.uint8:
        body = array.tobytes()
    else:
        body = array.astype(">u2").tobytes()  # netpbm 16-bit is big-endian
    return header + body


def _decode_pnm(payload: bytes) -> np.ndarray:
    if len(payload) < 2 or payload[:2] not in (b"P5", b"P6"):
        raise ParameterError("not a binary PGM/PPM file")
    color = payload[:2] == b"P6"

    # header tokens may be separated by whitespace and '#' comments
    tokens = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(payload) and payload[pos:pos + 1].isspace():
            pos += 1
        if pos < len(payload) and payload[pos:pos + 1] == b"#":
            while pos < len(payload) and payload[pos:pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(payload) and not payload[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ParameterError("truncated PGM/PPM header")
        tokens.append(payload[start:pos])
    pos += 1  # single whitespace byte after maxval

    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise ParameterError("malformed PGM/PPM header") from exc
    if width < 1 or height < 1 or maxval not in (255, 65535):
        raise ParameterError(f"unsupported PGM/PPM geometry {width}x{height} maxval {maxval}")
    if color and maxval != 255:
        raise ParameterError("16-bit PPM is not supported")

    channels = 3 if color else 1
    dtype = np.dtype(np.uint8) if maxval == 255 else np.dtype(">u2")
    count = width * height * channels
    body = payload[pos:pos + count * dtype.itemsize]
    if len(body) != count * dtype.itemsize:
        raise ParameterError("PGM/PPM pixel data truncated")
    data = np.frombuffer(body, dtype=dtype).astype(
        np.uint8 if maxval == 255 else np.uint16
    )
    if color:
        return data.reshape(height, width, 3)
    return data.reshape(height, width)


# ---------------------------------------------------------------------------
# profile documents


def profile_to_document(profile: DistortionProfile, provenance: str = "") -> dict:
    r, dr = profile.table()
    return {
        "version": PROFILE_VERSION,
        "dims": [int(profile.dims[0]), int(profile.dims[1])],
        "center": [float(profile.center[0]), float(profile.center[1])],
        "f0": float(profile.f0),
        "cubic": [float(c) for c in profile.cubic],
        "r_max": int(profile.r_max),
        "table": [[float(ri), float(di)] for ri, di in zip(r, dr)],
        "provenance": str(provenance),
    }


def save_profile(profile: DistortionProfile, path, provenance: str = "") -> dict:
    """Serialize a profile to JSON; returns the document written."""
    document = profile_to_document(profile, provenance)
    atomic_write_text(path, json.dumps(document, indent=1))
    return document


def _require(document: dict, key: str):
    if key not in document:
        raise ParameterError(f"profile document missing field {key!r}")
    return document[key]


def load_profile(source) -> DistortionProfile:
    """Rebuild a profile from a JSON path or an already-parsed dict.

    The document is schema-checked; both the stored table and the
    profile reconstructed from the cubic must have a strictly
    increasing forward map, otherwise the load is rejected.
    """
    if isinstance(source, dict):
        document = source
    else:
        with open(source, "r", encoding="utf-8") as handle:
            try:
                document = json.load(handle)
            except json.JSONDecodeError as exc:
                raise ParameterError(f"profile is not valid JSON: {exc}") from exc

    version = _require(document, "version")
    if version != PROFILE_VERSION:
        raise ParameterError(f"unsupported profile version {version!r}")
    dims = _require(document, "dims")
    center = _require(document, "center")
    f0 = _require(document, "f0")
    cubic = _require(document, "cubic")
    r_max = _require(document, "r_max")
    table = _require(document, "table")
    if len(dims) != 2 or len(center) != 2 or len(cubic) != 4:
        raise ParameterError("profile document has malformed geometry fields")
    for value in [f0, r_max, *dims, *center, *cubic]:
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ParameterError(f"profile field value {value!r} is not a finite number")

    rows = np.asarray(table, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != 2 or rows.shape[0] < 2:
        raise ParameterError("profile table must be a list of (r, delta_r) pairs")
    m = rows[:, 0] + rows[:, 1]
    if not np.all(np.isfinite(m)) or np.any(np.diff(m) <= 0.0):
        raise NonInvertibleProfileError(
            "profile table's forward map r + delta_r is not strictly increasing"
        )

    profile = DistortionProfile(
        center=(float(center[0]), float(center[1])),
        f0=float(f0),
        cubic=tuple(float(c) for c in cubic),
        r_max=int(r_max),
        dims=(int(dims[0]), int(dims[1])),
    )
    r, dr = profile.table()
    if np.any(np.diff(r + dr) <= 0.0):
        raise NonInvertibleProfileError("profile cubic yields a non-increasing forward map")
    return profile


# ---------------------------------------------------------------------------
# curve export


def export_curve_csv(profile: DistortionProfile, path) -> None:
    """Columns r, delta_phi, delta_r at 1-px steps; repr-exact floats."""
    r, dr = profile.table()
    dphi = profile.delta_phi(r)
    lines = ["r,delta_phi,delta_r"]
    lines += [f"{ri:.1f},{float(pi)!r},{float(di)!r}" for ri, pi, di in zip(r, dphi, dr)]
    atomic_write_text(path, "\n".join(lines) + "\n")


def export_curve_svg(profile: DistortionProfile, path,
                     width: int = 640, height: int = 480) -> None:
    """Standalone SVG line plot of delta_r versus r."""
    r, dr = profile.table()
    margin = 60.0
    plot_w = width - 2 * margin
    plot_h = height - 2 * margin
    dr_min, dr_max = float(dr.min()), float(dr.max())
    if dr_max - dr_min < 1e-12:
        dr_min -= 1.0
        dr_max += 1.0

    def to_px(ri, di):
        px = margin + plot_w * (ri / r[-1])
        py = margin + plot_h * (1.0 - (di - dr_min) / (dr_max - dr_min))
        return px, py

    points = " ".join(f"{px:.2f},{py:.2f}" for px, py in (to_px(ri, di) for ri, di in zip(r, dr)))
    x_axis_y = margin + plot_h
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{x_axis_y}" x2="{margin + plot_w}" y2="{x_axis_y}" '
        'stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{x_axis_y}" stroke="black"/>',
        f'<polyline fill="none" stroke="#1f77b4" stroke-width="1.5" points="{points}"/>',
        f'<text x="{margin + plot_w / 2:.0f}" y="{height - 15}" text-anchor="middle" '
        f'font-size="14">r (px)</text>',
        f'<text x="18" y="{margin + plot_h / 2:.0f}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 18 {margin + plot_h / 2:.0f})">delta_r (px)</text>',
        f'<text x="{margin - 8}" y="{x_axis_y + 14}" text-anchor="end" font-size="12">0</text>',
        f'<text x="{margin + plot_w}" y="{x_axis_y + 14}" text-anchor="middle" '
        f'font-size="12">{int(r[-1])}</text>',
        f'<text x="{margin - 8}" y="{x_axis_y + 4}" text-anchor="end" '
        f'font-size="12">{dr_min:.2f}</text>',
        f'<text x="{margin - 8}" y="{margin + 4}" text-anchor="end" '
        f'font-size="12">{dr_max:.2f}</text>',
        f'<text x="{margin + plot_w / 2:.0f}" y="{margin - 20}" text-anchor="middle" '
        f'font-size="15">radial distortion profile</text>',
        "</svg>",
    ]
    atomic_write_text(path, "\n".join(parts) + "\n")
