"""Image files: 16-bit PGM as the canonical format, 8-bit PNG for viewing.

PGM (P5, maxval 65535, big-endian samples) keeps the full dynamic range and
parses anywhere. A JSON sidecar next to the image ("<image>.json") carries
the pixel pitch, origin, quantization scale, and provenance so physical
coordinates survive the round trip; reading without a sidecar falls back to
a caller-supplied detector layout and raw counts.

Files store the top row at maximum y (display orientation); ImageGrid rows
run the other way (row index grows with y), so writers flip and readers
flip back.
"""
from __future__ import annotations

import json
import re

import numpy as np
from PIL import Image

from .geometry import DetectorSpec
from .pattern import ImageGrid

__all__ = [
    "write_pgm16",
    "read_pgm16",
    "write_png8",
    "write_sidecar",
    "read_sidecar",
    "read_image",
]

PGM_MAX = 65535


def _quantize(values):
    vmax = float(values.max(initial=0.0))
    scale = PGM_MAX / vmax if vmax > 0 else 1.0
    counts = np.rint(values * scale).astype(np.uint16)
    return counts, scale


def write_pgm16(path, img: ImageGrid, metadata=None):
    """Write the image as P5/65535 plus its JSON sidecar; returns the scale.

    Intensities are scaled so the brightest pixel maps to 65535; the factor
    lands in the sidecar (key "scale", counts per intensity unit) together
    with the grid layout and any extra metadata entries.
    """
    counts, scale = _quantize(img.values)
    header = f"P5\n{img.spec.width_px} {img.spec.height_px}\n{PGM_MAX}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(counts[::-1].astype(">u2").tobytes())
    side = {
        "format": "pgm16",
        "width_px": img.spec.width_px,
        "height_px": img.spec.height_px,
        "pixel_pitch_um": img.spec.pitch_um,
        "origin_x_um": img.spec.origin_x_um,
        "origin_y_um": img.spec.origin_y_um,
        "scale": scale,
        "clipped": bool(img.clipped),
        "row_order": "top_is_max_y",
    }
    if metadata:
        side.update(metadata)
    write_sidecar(str(path) + ".json", side)
    return scale


def write_sidecar(path, payload):
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_sidecar(image_path):
    """The sidecar dict for an image path, or None when absent."""
    try:
        with open(str(image_path) + ".json", "r", encoding="ascii") as fh:
            return json.load(fh)
    except OSError:
        return None


def _parse_pgm_header(blob):
    # P5, whitespace/comment-separated width, height, maxval
    tokens = []
    pos = 0
    while len(tokens) < 4:
        m = re.match(rb"\s*(#[^\n]*\n|\S+)", blob[pos:])
        if not m:
            raise ValueError("truncated PGM header")
        pos += m.end()
        tok = m.group(1)
        if not tok.startswith(b"#"):
            tokens.append(tok)
    if tokens[0] != b"P5":
        raise ValueError(f"not a binary PGM (magic {tokens[0]!r})")
    width, height, maxval = (int(t) for t in tokens[1:])
    return width, height, maxval, pos + 1  # single whitespace after maxval


def read_pgm16(path, detector: DetectorSpec = None):
    """Read a P5 PGM written by write_pgm16; returns (ImageGrid, sidecar).

    With a sidecar present, the stored layout and scale reconstruct the
    original intensities; otherwise the detector argument (or the default
    layout for the file's size) is assumed and raw counts are returned.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    width, height, maxval, offset = _parse_pgm_header(blob)
    dtype = ">u2" if maxval > 255 else "u1"
    data = np.frombuffer(blob, dtype=dtype, count=width * height,
                         offset=offset)
    rows = data.reshape(height, width)[::-1].astype(float)
    side = read_sidecar(path)
    if side is not None:
        spec = DetectorSpec(pitch_um=side["pixel_pitch_um"],
                            width_px=width, height_px=height,
                            origin_x_um=side["origin_x_um"],
                            origin_y_um=side["origin_y_um"])
        values = rows / side.get("scale", 1.0)
        clipped = bool(side.get("clipped", False))
    else:
        if detector is not None and (detector.width_px, detector.height_px) \
                == (width, height):
            spec = detector
        else:
            spec = DetectorSpec(width_px=width, height_px=height)
        values = rows
        clipped = False
    return ImageGrid(spec, values, clipped=clipped), side


def write_png8(path, img: ImageGrid):
    """8-bit normalized PNG for quick viewing; no sidecar."""
    vmax = float(img.values.max(initial=0.0))
    scale = 255.0 / vmax if vmax > 0 else 1.0
    data = np.rint(img.values * scale).astype(np.uint8)
    Image.fromarray(data[::-1], mode="L").save(path, format="PNG")


def read_image(path, detector: DetectorSpec = None):
    """Read PGM or PNG into an ImageGrid; returns (image, sidecar or None)."""
    name = str(path).lower()
    if name.endswith(".pgm"):
        return read_pgm16(path, detector)
    if name.endswith(".png"):
        arr = np.asarray(Image.open(path).convert("I")).astype(float)[::-1]
        side = read_sidecar(path)
        height, width = arr.shape
        if side is not None:
            spec = DetectorSpec(pitch_um=side["pixel_pitch_um"],
                                width_px=width, height_px=height,
                                origin_x_um=side["origin_x_um"],
                                origin_y_um=side["origin_y_um"])
            arr = arr / side.get("scale", 1.0)
        elif detector is not None and (detector.width_px, detector.height_px) \
                == (width, height):
            spec = detector
        else:
            spec = DetectorSpec(width_px=width, height_px=height)
        return ImageGrid(spec, arr, clipped=False), side
    raise ValueError(f"unsupported image format: {path}")
