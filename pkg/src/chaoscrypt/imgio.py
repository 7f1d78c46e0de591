"""8-bit image buffers and exact-round-trip file I/O.

Supported containers: portable pixmaps (PBM/PGM/PPM, plain and raw) parsed
and written here so round trips are bit-exact, and 8-bit PNG via Pillow.
Buffers are planar: shape (channels, height, width) uint8.  Binary images
keep samples in {0, 1}.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DataError, DimensionError, UnsupportedFormatError

KINDS = ("binary", "gray", "color")


@dataclass
class ImageBuffer:
    """Planar 8-bit image: kind in {binary, gray, color}."""

    kind: str
    planes: np.ndarray  # (c, h, w) uint8

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DataError(f"unknown image kind: {self.kind!r}")
        self.planes = np.asarray(self.planes, dtype=np.uint8)
        if self.planes.ndim != 3:
            raise DimensionError(f"planes must be (c, h, w), got {self.planes.shape}")
        c = self.planes.shape[0]
        if (self.kind == "color") != (c == 3) or (self.kind != "color") != (c == 1):
            raise DimensionError(f"kind {self.kind!r} does not match {c} plane(s)")
        if self.planes.shape[1] == 0 or self.planes.shape[2] == 0:
            raise DimensionError("zero-area image")
        if self.kind == "binary" and self.planes.max(initial=0) > 1:
            raise DataError("binary image samples must be 0 or 1")

    @property
    def height(self) -> int:
        return self.planes.shape[1]

    @property
    def width(self) -> int:
        return self.planes.shape[2]

    @property
    def channels(self) -> int:
        return self.planes.shape[0]

    def plane(self, i: int = 0) -> np.ndarray:
        return self.planes[i]

    def copy(self) -> "ImageBuffer":
        return ImageBuffer(self.kind, self.planes.copy())

    @classmethod
    def from_gray(cls, plane: np.ndarray, kind: str = "gray") -> "ImageBuffer":
        return cls(kind, np.asarray(plane, dtype=np.uint8)[None, :, :])

    @classmethod
    def from_rgb(cls, r: np.ndarray, g: np.ndarray, b: np.ndarray) -> "ImageBuffer":
        return cls("color", np.stack([r, g, b]).astype(np.uint8))


def split_planes(buf: ImageBuffer) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The three color planes of a color buffer, as 2D arrays."""
    if buf.kind != "color":
        raise DataError(f"split_planes needs a color image, got {buf.kind}")
    return buf.planes[0], buf.planes[1], buf.planes[2]


def merge_planes(r: np.ndarray, g: np.ndarray, b: np.ndarray) -> ImageBuffer:
    if not (r.shape == g.shape == b.shape):
        raise DimensionError("plane shapes differ")
    return ImageBuffer.from_rgb(r, g, b)


# --------------------------------------------------------------------------
# padding bookkeeping (duplicate trailing rows/columns, crop back exactly)
# --------------------------------------------------------------------------


def pad_plane(plane: np.ndarray, row_mult: int, col_mult: int) -> np.ndarray:
    """Duplicate the last row/column until dims are multiples of the targets."""
    n, m = plane.shape
    rpad = (-n) % row_mult
    cpad = (-m) % col_mult
    if rpad:
        plane = np.vstack([plane, np.repeat(plane[-1:, :], rpad, axis=0)])
    if cpad:
        plane = np.hstack([plane, np.repeat(plane[:, -1:], cpad, axis=1)])
    return plane


def crop_plane(plane: np.ndarray, height: int, width: int) -> np.ndarray:
    return plane[:height, :width]


# --------------------------------------------------------------------------
# portable pixmaps
# --------------------------------------------------------------------------

_PNM_KIND = {"P1": "binary", "P4": "binary", "P2": "gray", "P5": "gray", "P3": "color", "P6": "color"}


def _read_pnm(data: bytes) -> ImageBuffer:
    m = re.match(rb"(P[1-6])\s", data)
    if not m:
        raise UnsupportedFormatError("not a PBM/PGM/PPM file")
    magic = m.group(1).decode()
    pos = m.end()

    def next_token() -> int:
        nonlocal pos
        while True:
            while pos < len(data) and data[pos : pos + 1].isspace():
                pos += 1
            if pos < len(data) and data[pos : pos + 1] == b"#":
                while pos < len(data) and data[pos] not in (0x0A, 0x0D):
                    pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise DataError("truncated pixmap header")
        return int(data[start:pos])

    width = next_token()
    height = next_token()
    bitmap = magic in ("P1", "P4")
    if not bitmap:
        maxval = next_token()
        if maxval > 255:
            raise UnsupportedFormatError(f"unsupported sample depth (maxval {maxval})")
        if maxval <= 0:
            raise DataError(f"bad maxval {maxval}")
    channels = 3 if magic in ("P3", "P6") else 1
    count = width * height * channels

    if magic in ("P1", "P2", "P3"):
        tokens = re.split(rb"\s+", data[pos:].strip())
        if magic == "P1":  # digits may be packed without whitespace
            tokens = [bytes([c]) for t in tokens for c in t]
        if len(tokens) < count:
            raise DataError("truncated pixmap data")
        samples = np.array([int(t) for t in tokens[:count]], dtype=np.int64)
    elif magic == "P4":
        pos += 1  # exactly one whitespace byte after the header
        rowbytes = (width + 7) // 8
        raw = data[pos : pos + rowbytes * height]
        if len(raw) < rowbytes * height:
            raise DataError("truncated pixmap data")
        rows = np.frombuffer(raw, dtype=np.uint8).reshape(height, rowbytes)
        samples = np.unpackbits(rows, axis=1)[:, :width].reshape(-1)
    else:  # P5 / P6
        pos += 1
        raw = data[pos : pos + count]
        if len(raw) < count:
            raise DataError("truncated pixmap data")
        samples = np.frombuffer(raw, dtype=np.uint8)

    if samples.min(initial=0) < 0 or samples.max(initial=0) > (1 if bitmap else 255):
        raise DataError("sample out of range")
    arr = samples.astype(np.uint8).reshape(height, width, channels)
    planes = np.transpose(arr, (2, 0, 1))
    return ImageBuffer(_PNM_KIND[magic], planes)


def _write_pnm(buf: ImageBuffer) -> bytes:
    h, w = buf.height, buf.width
    if buf.kind == "binary":
        rows = np.packbits(buf.planes[0], axis=1)
        return b"P4\n%d %d\n" % (w, h) + rows.tobytes()
    interleaved = np.transpose(buf.planes, (1, 2, 0)).tobytes()
    magic = b"P6" if buf.kind == "color" else b"P5"
    return magic + b"\n%d %d\n255\n" % (w, h) + interleaved


# --------------------------------------------------------------------------
# PNG (Pillow)
# --------------------------------------------------------------------------

_PNG_MODES = {"1": "binary", "L": "gray", "RGB": "color"}


def _read_png(path: Path) -> ImageBuffer:
    with Image.open(path) as img:
        if img.mode not in _PNG_MODES:
            raise UnsupportedFormatError(
                f"unsupported PNG mode {img.mode!r} (need 8-bit 1/L/RGB, no alpha)"
            )
        kind = _PNG_MODES[img.mode]
        arr = np.asarray(img)
    if kind == "binary":
        planes = arr.astype(np.uint8)[None, :, :]
    elif kind == "gray":
        planes = arr[None, :, :]
    else:
        planes = np.transpose(arr, (2, 0, 1))
    return ImageBuffer(kind, planes)


def _write_png(buf: ImageBuffer, path: Path) -> None:
    if buf.kind == "binary":
        img = Image.fromarray(buf.planes[0].astype(bool))
    elif buf.kind == "gray":
        img = Image.fromarray(buf.planes[0], mode="L")
    else:
        img = Image.fromarray(np.transpose(buf.planes, (1, 2, 0)), mode="RGB")
    img.save(path, format="PNG")


# --------------------------------------------------------------------------
# public entry points (format by extension)
# --------------------------------------------------------------------------

_PNM_EXTS = (".pbm", ".pgm", ".ppm", ".pnm")


def load(path: str | Path) -> ImageBuffer:
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such image: {path}")
    ext = path.suffix.lower()
    if ext in _PNM_EXTS:
        return _read_pnm(path.read_bytes())
    if ext == ".png":
        return _read_png(path)
    raise UnsupportedFormatError(f"unsupported image format: {ext!r}")


def save(buf: ImageBuffer, path: str | Path) -> None:
    path = Path(path)
    ext = path.suffix.lower()
    if ext in _PNM_EXTS:
        expected = {".pbm": "binary", ".pgm": "gray", ".ppm": "color"}
        if ext in expected and expected[ext] != buf.kind:
            raise DataError(f"cannot save {buf.kind} image as {ext}")
        path.write_bytes(_write_pnm(buf))
    elif ext == ".png":
        _write_png(buf, path)
    else:
        raise UnsupportedFormatError(f"unsupported image format: {ext!r}")
