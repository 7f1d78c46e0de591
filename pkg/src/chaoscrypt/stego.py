"""Framelet-domain steganography: hide secret-image MSBs in LL low bits.

Embedding: spiral-shift the cover (kind I then II), framelet-analyze each
plane, quantize the LL band to bytes, scatter positions with the chaotic
row/column shift, force secret bits into the low bit slots, undo the shift,
put the LL back, synthesize, undo the spirals, round to 8 bits.  Extraction
replays the forward half and reads the slots.

Color covers take the 4 most significant bits of each secret pixel: one in
the red LL LSB, two in the green LL (weights 1 and 2), one in the blue LL
LSB.  Grayscale covers take the 4 MSBs into the low nibble of one LL byte;
binary secrets take one bit per LL LSB.

Extraction is lossy: the transform is redundant, so synthesizing modified
coefficients and re-analyzing returns the LL only approximately.  The
``transform`` hook exists so tests can swap in an identity transform and
check the bit plumbing exactly.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .chaos import Map2D, default_map
from .errors import CapacityError, DataError, DimensionError
from .framelet import (
    FrameletCoeffs,
    framelet_forward,
    framelet_inverse,
    get_ll,
    quantize_ll,
    set_ll,
)
from .imgio import ImageBuffer, merge_planes, split_planes
from .keygen import KeySpace
from .permute import rowcol_chaotic_shift, spiral_shift

DEFAULT_SHIFTS = (1000, 1000)


@dataclass(frozen=True)
class Transform:
    forward: Callable[[np.ndarray], FrameletCoeffs]
    inverse: Callable[[FrameletCoeffs], np.ndarray]


FRAMELET = Transform(framelet_forward, framelet_inverse)


def identity_transform() -> Transform:
    """LL = the plane itself; for testing the bit plumbing without frame loss."""

    def fwd(plane: np.ndarray) -> FrameletCoeffs:
        bands = np.zeros((3, 3) + plane.shape)
        bands[0, 0] = plane
        return FrameletCoeffs(bands)

    return Transform(fwd, lambda c: get_ll(c).copy())


@dataclass(frozen=True)
class EmbedPlan:
    """Sidecar data the receiver needs: geometry, shifts, scheme, key check."""

    scheme: str  # color-4msb | gray-4msb | binary-lsb
    cover_shape: tuple[int, int]
    secret_shape: tuple[int, int]
    shifts: tuple[int, int]
    key_fingerprint: str = ""


def key_fingerprint(keys: KeySpace) -> str:
    text = ",".join(
        f"{v:.17g}"
        for v in (keys.r1, keys.r2, keys.x0_1, keys.y0_1, keys.x0_2, keys.y0_2)
    )
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def save_plan(plan: EmbedPlan, path: str | Path) -> None:
    lines = [
        f"scheme = {plan.scheme}",
        f"cover_height = {plan.cover_shape[0]}",
        f"cover_width = {plan.cover_shape[1]}",
        f"secret_height = {plan.secret_shape[0]}",
        f"secret_width = {plan.secret_shape[1]}",
        f"shift_i = {plan.shifts[0]}",
        f"shift_ii = {plan.shifts[1]}",
        f"key_fingerprint = {plan.key_fingerprint}",
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def load_plan(path: str | Path) -> EmbedPlan:
    fields: dict[str, str] = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, _, value = line.partition("=")
        fields[name.strip()] = value.strip()
    try:
        return EmbedPlan(
            scheme=fields["scheme"],
            cover_shape=(int(fields["cover_height"]), int(fields["cover_width"])),
            secret_shape=(int(fields["secret_height"]), int(fields["secret_width"])),
            shifts=(int(fields["shift_i"]), int(fields["shift_ii"])),
            key_fingerprint=fields.get("key_fingerprint", ""),
        )
    except (KeyError, ValueError) as exc:
        raise DataError(f"bad plan file {path}: {exc}") from None


# --------------------------------------------------------------------------
# shared plumbing
# --------------------------------------------------------------------------


def _perm_keys(keys: KeySpace) -> tuple[float, float, float]:
    return keys.x0_1, keys.y0_1, keys.r1


def _spiral_in(planes, shifts):
    planes = spiral_shift(planes, "I", shifts[0])
    return spiral_shift(planes, "II", shifts[1])


def _spiral_out(planes, shifts):
    planes = spiral_shift(planes, "II", shifts[1], inverse=True)
    return spiral_shift(planes, "I", shifts[0], inverse=True)


def _shifted_lls(planes, keys, map2d, transform):
    """(coeffs, shifted quantized LL) per plane after the forward half."""
    coeffs = [transform.forward(p.astype(np.float64)) for p in planes]
    lls = [
        rowcol_chaotic_shift(quantize_ll(get_ll(c)), _perm_keys(keys), map2d)
        for c in coeffs
    ]
    return coeffs, lls


def _synthesize(coeffs, lls, keys, map2d, transform):
    """Un-shift embedded LLs, reinsert, synthesize, round to bytes."""
    out = []
    for c, ll in zip(coeffs, lls):
        restored = rowcol_chaotic_shift(ll, _perm_keys(keys), map2d, inverse=True)
        plane = transform.inverse(set_ll(c, restored.astype(np.float64)))
        out.append(np.clip(np.round(plane), 0, 255).astype(np.uint8))
    return out


def _secret_bits(secret_plane: np.ndarray) -> np.ndarray:
    return np.unpackbits(secret_plane, axis=1)  # MSB first: bit k of pixel j at 8j+k


# --------------------------------------------------------------------------
# color cover, grayscale secret
# --------------------------------------------------------------------------


def embed(
    cover: ImageBuffer,
    secret: ImageBuffer,
    keys: KeySpace,
    map2d: Map2D | None = None,
    shifts: tuple[int, int] = DEFAULT_SHIFTS,
    transform: Transform = FRAMELET,
) -> tuple[ImageBuffer, EmbedPlan]:
    """Hide a grayscale secret's 4 MSBs per pixel inside a color cover."""
    map2d = map2d or default_map()
    if cover.kind != "color":
        raise DataError(f"cover must be color, got {cover.kind}")
    if secret.kind != "gray":
        raise DataError(f"secret must be grayscale, got {secret.kind}")
    n, m = cover.height, cover.width
    ns, ms = secret.height, secret.width
    if ns * ms > n * m / 3:
        raise CapacityError(f"secret {ns}x{ms} exceeds capacity of {n}x{m} cover")
    if ns > n or ms > m:
        raise CapacityError("secret dimensions exceed cover dimensions")

    planes = _spiral_in(split_planes(cover), shifts)
    coeffs, lls = _shifted_lls(planes, keys, map2d, transform)
    bw = _secret_bits(secret.plane())
    r_ll, g_ll, b_ll = lls
    rows = np.arange(ns)[:, None]
    cols = np.arange(ms)[None, :]
    b0 = bw[rows, 8 * cols + 0]
    b1 = bw[rows, 8 * cols + 1]
    b2 = bw[rows, 8 * cols + 2]
    b3 = bw[rows, 8 * cols + 3]
    r_ll[:ns, :ms] = (r_ll[:ns, :ms] & ~np.uint8(1)) | b0
    g_ll[:ns, :ms] = (g_ll[:ns, :ms] & ~np.uint8(3)) | (b2 << 1) | b1
    b_ll[:ns, :ms] = (b_ll[:ns, :ms] & ~np.uint8(1)) | b3

    out = _synthesize(coeffs, lls, keys, map2d, transform)
    stego = merge_planes(*_spiral_out(out, shifts))
    plan = EmbedPlan("color-4msb", (n, m), (ns, ms), tuple(shifts), key_fingerprint(keys))
    return stego, plan


def extract(
    stego: ImageBuffer,
    keys: KeySpace,
    plan: EmbedPlan,
    map2d: Map2D | None = None,
    transform: Transform = FRAMELET,
) -> ImageBuffer:
    """Recover the secret's 4 MSBs from a color stego image (low nibble zero)."""
    map2d = map2d or default_map()
    if stego.kind != "color":
        raise DataError(f"stego image must be color, got {stego.kind}")
    if (stego.height, stego.width) != tuple(plan.cover_shape):
        raise DimensionError(
            f"stego dims {(stego.height, stego.width)} do not match plan {plan.cover_shape}"
        )
    ns, ms = plan.secret_shape
    planes = _spiral_in(split_planes(stego), plan.shifts)
    _, lls = _shifted_lls(planes, keys, map2d, transform)
    r_ll, g_ll, b_ll = lls
    b0 = r_ll[:ns, :ms] & 1
    b1 = g_ll[:ns, :ms] & 1
    b2 = (g_ll[:ns, :ms] >> 1) & 1
    b3 = b_ll[:ns, :ms] & 1
    secret = (b0 << 7) | (b1 << 6) | (b2 << 5) | (b3 << 4)
    return ImageBuffer.from_gray(secret.astype(np.uint8))


# --------------------------------------------------------------------------
# grayscale cover variants
# --------------------------------------------------------------------------


def _check_gray_capacity(cover: ImageBuffer, secret: ImageBuffer) -> None:
    if cover.kind != "gray":
        raise DataError(f"cover must be grayscale, got {cover.kind}")
    if secret.height > cover.height or secret.width > cover.width:
        raise CapacityError("secret dimensions exceed cover dimensions")


def embed_gray(
    cover: ImageBuffer,
    secret: ImageBuffer,
    keys: KeySpace,
    map2d: Map2D | None = None,
    shifts: tuple[int, int] = DEFAULT_SHIFTS,
    transform: Transform = FRAMELET,
) -> tuple[ImageBuffer, EmbedPlan]:
    """Grayscale-in-grayscale: secret high nibble into the LL low nibble."""
    map2d = map2d or default_map()
    if secret.kind != "gray":
        raise DataError(f"secret must be grayscale, got {secret.kind}")
    _check_gray_capacity(cover, secret)
    ns, ms = secret.height, secret.width
    planes = _spiral_in((cover.plane(),), shifts)
    coeffs, lls = _shifted_lls(planes, keys, map2d, transform)
    ll = lls[0]
    ll[:ns, :ms] = (ll[:ns, :ms] & 0xF0) | (secret.plane() >> 4)
    out = _synthesize(coeffs, lls, keys, map2d, transform)
    stego = ImageBuffer.from_gray(_spiral_out(out, shifts)[0])
    plan = EmbedPlan(
        "gray-4msb", (cover.height, cover.width), (ns, ms), tuple(shifts), key_fingerprint(keys)
    )
    return stego, plan


def embed_binary(
    cover: ImageBuffer,
    secret: ImageBuffer,
    keys: KeySpace,
    map2d: Map2D | None = None,
    shifts: tuple[int, int] = DEFAULT_SHIFTS,
    transform: Transform = FRAMELET,
) -> tuple[ImageBuffer, EmbedPlan]:
    """Binary-in-grayscale: one secret bit into each LL LSB."""
    map2d = map2d or default_map()
    if secret.kind != "binary":
        raise DataError(f"secret must be binary, got {secret.kind}")
    _check_gray_capacity(cover, secret)
    ns, ms = secret.height, secret.width
    planes = _spiral_in((cover.plane(),), shifts)
    coeffs, lls = _shifted_lls(planes, keys, map2d, transform)
    ll = lls[0]
    ll[:ns, :ms] = (ll[:ns, :ms] & ~np.uint8(1)) | secret.plane()
    out = _synthesize(coeffs, lls, keys, map2d, transform)
    stego = ImageBuffer.from_gray(_spiral_out(out, shifts)[0])
    plan = EmbedPlan(
        "binary-lsb", (cover.height, cover.width), (ns, ms), tuple(shifts), key_fingerprint(keys)
    )
    return stego, plan


def extract_gray(
    stego: ImageBuffer,
    keys: KeySpace,
    plan: EmbedPlan,
    map2d: Map2D | None = None,
    transform: Transform = FRAMELET,
) -> ImageBuffer:
    """Recover a grayscale or binary secret from a grayscale stego image."""
    map2d = map2d or default_map()
    if stego.kind != "gray":
        raise DataError(f"stego image must be grayscale, got {stego.kind}")
    if (stego.height, stego.width) != tuple(plan.cover_shape):
        raise DimensionError(
            f"stego dims {(stego.height, stego.width)} do not match plan {plan.cover_shape}"
        )
    ns, ms = plan.secret_shape
    planes = _spiral_in((stego.plane(),), plan.shifts)
    _, lls = _shifted_lls(planes, keys, map2d, transform)
    region = lls[0][:ns, :ms]
    if plan.scheme == "binary-lsb":
        return ImageBuffer.from_gray((region & 1).astype(np.uint8), kind="binary")
    return ImageBuffer.from_gray(((region & 0x0F) << 4).astype(np.uint8))
