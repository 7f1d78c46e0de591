"""Image encryption/decryption: permutation stages, CA diffusion, keystream XOR.

Color pipeline: split plates -> parity interleave twice -> 4x4 block matrices
mixed into one 6x8 -> chaotic block shift -> split L/C/R -> three-matrix ring
shift -> CA diffusion round on binarized rows -> keystream XOR -> reassemble.
Grayscale keeps the interleave, single-plane ring shift, CA round, and
keystream; binary images run the same single-plane pipeline directly on the
bit plane.

Key roles (fixed for interoperability): permutation stages draw on
(x0_1, y0_1, r1); the CA rule/rep/rotation streams on (x0_2, y0_2, r2), one
shared stream consumed plate by plate; the keystream seed is the averaged
key pair with r = max(r1, r2).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import automata
from .chaos import Map2D, default_map, sequence, truncate
from .errors import DataError, DimensionError
from .imgio import ImageBuffer, merge_planes, split_planes
from .keygen import KeySpace, q256
from .permute import (
    BlockMatrix,
    block_mix,
    block_unmix,
    chaotic_block_shift,
    parity_interleave,
    ring_shift_gray,
    ring_shift_lcr,
)

FORMAT_VERSION = 1

_SEGMENT_SWAP = np.array([3, 6, 5, 0, 7, 2, 1, 4])  # (1,4)(2,7)(3,6)(5,8), 0-based


@dataclass(frozen=True)
class CipherHeader:
    """Everything needed to undo padding exactly."""

    kind: str
    orig_height: int
    orig_width: int
    version: int = FORMAT_VERSION


def _padded_dims(kind: str, n: int, m: int) -> tuple[int, int]:
    if kind == "color":  # 4x4 block structure
        return -(-n // 4) * 4, -(-m // 4) * 4
    if kind == "gray":  # even rows for pairing, CA segments >= 3 cells
        return -(-n // 2) * 2, max(4, -(-m // 2) * 2)
    return -(-n // 2) * 2, max(24, -(-m // 8) * 8)  # binary: bit rows split by 8


def _pad(plane: np.ndarray, target: tuple[int, int]) -> np.ndarray:
    n, m = plane.shape
    return np.pad(plane, ((0, target[0] - n), (0, target[1] - m)), mode="edge")


# --------------------------------------------------------------------------
# chaos-derived parameters
# --------------------------------------------------------------------------


def _perm_keys(keys: KeySpace) -> tuple[float, float, float]:
    return keys.x0_1, keys.y0_1, keys.r1


def _ring_amount(keys: KeySpace, map2d: Map2D, cycle_len: int) -> int:
    seq = sequence(keys.x0_1, keys.y0_1, keys.r1, 1, map2d)
    return int(truncate(seq[0], 4)[0]) % cycle_len


def _ca_streams(keys: KeySpace, map2d: Map2D, plates: int, pairs: int):
    """Rules, repetition counts and rotation amounts for every (plate, row pair).

    One shared chaos sequence consumed in plate order; rules are the leading
    decimal digit, reps the two-digit cut reduced to 1..16, rotations the
    four-digit cut (all views of the same underlying sequence).
    """
    seq = sequence(keys.x0_2, keys.y0_2, keys.r2, plates * pairs, map2d)
    rules = truncate(seq[0], 1) % 256
    reps = truncate(seq[1], 2) % 16 + 1
    rotations = truncate(seq[0], 4)
    return rules, reps, rotations


def _keystream(keys: KeySpace, map2d: Map2D, n: int, m: int):
    x0 = (keys.x0_1 + keys.x0_2) / 2.0
    y0 = (keys.y0_1 + keys.y0_2) / 2.0
    r = max(keys.r1, keys.r2)
    seq = sequence(x0, y0, r, n * m, map2d)
    qr = q256(seq[0]).reshape(n, m)
    qg = q256(seq[1]).reshape(n, m)
    return qr, qg, qr ^ qg


# --------------------------------------------------------------------------
# the CA diffusion round (binary domain)
# --------------------------------------------------------------------------


def _ca_round(bit_plates: list[np.ndarray], keys: KeySpace, map2d: Map2D, inverse: bool) -> None:
    """In-place diffusion: pairwise second-order CA, segment swaps, paired-row
    rotation, CA again; exact mirror when inverse."""
    n, width = bit_plates[0].shape
    if n % 2:
        raise DimensionError("CA round needs an even number of rows")
    if width % 8:
        raise DimensionError("CA round needs row width divisible by 8")
    seg = width // 8
    half = n // 2
    rules, reps, rotations = _ca_streams(keys, map2d, len(bit_plates), half)

    def evolve_all(bits: np.ndarray, base: int, reverse: bool) -> None:
        op = automata.second_order_reverse if reverse else automata.second_order_evolve
        for i in range(half):
            x = bits[i].reshape(8, seg)
            y = bits[half + i].reshape(8, seg)
            xo, yo = op(x, y, int(rules[base + i]), int(reps[base + i]))
            bits[i] = xo.reshape(width)
            bits[half + i] = yo.reshape(width)

    def swap_segments(bits: np.ndarray) -> None:
        view = bits.reshape(n, 8, seg)
        bits[:] = view[:, _SEGMENT_SWAP, :].reshape(n, width)

    def rotate_pairs(bits: np.ndarray, base: int, sign: int) -> None:
        for i in range(half):
            v = np.concatenate([bits[i], bits[half + i]])
            v = np.roll(v, sign * int(rotations[base + i]))
            bits[i] = v[:width]
            bits[half + i] = v[width:]

    for p, bits in enumerate(bit_plates):
        base = p * half
        if inverse:
            evolve_all(bits, base, reverse=True)
            rotate_pairs(bits, base, sign=-1)
            swap_segments(bits)
            evolve_all(bits, base, reverse=True)
        else:
            evolve_all(bits, base, reverse=False)
            swap_segments(bits)
            rotate_pairs(bits, base, sign=1)
            evolve_all(bits, base, reverse=False)


# --------------------------------------------------------------------------
# L/C/R layout of the mixed block matrix
# --------------------------------------------------------------------------


def _split_lcr(mixed: BlockMatrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    blocks = mixed.blocks
    L = BlockMatrix(blocks[:4, :4]).to_plane()
    R = BlockMatrix(blocks[:4, 4:]).to_plane()
    C = BlockMatrix(
        np.stack([blocks[4, :4], blocks[4, 4:], blocks[5, :4], blocks[5, 4:]])
    ).to_plane()
    return L, C, R


def _join_lcr(L: np.ndarray, C: np.ndarray, R: np.ndarray) -> BlockMatrix:
    th, tw = L.shape[0] // 4, L.shape[1] // 4
    lb = BlockMatrix.from_plane(L, 4, 4).blocks
    rb = BlockMatrix.from_plane(R, 4, 4).blocks
    cb = BlockMatrix.from_plane(C, 4, 4).blocks
    mixed = np.empty((6, 8, th, tw), dtype=L.dtype)
    mixed[:4, :4] = lb
    mixed[:4, 4:] = rb
    mixed[4, :4] = cb[0]
    mixed[4, 4:] = cb[1]
    mixed[5, :4] = cb[2]
    mixed[5, 4:] = cb[3]
    return BlockMatrix(mixed)


# --------------------------------------------------------------------------
# pipelines
# --------------------------------------------------------------------------


def encrypt(
    image: ImageBuffer, keys: KeySpace, map2d: Map2D | None = None
) -> tuple[ImageBuffer, CipherHeader]:
    map2d = map2d or default_map()
    header = CipherHeader(image.kind, image.height, image.width)
    target = _padded_dims(image.kind, image.height, image.width)
    if image.kind == "color":
        ct = _encrypt_color([_pad(p, target) for p in split_planes(image)], keys, map2d)
        return merge_planes(*ct), header
    plane = _encrypt_single(_pad(image.plane(), target), image.kind, keys, map2d)
    return ImageBuffer.from_gray(plane, image.kind), header


def decrypt(
    ct: ImageBuffer, header: CipherHeader, keys: KeySpace, map2d: Map2D | None = None
) -> ImageBuffer:
    map2d = map2d or default_map()
    if ct.kind != header.kind:
        raise DataError(f"header kind {header.kind!r} does not match image {ct.kind!r}")
    target = _padded_dims(header.kind, header.orig_height, header.orig_width)
    if (ct.height, ct.width) != target:
        raise DataError(
            f"ciphertext dims {(ct.height, ct.width)} do not match header (expect {target})"
        )
    oh, ow = header.orig_height, header.orig_width
    if header.kind == "color":
        planes = _decrypt_color(list(split_planes(ct)), keys, map2d)
        return merge_planes(*(p[:oh, :ow] for p in planes))
    plane = _decrypt_single(ct.plane(), header.kind, keys, map2d)
    return ImageBuffer.from_gray(plane[:oh, :ow], header.kind)


def _encrypt_color(planes: list[np.ndarray], keys: KeySpace, map2d: Map2D):
    n, m = planes[0].shape
    plates = [parity_interleave(p, times=2) for p in planes]
    mixed = block_mix(*(BlockMatrix.from_plane(p, 4, 4) for p in plates))
    shifted = chaotic_block_shift(mixed, _perm_keys(keys), map2d)
    L, C, R = _split_lcr(shifted)
    amount = _ring_amount(keys, map2d, 3 * n * m)
    L, C, R = ring_shift_lcr(L, C, R, amount)
    bits = [np.unpackbits(p, axis=1) for p in (L, C, R)]
    _ca_round(bits, keys, map2d, inverse=False)
    out = [np.packbits(b, axis=1) for b in bits]
    qs = _keystream(keys, map2d, n, m)
    return [o ^ q for o, q in zip(out, qs)]


def _decrypt_color(planes: list[np.ndarray], keys: KeySpace, map2d: Map2D):
    n, m = planes[0].shape
    qs = _keystream(keys, map2d, n, m)
    bits = [np.unpackbits(p ^ q, axis=1) for p, q in zip(planes, qs)]
    _ca_round(bits, keys, map2d, inverse=True)
    L, C, R = (np.packbits(b, axis=1) for b in bits)
    amount = _ring_amount(keys, map2d, 3 * n * m)
    L, C, R = ring_shift_lcr(L, C, R, amount, inverse=True)
    mixed = _join_lcr(L, C, R)
    unshifted = chaotic_block_shift(mixed, _perm_keys(keys), map2d, inverse=True)
    bms = block_unmix(unshifted)
    return [parity_interleave(bm.to_plane(), times=2, inverse=True) for bm in bms]


def _encrypt_single(plane: np.ndarray, kind: str, keys: KeySpace, map2d: Map2D) -> np.ndarray:
    n, m = plane.shape
    out = parity_interleave(plane, times=2)
    out = ring_shift_gray(out, _ring_amount(keys, map2d, n * m))
    if kind == "binary":  # the plane already is the bit matrix
        bits = [out.copy()]
        _ca_round(bits, keys, map2d, inverse=False)
        return bits[0] ^ (_keystream(keys, map2d, n, m)[0] & 1)
    bits = [np.unpackbits(out, axis=1)]
    _ca_round(bits, keys, map2d, inverse=False)
    return np.packbits(bits[0], axis=1) ^ _keystream(keys, map2d, n, m)[0]


def _decrypt_single(plane: np.ndarray, kind: str, keys: KeySpace, map2d: Map2D) -> np.ndarray:
    n, m = plane.shape
    if kind == "binary":
        bits = [plane ^ (_keystream(keys, map2d, n, m)[0] & 1)]
        _ca_round(bits, keys, map2d, inverse=True)
        out = bits[0]
    else:
        bits = [np.unpackbits(plane ^ _keystream(keys, map2d, n, m)[0], axis=1)]
        _ca_round(bits, keys, map2d, inverse=True)
        out = np.packbits(bits[0], axis=1)
    out = ring_shift_gray(out, _ring_amount(keys, map2d, n * m), inverse=True)
    return parity_interleave(out, times=2, inverse=True)


# --------------------------------------------------------------------------
# ciphertext container
# --------------------------------------------------------------------------

_MAGIC = b"CCRYPT1\n"


def save_container(ct: ImageBuffer, header: CipherHeader, path: str | Path) -> None:
    """Self-contained ciphertext file: magic, JSON header line, raw planes."""
    meta = {
        "version": header.version,
        "kind": header.kind,
        "orig_height": header.orig_height,
        "orig_width": header.orig_width,
        "height": ct.height,
        "width": ct.width,
    }
    blob = _MAGIC + json.dumps(meta, sort_keys=True).encode() + b"\n" + ct.planes.tobytes()
    Path(path).write_bytes(blob)


def load_container(path: str | Path) -> tuple[ImageBuffer, CipherHeader]:
    data = Path(path).read_bytes()
    if not data.startswith(_MAGIC):
        raise DataError(f"{path} is not a ciphertext container")
    nl = data.index(b"\n", len(_MAGIC))
    try:
        meta = json.loads(data[len(_MAGIC) : nl])
        kind = meta["kind"]
        h, w = int(meta["height"]), int(meta["width"])
        header = CipherHeader(kind, int(meta["orig_height"]), int(meta["orig_width"]), int(meta["version"]))
    except (ValueError, KeyError) as exc:
        raise DataError(f"bad container header in {path}: {exc}") from None
    channels = 3 if kind == "color" else 1
    raw = data[nl + 1 :]
    if len(raw) != channels * h * w:
        raise DataError(f"container {path} truncated")
    planes = np.frombuffer(raw, dtype=np.uint8).reshape(channels, h, w).copy()
    return ImageBuffer(kind, planes), header
