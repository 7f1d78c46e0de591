"""Position-scrambling primitives, every one an exact bijection.

All shift amounts are reduced modulo the path length before use, and every
operation takes ``inverse=True`` to undo the corresponding forward call.

Path conventions (fixed here; any order consistent with the construction
would scramble equally well, but interoperability requires one normative
choice):

Concentric ring, clockwise from the top-left corner (4x4)::

     1  2  3  4
    12 13 14  5
    11 16 15  6
    10  9  8  7

Three-matrix ring cycle: L is traversed clockwise from L(0,0); the cycle
then enters C at C's innermost cell and walks the same ring order backwards
(counter-clockwise) out to C(0,0); then R clockwise like L; then back to
L(0,0).

Spiral kind I, column-major from the top-left, down the column first (4x4)::

     1 12 11 10
     2 13 16  9
     3 14 15  8
     4  5  6  7

Spiral kind II, row-major from the bottom-right, along the row first: the
clockwise ring order rotated half a turn, i.e. cell (i, j) of kind II is
visited when the ring order visits (n-1-i, m-1-j) (4x4)::

     7  8  9 10
     6 15 16 11
     5 14 13 12
     4  3  2  1

For three planes both kinds chain plane r -> g -> b -> r, entering each
plane at its own starting corner.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .chaos import Map2D, truncated_sequence
from .errors import DimensionError

# --------------------------------------------------------------------------
# parity interleave
# --------------------------------------------------------------------------


def _parity_perm(k: int) -> np.ndarray:
    return np.concatenate([np.arange(0, k, 2), np.arange(1, k, 2)])


def parity_interleave(plane: np.ndarray, times: int = 1, inverse: bool = False) -> np.ndarray:
    """Move odd columns left / even right, then odd rows up / even down.

    Applying it twice yields the sixteen-segment layout used by the cipher.
    """
    n, m = plane.shape
    if n % 2 or m % 2:
        raise DimensionError(f"parity interleave needs even dims, got {plane.shape}")
    pr, pc = _parity_perm(n), _parity_perm(m)
    if inverse:
        pr, pc = np.argsort(pr), np.argsort(pc)
    out = plane
    for _ in range(times):
        out = out[pr][:, pc]
    return out


# --------------------------------------------------------------------------
# block matrices
# --------------------------------------------------------------------------


@dataclass
class BlockMatrix:
    """A plane cut into an equal-size grid of tiles, shape (Br, Bc, th, tw)."""

    blocks: np.ndarray

    @classmethod
    def from_plane(cls, plane: np.ndarray, block_rows: int, block_cols: int) -> "BlockMatrix":
        n, m = plane.shape
        if n % block_rows or m % block_cols:
            raise DimensionError(
                f"{plane.shape} not divisible into {block_rows}x{block_cols} blocks"
            )
        th, tw = n // block_rows, m // block_cols
        blocks = plane.reshape(block_rows, th, block_cols, tw).transpose(0, 2, 1, 3)
        return cls(blocks.copy())

    def to_plane(self) -> np.ndarray:
        br, bc, th, tw = self.blocks.shape
        return self.blocks.transpose(0, 2, 1, 3).reshape(br * th, bc * tw)

    @property
    def grid(self) -> tuple[int, int]:
        return self.blocks.shape[:2]


def block_mix(r: BlockMatrix, g: BlockMatrix, b: BlockMatrix) -> BlockMatrix:
    """Interleave three 4x4 block matrices into one 6x8 block matrix.

    Columns 2j-1 / 2j (1-based) take r's and b's columns; rows 5 and 6 take
    g's rows concatenated pairwise.
    """
    shapes = {r.blocks.shape, g.blocks.shape, b.blocks.shape}
    if len(shapes) != 1 or r.grid != (4, 4):
        raise DimensionError("block_mix needs three 4x4 block matrices of equal tile size")
    th, tw = r.blocks.shape[2:]
    mixed = np.empty((6, 8, th, tw), dtype=r.blocks.dtype)
    for j in range(4):
        mixed[:4, 2 * j] = r.blocks[:, j]
        mixed[:4, 2 * j + 1] = b.blocks[:, j]
    for j in range(2):
        mixed[4 + j, :4] = g.blocks[2 * j]
        mixed[4 + j, 4:] = g.blocks[2 * j + 1]
    return BlockMatrix(mixed)


def block_unmix(mixed: BlockMatrix) -> tuple[BlockMatrix, BlockMatrix, BlockMatrix]:
    """Exact inverse of block_mix."""
    if mixed.grid != (6, 8):
        raise DimensionError(f"expected a 6x8 block matrix, got {mixed.grid}")
    th, tw = mixed.blocks.shape[2:]
    r = np.empty((4, 4, th, tw), dtype=mixed.blocks.dtype)
    g = np.empty_like(r)
    b = np.empty_like(r)
    for j in range(4):
        r[:, j] = mixed.blocks[:4, 2 * j]
        b[:, j] = mixed.blocks[:4, 2 * j + 1]
    for j in range(2):
        g[2 * j] = mixed.blocks[4 + j, :4]
        g[2 * j + 1] = mixed.blocks[4 + j, 4:]
    return BlockMatrix(r), BlockMatrix(g), BlockMatrix(b)


def chaotic_block_shift(
    bm: BlockMatrix,
    keys: tuple[float, float, float],
    map2d: Map2D,
    inverse: bool = False,
) -> BlockMatrix:
    """Shift block columns up/down and block rows right/left by chaos digits.

    Column j uses the j-th first-decimal digit of the x-sequence (odd columns
    up, even down, 1-based); row i uses the i-th digit of the y-sequence
    (odd right, even left).
    """
    x0, y0, r = keys
    br, bc = bm.grid
    digits = truncated_sequence(x0, y0, r, max(br, bc), 1, 1, map2d)
    col_amts = [int(d) % br for d in digits[0][:bc]]
    row_amts = [int(d) % bc for d in digits[1][:br]]
    blocks = bm.blocks.copy()

    def shift_cols(sign: int) -> None:
        for j in range(bc):
            up = j % 2 == 0  # 1-based odd column
            amt = col_amts[j] * (1 if up else -1) * sign
            blocks[:, j] = np.roll(blocks[:, j], -amt, axis=0)

    def shift_rows(sign: int) -> None:
        for i in range(br):
            right = i % 2 == 0  # 1-based odd row
            amt = row_amts[i] * (1 if right else -1) * sign
            blocks[i] = np.roll(blocks[i], amt, axis=0)

    if inverse:
        shift_rows(-1)
        shift_cols(-1)
    else:
        shift_cols(1)
        shift_rows(1)
    return BlockMatrix(blocks)


# --------------------------------------------------------------------------
# ring and spiral cycles
# --------------------------------------------------------------------------


@lru_cache(maxsize=128)
def _ring_order(n: int, m: int) -> np.ndarray:
    """Clockwise concentric traversal from (0,0), as flat indices."""
    order = []
    top, bottom, left, right = 0, n - 1, 0, m - 1
    while top <= bottom and left <= right:
        order.extend(top * m + j for j in range(left, right + 1))
        order.extend(i * m + right for i in range(top + 1, bottom + 1))
        if bottom > top:
            order.extend(bottom * m + j for j in range(right - 1, left - 1, -1))
        if right > left:
            order.extend(i * m + left for i in range(bottom - 1, top, -1))
        top, bottom, left, right = top + 1, bottom - 1, left + 1, right - 1
    return np.asarray(order, dtype=np.int64)


@lru_cache(maxsize=128)
def _spiral_order_i(n: int, m: int) -> np.ndarray:
    """Column-major spiral from (0,0): down, right, up, left, inward."""
    order = []
    top, bottom, left, right = 0, n - 1, 0, m - 1
    while top <= bottom and left <= right:
        order.extend(i * m + left for i in range(top, bottom + 1))
        order.extend(bottom * m + j for j in range(left + 1, right + 1))
        if right > left:
            order.extend(i * m + right for i in range(bottom - 1, top - 1, -1))
        if bottom > top:
            order.extend(top * m + j for j in range(right - 1, left, -1))
        top, bottom, left, right = top + 1, bottom - 1, left + 1, right - 1
    return np.asarray(order, dtype=np.int64)


@lru_cache(maxsize=128)
def _spiral_order_ii(n: int, m: int) -> np.ndarray:
    """Row-major spiral from (n-1,m-1): the ring order rotated half a turn."""
    return n * m - 1 - _ring_order(n, m)


def _rotate_cycle(stack: np.ndarray, cycle: np.ndarray, amount: int, inverse: bool) -> np.ndarray:
    amount %= len(cycle)
    if inverse:
        amount = -amount
    out = stack.copy()
    flat = out.reshape(-1)
    flat[cycle] = np.roll(flat[cycle], amount)
    return out


def _check_equal_dims(planes) -> tuple[int, int]:
    shapes = {p.shape for p in planes}
    if len(shapes) != 1:
        raise DimensionError(f"plane shapes differ: {sorted(shapes)}")
    return planes[0].shape


def ring_shift_lcr(
    L: np.ndarray, C: np.ndarray, R: np.ndarray, amount: int, inverse: bool = False
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rotate values along the closed L -> reversed C -> R ring cycle."""
    n, m = _check_equal_dims((L, C, R))
    ring = _ring_order(n, m)
    size = n * m
    cycle = np.concatenate([ring, size + ring[::-1], 2 * size + ring])
    stack = np.stack([L, C, R])
    out = _rotate_cycle(stack, cycle, amount, inverse)
    return out[0], out[1], out[2]


def ring_shift_gray(plane: np.ndarray, amount: int, inverse: bool = False) -> np.ndarray:
    """Single-plane variant: the ring closes back onto its own first cell."""
    n, m = plane.shape
    return _rotate_cycle(plane, _ring_order(n, m), amount, inverse)


def spiral_shift(planes, kind: str, amount: int, inverse: bool = False):
    """Rotate 1 or 3 planes along the chained spiral cycle of the given kind."""
    planes = tuple(planes)
    if len(planes) not in (1, 3):
        raise DimensionError(f"spiral shift takes 1 or 3 planes, got {len(planes)}")
    n, m = _check_equal_dims(planes)
    if kind == "I":
        path = _spiral_order_i(n, m)
    elif kind == "II":
        path = _spiral_order_ii(n, m)
    else:
        raise ValueError(f"spiral kind must be 'I' or 'II', got {kind!r}")
    size = n * m
    cycle = np.concatenate([k * size + path for k in range(len(planes))])
    stack = np.stack(planes)
    out = _rotate_cycle(stack, cycle, amount, inverse)
    return tuple(out[k] for k in range(len(planes)))


# --------------------------------------------------------------------------
# raw row/column chaotic shift (transform-domain scrambling)
# --------------------------------------------------------------------------


def rowcol_chaotic_shift(
    M: np.ndarray,
    keys: tuple[float, float, float],
    map2d: Map2D,
    tau: int = 3,
    inverse: bool = False,
) -> np.ndarray:
    """Same odd/even parity scheme as the block shift, on raw rows/columns.

    Shift amounts are tau-digit truncations of the chaos outputs: the
    x-sequence drives columns (odd up, even down), the y-sequence rows
    (odd right, even left).
    """
    x0, y0, r = keys
    n, m = M.shape
    digits = truncated_sequence(x0, y0, r, max(n, m), tau, tau, map2d)
    col_amts = [int(d) % n for d in digits[0][:m]]
    row_amts = [int(d) % m for d in digits[1][:n]]
    out = M.copy()

    def shift_cols(sign: int) -> None:
        for j in range(m):
            amt = col_amts[j] * (1 if j % 2 == 0 else -1) * sign
            out[:, j] = np.roll(out[:, j], -amt)

    def shift_rows(sign: int) -> None:
        for i in range(n):
            amt = row_amts[i] * (1 if i % 2 == 0 else -1) * sign
            out[i] = np.roll(out[i], amt)

    if inverse:
        shift_rows(-1)
        shift_cols(-1)
    else:
        shift_cols(1)
        shift_rows(1)
    return out
