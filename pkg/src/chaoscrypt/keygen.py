"""Dynamic key derivation from the plain image, a text, and fresh randomness.

The six-value key {r1, r2, x0_1, y0_1, x0_2, y0_2} seeds every chaos-driven
stage of the cipher.  r1 and r2 are fixed inputs; x0_1 and y0_2 are pure
functions of (image, text, r1, r2); x0_2 and y0_1 additionally mix in one
random draw (the nonce), so they change run to run while the other two stay
put.  Chaos reals are quantized to bytes as floor(v * 256) wherever they meet
integer data.
"""

from __future__ import annotations

import dataclasses
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import automata
from .chaos import HybridMap, Map2D, default_map, sequence, truncated_sequence
from .errors import DataError
from .imgio import ImageBuffer

_Q = 256.0


def q256(values: np.ndarray) -> np.ndarray:
    """Quantize chaos outputs in [0,1) to bytes: floor(v * 256)."""
    return np.floor(np.asarray(values) * _Q).astype(np.uint8)


@dataclass(frozen=True)
class KeySpace:
    """The cipher's secret state, plus the nonce actually drawn."""

    r1: float
    r2: float
    x0_1: float
    y0_1: float
    x0_2: float
    y0_2: float
    nonce: tuple[float, float] = (0.0, 0.0)

    def replace(self, **kw) -> "KeySpace":
        return dataclasses.replace(self, **kw)


_KEY_FIELDS = ("r1", "r2", "x0_1", "y0_1", "x0_2", "y0_2", "nonce_x", "nonce_y")


def dumps_keys(keys: KeySpace) -> str:
    """One `name = value` line per field, 17 significant digits (exact reload)."""
    values = (*[getattr(keys, f) for f in _KEY_FIELDS[:6]], *keys.nonce)
    return "\n".join(f"{name} = {value:.17g}" for name, value in zip(_KEY_FIELDS, values)) + "\n"


def save_keys(keys: KeySpace, path: str | Path) -> None:
    Path(path).write_text(dumps_keys(keys))


def load_keys(path: str | Path) -> KeySpace:
    fields = {}
    try:
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            name, _, value = line.partition("=")
            fields[name.strip()] = float(value)
    except (OSError, ValueError) as exc:
        raise DataError(f"bad key file {path}: {exc}") from None
    missing = set(_KEY_FIELDS) - set(fields)
    if missing:
        raise DataError(f"key file {path} missing fields: {sorted(missing)}")
    return KeySpace(
        r1=fields["r1"],
        r2=fields["r2"],
        x0_1=fields["x0_1"],
        y0_1=fields["y0_1"],
        x0_2=fields["x0_2"],
        y0_2=fields["y0_2"],
        nonce=(fields["nonce_x"], fields["nonce_y"]),
    )


# --------------------------------------------------------------------------
# derivation steps
# --------------------------------------------------------------------------


def _image_planes(image: ImageBuffer) -> np.ndarray:
    planes = image.planes.astype(np.uint8)
    if planes.shape[1] % 2:  # duplicate the last row so pairing works
        planes = np.concatenate([planes, planes[:, -1:, :]], axis=1)
    return planes


def _psi_matrix(planes: np.ndarray, r1: float, map2d: Map2D) -> np.ndarray:
    """Per plane: column 0 = row sums / (256 m); the rest chaos rows seeded
    pairwise by adjacent column-0 entries."""
    c, n, m = planes.shape
    psi = np.empty((c, n, m), dtype=np.float64)
    for k in range(c):
        psi[k, :, 0] = planes[k].sum(axis=1) / (_Q * m)
        if m > 1:
            for j in range(n // 2):
                seq = sequence(psi[k, 2 * j, 0], psi[k, 2 * j + 1, 0], r1, m - 1, map2d)
                psi[k, 2 * j, 1:] = seq[0]
                psi[k, 2 * j + 1, 1:] = seq[1]
    return psi


def _xor_chains(planes: np.ndarray, psi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-chain then column-chain of image XOR quantized-psi; returns
    (last row folded over planes, last column folded over planes)."""
    ups = planes ^ q256(psi)
    down = ups.copy()
    for j in range(down.shape[1] - 1):
        down[:, j + 1, :] ^= down[:, j, :]
    across = down.copy()
    for j in range(across.shape[2] - 1):
        across[:, :, j + 1] ^= across[:, :, j]
    xi1 = down[0, -1, :].copy()
    xi2 = across[0, :, -1].copy()
    for k in range(1, planes.shape[0]):
        xi1 ^= down[k, -1, :]
        xi2 ^= across[k, :, -1]
    return xi1, xi2


def _interleaved_stream(x0: float, y0: float, r: float, count: int, map2d: Map2D) -> np.ndarray:
    """count values alternating between the x-row (odd slots) and y-row (even)."""
    pairs = count // 2 + 1
    seq = sequence(x0, y0, r, pairs, map2d)
    out = np.empty(count, dtype=np.float64)
    out[0::2] = seq[0][: len(out[0::2])]
    out[1::2] = seq[1][: len(out[1::2])]
    return out


def derive_text_vector(text: bytes, x0_1: float, r1: float, m: int, map2d: Map2D | None = None) -> np.ndarray:
    """Byte vector T of length m mixing the text with chaos bytes.

    Three branches by text size vs m: equal sizes XOR the text with an
    interleaved chaos stream; shorter texts are padded with chaos bytes;
    longer texts are truncated and XORed with both chaos rows.
    """
    if m < 1:
        raise DataError("image width must be >= 1")
    if len(text) == 0:
        raise DataError("text must be nonempty")
    map2d = map2d or default_map()
    tb = np.frombuffer(text, dtype=np.uint8)
    # XOR of all text bytes is an integer; scale to (0,1) to stay a usable seed
    y0 = int(np.bitwise_xor.reduce(tb)) / 256.0
    if len(tb) == m:
        w = _interleaved_stream(x0_1, y0, r1, m, map2d)
        return tb ^ q256(w)
    if len(tb) < m:
        fill = _interleaved_stream(x0_1, y0, r1, m - len(tb), map2d)
        return np.concatenate([tb, q256(fill)])
    seq = sequence(x0_1, y0, r1, m, map2d)
    return tb[:m] ^ q256(seq[0]) ^ q256(seq[1])


def _segment_keys(tvec: np.ndarray) -> tuple[list[np.ndarray], list[float]]:
    """Split T's bit expansion into 8 segments, rotate each by 5, and derive a
    per-segment seed from its population count."""
    bits = np.unpackbits(tvec)
    seg_len = bits.size // 8
    segments = []
    deltas = []
    for i in range(8):
        seg = np.roll(bits[i * seg_len : (i + 1) * seg_len], 5)
        segments.append(seg)
        deltas.append((int(seg.sum()) + 1) / (seg_len + 2))
    return segments, deltas


def _ca_vector_sum(segments: list[np.ndarray], deltas: list[float], r2: float, map2d: Map2D) -> float:
    """Evolve each segment by an irreversible CA with chaos-derived rule/rep;
    the result vector is the concatenated bits / 256, reduced to its sum."""
    total_ones = 0
    for i in range(8):
        seed = truncated_sequence(deltas[i], deltas[(i + 1) % 8], r2, 1, 10, 10, map2d)
        rule = int(seed[0, 0]) % 256
        rep = int(seed[1, 0]) % 16 + 1
        evolved = automata.iterate_irreversible(segments[i], rule, rep)
        total_ones += int(evolved.sum())
    return total_ones / 256.0


def generate_keys(
    image: ImageBuffer,
    text: bytes,
    r1: float,
    r2: float,
    rng: random.Random | int,
    map2d: Map2D | None = None,
) -> KeySpace:
    """Derive the full key space from an image, a text, and (r1, r2).

    Deterministic given the rng seed; the drawn nonce is stored in the result
    so decryption keys can be communicated.
    """
    if len(text) == 0:
        raise DataError("text must be nonempty")
    if r1 <= 0 or r2 <= 0:
        raise DataError("r1 and r2 must be positive")
    if isinstance(rng, int):
        rng = random.Random(rng)
    map2d = map2d or default_map()

    planes = _image_planes(image)
    n, m = planes.shape[1:]
    psi = _psi_matrix(planes, r1, map2d)
    xi1, xi2 = _xor_chains(planes, psi)

    norm = _Q * planes.shape[0]  # 256*3 for color, 256 for gray/binary
    w = sequence((int(xi1.sum()) / (n * norm)) % 1.0, (int(xi2.sum()) / (m * norm)) % 1.0, r2, n, map2d)
    v1, v2 = w[0], w[1]
    x0_1 = (v1[n // 2 - 1] + v2[n // 2 - 1]) / 2.0

    tvec = derive_text_vector(text, x0_1, r1, m, map2d)
    segments, deltas = _segment_keys(tvec)
    v3_sum = _ca_vector_sum(segments, deltas, r2, map2d)
    y0_2 = (float(v1.sum()) + float(v2.sum()) + v3_sum) % 1.0

    x_r = rng.random()
    y_r = rng.random()
    while x_r == 0.0:
        x_r = rng.random()
    while y_r == 0.0:
        y_r = rng.random()
    noise = sequence(x_r, y_r, r2, m, map2d)
    x0_2 = (x0_1 + float(noise[0].sum())) % 1.0
    y0_1 = (y0_2 + float(noise[1].sum())) % 1.0

    return KeySpace(r1=r1, r2=r2, x0_1=x0_1, y0_1=y0_1, x0_2=x0_2, y0_2=y0_2, nonce=(x_r, y_r))
