"""Undecimated 2D framelet transform from the B-spline tight frame.

Masks: lowpass [1,2,1]/4, bandpass sqrt(2)/4*[1,0,-1], highpass [-1,2,-1]/4.
Analysis correlates each mask along columns and rows with periodic extension
and no downsampling, giving nine same-size subbands; synthesis is the adjoint
(convolution with the same masks).  The squared mask responses sum to one at
every frequency, so synthesis(analysis(plane)) reproduces the plane exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

_MASKS = (
    np.array([1.0, 2.0, 1.0]) / 4.0,
    np.array([1.0, 0.0, -1.0]) * (np.sqrt(2.0) / 4.0),
    np.array([-1.0, 2.0, -1.0]) / 4.0,
)


def _correlate(x: np.ndarray, mask: np.ndarray, axis: int) -> np.ndarray:
    return (
        mask[0] * np.roll(x, 1, axis=axis)
        + mask[1] * x
        + mask[2] * np.roll(x, -1, axis=axis)
    )


def _convolve(x: np.ndarray, mask: np.ndarray, axis: int) -> np.ndarray:
    return (
        mask[0] * np.roll(x, -1, axis=axis)
        + mask[1] * x
        + mask[2] * np.roll(x, 1, axis=axis)
    )


@dataclass
class FrameletCoeffs:
    """3x3 grid of subbands, each the size of the source plane; [0,0] is LL."""

    bands: np.ndarray  # shape (3, 3, n, m)

    @property
    def plane_shape(self) -> tuple[int, int]:
        return self.bands.shape[2:]

    def copy(self) -> "FrameletCoeffs":
        return FrameletCoeffs(self.bands.copy())


def framelet_forward(plane: np.ndarray) -> FrameletCoeffs:
    """Analyze one plane into nine subbands (column mask a, row mask b)."""
    plane = np.asarray(plane, dtype=np.float64)
    if plane.ndim != 2 or plane.shape[0] < 3 or plane.shape[1] < 3:
        raise DimensionError(f"plane must be at least 3x3, got {plane.shape}")
    n, m = plane.shape
    bands = np.empty((3, 3, n, m), dtype=np.float64)
    for a, mask_a in enumerate(_MASKS):
        col = _correlate(plane, mask_a, axis=0)
        for b, mask_b in enumerate(_MASKS):
            bands[a, b] = _correlate(col, mask_b, axis=1)
    return FrameletCoeffs(bands)


def framelet_inverse(coeffs: FrameletCoeffs) -> np.ndarray:
    """Synthesize a plane from subbands (adjoint of framelet_forward).

    For coefficients produced by the forward transform this is an exact
    inverse; for arbitrary coefficients it returns the least-squares plane.
    """
    bands = coeffs.bands
    if bands.ndim != 4 or bands.shape[:2] != (3, 3):
        raise DimensionError(f"expected (3, 3, n, m) bands, got {bands.shape}")
    out = np.zeros(bands.shape[2:], dtype=np.float64)
    for a, mask_a in enumerate(_MASKS):
        for b, mask_b in enumerate(_MASKS):
            out += _convolve(_convolve(bands[a, b], mask_b, axis=1), mask_a, axis=0)
    return out


def get_ll(coeffs: FrameletCoeffs) -> np.ndarray:
    """The lowpass-lowpass subband."""
    return coeffs.bands[0, 0]


def set_ll(coeffs: FrameletCoeffs, new_ll: np.ndarray) -> FrameletCoeffs:
    """Copy of coeffs with the LL subband replaced; other bands untouched."""
    new_ll = np.asarray(new_ll, dtype=np.float64)
    if new_ll.shape != coeffs.plane_shape:
        raise DimensionError(
            f"LL shape {new_ll.shape} does not match plane shape {coeffs.plane_shape}"
        )
    out = coeffs.copy()
    out.bands[0, 0] = new_ll
    return out


def quantize_ll(ll: np.ndarray) -> np.ndarray:
    """Round LL values half away from zero and clamp to [0, 255] bytes."""
    q = np.floor(np.abs(ll) + 0.5) * np.sign(ll)
    return np.clip(q, 0, 255).astype(np.uint8)
