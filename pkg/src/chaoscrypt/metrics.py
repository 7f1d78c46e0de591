"""Security and chaos diagnostics: NPCR/UACI, entropy, correlation, PSNR,
Lyapunov exponents, bifurcation scans, and CSV-friendly data exporters."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chaos import Map2D
from .errors import ChaosCryptError, DimensionError
from .imgio import ImageBuffer

DIRECTIONS = ("horizontal", "vertical", "diagonal-up", "diagonal-down")


class UndefinedCorrelationError(ChaosCryptError):
    """Correlation is undefined when one side of the sample has zero variance."""


@dataclass
class MetricsReport:
    """Per-image or image-pair security numbers; all fields already in
    human units (percent, bits, dB)."""

    npcr: float | None = None
    uaci: float | None = None
    entropy: list[float] = field(default_factory=list)
    correlation: dict[str, list[float]] = field(default_factory=dict)
    psnr: float | None = None
    pairs_sampled: int = 0

    def lines(self) -> list[str]:
        out = []
        if self.npcr is not None:
            out.append(f"NPCR: {self.npcr:.4f} %")
            out.append(f"UACI: {self.uaci:.4f} %")
        if self.psnr is not None:
            out.append("PSNR: identical" if math.isinf(self.psnr) else f"PSNR: {self.psnr:.4f} dB")
        for i, h in enumerate(self.entropy):
            out.append(f"entropy[plane {i}]: {h:.4f} bits")
        for direction, values in self.correlation.items():
            joined = ", ".join(f"{v:+.4f}" for v in values)
            out.append(f"correlation {direction}: {joined}")
        if self.pairs_sampled:
            out.append(f"correlation pairs sampled: {self.pairs_sampled}")
        return out


def _as_planes(image) -> np.ndarray:
    if isinstance(image, ImageBuffer):
        return image.planes
    arr = np.asarray(image)
    return arr[None, :, :] if arr.ndim == 2 else arr


def npcr_uaci(c1, c2) -> tuple[float, float]:
    """Pixel change rate and mean absolute change between two images, in %.

    Multi-plane inputs average the per-plane values.
    """
    a, b = _as_planes(c1), _as_planes(c2)
    if a.shape != b.shape:
        raise DimensionError(f"image shapes differ: {a.shape} vs {b.shape}")
    per_plane_npcr = [(p != q).mean() * 100.0 for p, q in zip(a, b)]
    per_plane_uaci = [
        (np.abs(p.astype(np.int64) - q.astype(np.int64)).mean() / 255.0) * 100.0
        for p, q in zip(a, b)
    ]
    return float(np.mean(per_plane_npcr)), float(np.mean(per_plane_uaci))


def entropy(plane: np.ndarray) -> float:
    """Shannon entropy of the 256-level histogram, in bits."""
    plane = np.asarray(plane)
    if plane.size == 0:
        raise DimensionError("entropy of an empty plane")
    counts = np.bincount(plane.reshape(-1).astype(np.uint8), minlength=256)
    p = counts[counts > 0] / plane.size
    return float(-(p * np.log2(p)).sum())


def histogram_256(plane: np.ndarray) -> np.ndarray:
    return np.bincount(np.asarray(plane).reshape(-1).astype(np.uint8), minlength=256)


def chi_square_uniform(plane: np.ndarray) -> float:
    """Chi-square statistic of the 256-bin histogram against uniform."""
    counts = histogram_256(plane)
    expected = counts.sum() / 256.0
    return float(((counts - expected) ** 2 / expected).sum())


def correlation(
    plane: np.ndarray, direction: str, pairs: int, rng: np.random.Generator | int
) -> float:
    """Pearson correlation of randomly sampled adjacent pixel pairs."""
    if isinstance(rng, int):
        rng = np.random.default_rng(rng)
    plane = np.asarray(plane)
    n, m = plane.shape
    if direction == "horizontal":
        imax, jmax, di, dj = n, m - 1, 0, 1
    elif direction == "vertical":
        imax, jmax, di, dj = n - 1, m, 1, 0
    elif direction == "diagonal-up":  # lower left to top right
        imax, jmax, di, dj = n - 1, m - 1, -1, 1
    elif direction == "diagonal-down":
        imax, jmax, di, dj = n - 1, m - 1, 1, 1
    else:
        raise ValueError(f"unknown direction {direction!r}")
    avail = imax * jmax
    if avail < 1 or pairs > avail:
        raise DimensionError(f"cannot sample {pairs} {direction} pairs from {plane.shape}")
    idx = rng.choice(avail, size=pairs, replace=False)
    i = idx // jmax
    j = idx % jmax
    if di < 0:
        i = i + 1  # anchor on the lower row so the neighbor is inside
    x = plane[i, j].astype(np.float64)
    y = plane[i + di, j + dj].astype(np.float64)
    sx, sy = x.std(), y.std()
    if sx == 0.0 or sy == 0.0:
        raise UndefinedCorrelationError(f"zero variance in {direction} sample")
    return float(((x - x.mean()) * (y - y.mean())).mean() / (sx * sy))


def psnr(a, b) -> float:
    """Peak signal-to-noise ratio in dB; +inf for identical images."""
    pa, pb = _as_planes(a), _as_planes(b)
    if pa.shape != pb.shape:
        raise DimensionError(f"image shapes differ: {pa.shape} vs {pb.shape}")
    mse = np.mean((pa.astype(np.float64) - pb.astype(np.float64)) ** 2)
    if mse == 0.0:
        return math.inf
    return float(10.0 * math.log10(255.0**2 / mse))


# --------------------------------------------------------------------------
# dynamical diagnostics
# --------------------------------------------------------------------------


def _wrap_delta(a: float, b: float) -> float:
    """Difference a-b folded into [-0.5, 0.5) (states live on the unit torus)."""
    return (a - b + 0.5) % 1.0 - 0.5


def lyapunov(
    map2d: Map2D,
    r: float,
    n: int,
    x0: float,
    y0: float,
    transient: int = 100,
    eps: float = 1e-8,
) -> tuple[float, float]:
    """Two Lyapunov exponents by finite-difference tangent propagation.

    Two orthonormal perturbation directions are pushed through the map each
    step, re-orthonormalized, and the log stretch factors averaged over n
    steps after the transient.
    """
    if n < 100:
        raise ValueError(f"need at least 100 steps, got {n}")
    x, y = x0, y0
    for _ in range(transient):
        x, y = map2d.step(x, y, r)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ChaosCryptError("trajectory left the domain during transient")
    u = np.array([[1.0, 0.0], [0.0, 1.0]])
    sums = np.zeros(2)
    log_floor = -50.0
    for _ in range(n):
        fx, fy = map2d.step(x, y, r)
        if not (math.isfinite(fx) and math.isfinite(fy)):
            raise ChaosCryptError("trajectory left the domain")
        vs = []
        for k in range(2):
            px, py = map2d.step(x + eps * u[k, 0], y + eps * u[k, 1], r)
            vs.append([_wrap_delta(px, fx) / eps, _wrap_delta(py, fy) / eps])
        v = np.array(vs)
        # Gram-Schmidt with log stretch accounting
        r1 = float(np.linalg.norm(v[0]))
        sums[0] += math.log(r1) if r1 > 0 else log_floor
        u0 = v[0] / r1 if r1 > 0 else np.array([1.0, 0.0])
        w = v[1] - np.dot(v[1], u0) * u0
        r2 = float(np.linalg.norm(w))
        sums[1] += math.log(r2) if r2 > 0 else log_floor
        u1 = w / r2 if r2 > 0 else np.array([-u0[1], u0[0]])
        u = np.array([u0, u1])
        x, y = fx, fy
    lam = sums / n
    return float(max(lam)), float(min(lam))


def bifurcation_scan(
    map2d: Map2D,
    r_values,
    transient: int,
    keep: int,
    x0: float = 0.37,
    y0: float = 0.62,
) -> list[tuple[float, np.ndarray]]:
    """For each r: discard `transient` iterates, then record `keep` x-values."""
    r_values = list(r_values)
    if not r_values:
        raise ValueError("empty r grid")
    out = []
    for r in r_values:
        x, y = x0, y0
        for _ in range(transient):
            x, y = map2d.step(x, y, r)
        xs = np.empty(keep)
        for i in range(keep):
            x, y = map2d.step(x, y, r)
            xs[i] = x
        out.append((float(r), xs))
    return out


# --------------------------------------------------------------------------
# exporter row builders (CSV writing itself lives in the CLI)
# --------------------------------------------------------------------------


def distribution_rows(map2d: Map2D, r: float, n: int, x0: float, y0: float):
    """(i, x, y) trajectory points for scatter plots."""
    x, y = x0, y0
    rows = []
    for i in range(n):
        x, y = map2d.step(x, y, r)
        rows.append((i + 1, x, y))
    return rows


def histogram_rows(map2d: Map2D, r: float, n: int, x0: float, y0: float, bins: int = 100):
    """(bin_left, bin_right, count) over the x-outputs."""
    x, y = x0, y0
    xs = np.empty(n)
    for i in range(n):
        x, y = map2d.step(x, y, r)
        xs[i] = x
    counts, edges = np.histogram(xs, bins=bins, range=(0.0, 1.0))
    return [(edges[i], edges[i + 1], int(counts[i])) for i in range(bins)]


def cobweb_rows(map2d: Map2D, r: float, n: int, x0: float, y0: float):
    """Staircase segments (x0, y0, x1, y1) over consecutive x-iterates."""
    x, y = x0, y0
    xs = [x]
    for _ in range(n):
        x, y = map2d.step(x, y, r)
        xs.append(x)
    rows = []
    for a, b in zip(xs[:-1], xs[1:]):
        rows.append((a, a, a, b))  # vertical rise to the curve
        rows.append((a, b, b, b))  # horizontal move to the diagonal
    return rows
