"""Per-pixel sample statistics and variance-guided sample allocation.

Each pixel keeps running sums of its sampled colors (mu), squared colors
(m2), and a count (n). From those the renderer derives a per-pixel squared
coefficient of variation, smooths it with a box filter, and normalizes the
result into a categorical distribution over pixels. Pixels that are still
noisy relative to their brightness draw more samples; converged ones stop
receiving any once their smoothed score falls below the stopping threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from PIL import Image
from scipy.ndimage import uniform_filter

from .errors import ConfigError, ExhaustedMapError, UndefinedStatisticsError

# Guard for near-black channels: means below MEAN_EPS would blow up the
# relative-variance ratio, so their score is V / MEAN_EPS**2 capped at CV2_CAP.
MEAN_EPS = 1e-6
CV2_CAP = 1e6


@dataclass
class PixelAccumulator:
    """Running sums for one pixel: color sum, squared-color sum, sample count."""

    mu: np.ndarray = field(default_factory=lambda: np.zeros(3))
    m2: np.ndarray = field(default_factory=lambda: np.zeros(3))
    n: int = 0


def accumulate(acc: PixelAccumulator, color: np.ndarray) -> PixelAccumulator:
    """Fold one sampled color into the accumulator; returns a new accumulator."""
    c = np.asarray(color, dtype=np.float64)
    return PixelAccumulator(mu=acc.mu + c, m2=acc.m2 + c * c, n=acc.n + 1)


def pixel_variance(acc: PixelAccumulator) -> np.ndarray:
    """Per-channel population variance V = m2/n - (mu/n)^2, clamped at 0."""
    if acc.n < 1:
        raise UndefinedStatisticsError("variance of a pixel with no samples is undefined")
    mean = acc.mu / acc.n
    return np.maximum(acc.m2 / acc.n - mean * mean, 0.0)


def variance_of_mean(acc: PixelAccumulator) -> np.ndarray:
    """Per-channel variance of the running mean, V / n. Diagnostic only."""
    return pixel_variance(acc) / acc.n


class AccumulatorGrid:
    """Vectorized accumulator for a full image, shape (height, width).

    Flat pixel indices are row-major: index = row * width + col. One owner
    mutates a grid at a time; renders never share grids.
    """

    def __init__(self, height: int, width: int):
        if height < 1 or width < 1:
            raise ConfigError(f"grid resolution must be >= 1 per axis, got {height}x{width}")
        self.height = height
        self.width = width
        self.mu = np.zeros((height, width, 3))
        self.m2 = np.zeros((height, width, 3))
        self.n = np.zeros((height, width), dtype=np.int64)

    @property
    def pixel_count(self) -> int:
        return self.height * self.width

    def reset(self) -> None:
        self.mu[:] = 0.0
        self.m2[:] = 0.0
        self.n[:] = 0

    def add(self, flat_indices: np.ndarray, colors: np.ndarray) -> None:
        """Accumulate colors at the given flat pixel indices (repeats allowed)."""
        idx = np.asarray(flat_indices, dtype=np.int64)
        c = np.asarray(colors, dtype=np.float64)
        p = self.pixel_count
        for ch in range(3):
            self.mu[..., ch] += np.bincount(idx, weights=c[:, ch], minlength=p).reshape(
                self.height, self.width
            )
            self.m2[..., ch] += np.bincount(
                idx, weights=c[:, ch] * c[:, ch], minlength=p
            ).reshape(self.height, self.width)
        self.n += np.bincount(idx, minlength=p).reshape(self.height, self.width)

    def add_full_pass(self, colors: np.ndarray) -> None:
        """Accumulate one color per pixel, shaped (height, width, 3)."""
        c = np.asarray(colors, dtype=np.float64)
        self.mu += c
        self.m2 += c * c
        self.n += 1

    def pixel(self, row: int, col: int) -> PixelAccumulator:
        """Scalar view of one pixel, for contract checks and debugging."""
        return PixelAccumulator(
            mu=self.mu[row, col].copy(), m2=self.m2[row, col].copy(), n=int(self.n[row, col])
        )

    def _require_samples(self) -> None:
        if np.any(self.n == 0):
            raise UndefinedStatisticsError("every pixel needs at least one sample")

    def mean_image(self) -> np.ndarray:
        """Running mean per pixel, shape (height, width, 3)."""
        self._require_samples()
        return self.mu / self.n[..., None]

    def variance(self) -> np.ndarray:
        """Per-pixel, per-channel population variance, clamped at 0."""
        self._require_samples()
        mean = self.mu / self.n[..., None]
        return np.maximum(self.m2 / self.n[..., None] - mean * mean, 0.0)

    def variance_of_mean(self) -> np.ndarray:
        """Per-pixel, per-channel variance of the running mean, V / n."""
        return self.variance() / self.n[..., None]


def cv2_map(grid: AccumulatorGrid) -> np.ndarray:
    """Squared coefficient of variation per pixel, averaged over channels.

    Per channel the score is V / mean^2; channels with mean below
    ``MEAN_EPS`` use V / MEAN_EPS^2 capped at ``CV2_CAP`` instead, so
    all-black pixels score 0 rather than 0/0.
    """
    grid._require_samples()
    mean = grid.mu / grid.n[..., None]
    var = np.maximum(grid.m2 / grid.n[..., None] - mean * mean, 0.0)
    guarded = np.minimum(var / MEAN_EPS**2, CV2_CAP)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = var / (mean * mean)
    per_channel = np.where(mean < MEAN_EPS, guarded, ratio)
    return per_channel.mean(axis=2)


def box_blur(values: np.ndarray, size: int = 5) -> np.ndarray:
    """Mean filter with a size x size kernel and clamp-to-edge borders.

    Intended for non-negative score maps; the running-sum implementation
    underneath can leave a tiny negative residue from cancellation, so the
    result is clamped at zero. size=1 is the identity; used by tests to
    bypass smoothing.
    """
    if size < 1 or size % 2 == 0:
        raise ConfigError(f"box blur size must be odd and >= 1, got {size}")
    v = np.asarray(values, dtype=np.float64)
    if size == 1:
        return v.copy()
    return np.maximum(uniform_filter(v, size=size, mode="nearest"), 0.0)


@dataclass(frozen=True, eq=False)
class SamplingMap:
    """Per-pixel categorical distribution steering the next adaptive pass.

    ``probabilities`` sums to 1 unless ``exhausted`` is set, in which case
    every pixel fell below the stopping threshold and rendering can end.
    """

    probabilities: np.ndarray
    exhausted: bool


def compute_sampling_map(
    grid: AccumulatorGrid,
    stop_threshold: float,
    blur_size: int = 5,
    vm_stop: float | None = None,
) -> SamplingMap:
    """Blend the relative-variance map into a probability distribution.

    Channel-averaged CV^2 -> box blur -> zero out entries below
    ``stop_threshold`` -> normalize. An all-zero result is returned as an
    exhausted map rather than an error.

    ``vm_stop``, when set, additionally zeroes pixels whose own (unblurred)
    variance of the mean is at or below it on every channel. CV^2 is
    scale-free and never decays as a pixel converges, so without this a
    noisy-but-settled pixel keeps drawing samples forever; pruning on the
    estimate's variance is what lets a render finish a pixel and move on.
    """
    scores = box_blur(cv2_map(grid), size=blur_size)
    scores[scores < stop_threshold] = 0.0
    if vm_stop is not None:
        converged = grid.variance_of_mean().max(axis=2) <= vm_stop
        scores[converged] = 0.0
    total = scores.sum()
    if total <= 0.0:
        return SamplingMap(probabilities=np.zeros_like(scores), exhausted=True)
    return SamplingMap(probabilities=scores / total, exhausted=False)


def draw_samples(
    smap: SamplingMap, n: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Draw n (flat pixel index, intra-pixel offset) pairs from the map.

    Pixel indices are independent categorical draws via inverse-CDF lookup;
    offsets are uniform in [0, 1)^2 relative to the pixel's top-left corner.
    Deterministic given the generator state.
    """
    if smap.exhausted:
        raise ExhaustedMapError("sampling map has no mass left")
    if n < 1:
        raise ConfigError(f"sample count must be >= 1, got {n}")
    p = smap.probabilities.reshape(-1)
    cdf = np.cumsum(p)
    cdf[-1] = 1.0  # guard against cumulative rounding
    u = rng.random(n)
    flat_idx = np.searchsorted(cdf, u, side="right").astype(np.int64)
    offsets = rng.random((n, 2))
    return flat_idx, offsets


def save_grayscale_png(values: np.ndarray, path) -> None:
    """Write a 2D array as a max-normalized 8-bit grayscale PNG.

    Used to inspect relative-variance and sample-count maps; an all-zero
    array writes as solid black.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 2:
        raise ConfigError(f"grayscale export expects a 2D array, got shape {v.shape}")
    peak = v.max()
    norm = v / peak if peak > 0 else np.zeros_like(v)
    img = np.rint(255.0 * np.clip(norm, 0.0, 1.0)).astype(np.uint8)
    Image.fromarray(img, mode="L").save(path, format="PNG")
