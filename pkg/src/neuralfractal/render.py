"""Full-image rendering: uniform warmup passes, threshold tuning, adaptive passes.

A render estimates each pixel's color as the mean of escape-time-colored
Monte Carlo samples taken inside that pixel's rectangle in the complex
plane. The first pass is a throwaway probe used to tune the escape
threshold; everything accumulated afterwards uses the tuned value, since
escape counts (and therefore colors) depend on it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .coloring import escape_colors, indicator_colors, make_colormap
from .dynamics import IterationParams, iterate_batch
from .errors import ConfigError
from .sampler import AccumulatorGrid, box_blur, compute_sampling_map, cv2_map, draw_samples
from .seeds import derive_seeds
from .threshold import ThresholdConfig, adjust_threshold, sanitize_magnitudes

COLOR_MODES = ("escape_time", "indicator")
PALETTE_STYLES = ("uniform", "smooth")


@dataclass(frozen=True)
class ImageWindow:
    """Axis-aligned rectangle in the complex plane plus its pixel resolution.

    ``resolution`` is (pixels_x, pixels_y). Pixel (0, 0) is the top-left
    corner: smallest real part, largest imaginary part, rows scanning
    downward in imaginary value.
    """

    center: complex = 0j
    width: float = 4.0
    height: float = 4.0
    resolution: tuple[int, int] = (256, 256)

    def __post_init__(self) -> None:
        if not (self.width > 0) or not (self.height > 0):
            raise ConfigError(f"window extents must be > 0, got {self.width}x{self.height}")
        nx, ny = self.resolution
        if nx < 1 or ny < 1:
            raise ConfigError(f"resolution components must be >= 1, got {self.resolution}")

    @property
    def pixel_count(self) -> int:
        nx, ny = self.resolution
        return nx * ny


@dataclass(frozen=True)
class PixelRegion:
    """The complex-plane rectangle covered by one pixel."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float


def pixel_to_region(window: ImageWindow, pixel: tuple[int, int]) -> PixelRegion:
    """Rectangle covered by pixel (x, y); the union over all pixels tiles the window."""
    px, py = pixel
    nx, ny = window.resolution
    if not (0 <= px < nx and 0 <= py < ny):
        raise ConfigError(f"pixel {pixel} outside resolution {window.resolution}")
    pw = window.width / nx
    ph = window.height / ny
    re0 = window.center.real - window.width / 2.0
    im_top = window.center.imag + window.height / 2.0
    return PixelRegion(
        re_min=re0 + px * pw,
        re_max=re0 + (px + 1) * pw,
        im_min=im_top - (py + 1) * ph,
        im_max=im_top - py * ph,
    )


def sample_coords(window: ImageWindow, flat_indices: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Complex coordinates for (flat pixel index, intra-pixel offset) pairs.

    Offsets are (u, v) in [0, 1)^2 measured from the pixel's top-left corner,
    v increasing downward in imaginary value.
    """
    nx, ny = window.resolution
    idx = np.asarray(flat_indices, dtype=np.int64)
    off = np.asarray(offsets, dtype=np.float64)
    px = idx % nx
    py = idx // nx
    pw = window.width / nx
    ph = window.height / ny
    re0 = window.center.real - window.width / 2.0
    im_top = window.center.imag + window.height / 2.0
    re = re0 + (px + off[:, 0]) * pw
    im = im_top - (py + off[:, 1]) * ph
    return re + 1j * im


def pixel_centers(window: ImageWindow) -> np.ndarray:
    """Center coordinate of every pixel, flat row-major order."""
    idx = np.arange(window.pixel_count, dtype=np.int64)
    offsets = np.full((window.pixel_count, 2), 0.5)
    return sample_coords(window, idx, offsets)


@dataclass(frozen=True)
class RenderConfig:
    """Everything a single render needs besides the dynamics and the window.

    ``threshold`` set to None pins the escape threshold at ``iteration.tau``
    with no probe pass; otherwise the probe runs at ``threshold.tau_init``
    and the tuned value replaces ``iteration.tau``. ``samples_per_epoch``
    of None means one sample per pixel on average per adaptive pass.
    ``vm_stop``, when set, stops sampling pixels whose variance of the mean
    has dropped to it (see :func:`neuralfractal.sampler.compute_sampling_map`).
    """

    iteration: IterationParams = IterationParams(tau=1.0, max_iters=20)
    threshold: ThresholdConfig | None = ThresholdConfig()
    max_epochs: int = 50
    initial_samples_per_pixel: int = 4
    samples_per_epoch: int | None = None
    stop_threshold: float = 1e-4
    vm_stop: float | None = None
    colormap_size: int = 256
    palette_style: str = "uniform"
    color_mode: str = "escape_time"
    seed: int = 0
    palette_seed: int | None = None

    def __post_init__(self) -> None:
        if self.max_epochs < 1:
            raise ConfigError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.initial_samples_per_pixel < 1:
            raise ConfigError(
                f"initial_samples_per_pixel must be >= 1, got {self.initial_samples_per_pixel}"
            )
        if self.samples_per_epoch is not None and self.samples_per_epoch < 1:
            raise ConfigError(f"samples_per_epoch must be >= 1, got {self.samples_per_epoch}")
        if self.stop_threshold < 0:
            raise ConfigError(f"stop_threshold must be >= 0, got {self.stop_threshold}")
        if self.vm_stop is not None and self.vm_stop < 0:
            raise ConfigError(f"vm_stop must be >= 0, got {self.vm_stop}")
        if self.colormap_size < 2:
            raise ConfigError(f"colormap_size must be >= 2, got {self.colormap_size}")
        if self.palette_style not in PALETTE_STYLES:
            raise ConfigError(f"palette_style must be one of {PALETTE_STYLES}")
        if self.color_mode not in COLOR_MODES:
            raise ConfigError(f"color_mode must be one of {COLOR_MODES}")

    def resolved_palette_seed(self) -> int:
        if self.palette_seed is not None:
            return self.palette_seed
        return derive_seeds(self.seed, 1, count=1)[0]


@dataclass(eq=False)
class RenderStats:
    """Diagnostics for one render.

    ``total_samples`` counts accumulated samples only; the threshold probe
    pass is discarded and reported separately in ``probe_samples``.
    """

    final_tau: float
    total_samples: int
    probe_samples: int
    initial_passes: int
    epochs_run: int
    exhausted: bool
    per_pixel_counts: np.ndarray
    cv2_map: np.ndarray
    elapsed_seconds: float

    def summary(self) -> dict:
        return {
            "final_tau": self.final_tau,
            "total_samples": int(self.total_samples),
            "probe_samples": int(self.probe_samples),
            "initial_passes": self.initial_passes,
            "epochs_run": self.epochs_run,
            "exhausted": self.exhausted,
            "elapsed_seconds": round(self.elapsed_seconds, 3),
        }


def render_image(dynamics, window: ImageWindow, config: RenderConfig):
    """Render one image; returns (image, stats).

    The image is an (height, width, 3) float array in [0, 1], the running
    mean of all accumulated sample colors. Fully deterministic given the
    config seeds: reruns produce bit-identical arrays.
    """
    t0 = time.perf_counter()
    g = dynamics
    nx, ny = window.resolution
    pixel_count = window.pixel_count
    rng = np.random.default_rng(config.seed)
    cmap = make_colormap(
        config.resolved_palette_seed(), config.colormap_size, config.palette_style
    )
    max_iters = config.iteration.max_iters

    def colors_for(batch):
        if config.color_mode == "indicator":
            return indicator_colors(batch.escaped)
        return escape_colors(batch.escaped, batch.escape_iter, max_iters, cmap)

    all_pixels = np.arange(pixel_count, dtype=np.int64)

    # Throwaway probe pass: tune tau from the magnitudes the provisional
    # threshold produces, then start accumulation fresh under the tuned value.
    tau = config.iteration.tau
    probe_samples = 0
    if config.threshold is not None:
        probe_params = IterationParams(tau=config.threshold.tau_init, max_iters=max_iters)
        coords = sample_coords(window, all_pixels, rng.random((pixel_count, 2)))
        probe = iterate_batch(g, coords, probe_params)
        probe_samples = pixel_count
        magnitudes = sanitize_magnitudes(np.abs(probe.final_z))
        tau = adjust_threshold(magnitudes, config.threshold)
    params = IterationParams(tau=tau, max_iters=max_iters)

    grid = AccumulatorGrid(ny, nx)
    for _ in range(config.initial_samples_per_pixel):
        coords = sample_coords(window, all_pixels, rng.random((pixel_count, 2)))
        batch = iterate_batch(g, coords, params)
        grid.add_full_pass(colors_for(batch).reshape(ny, nx, 3))

    samples_per_epoch = config.samples_per_epoch or pixel_count
    epochs_run = 0
    exhausted = False
    for _ in range(config.max_epochs):
        smap = compute_sampling_map(grid, config.stop_threshold, vm_stop=config.vm_stop)
        if smap.exhausted:
            exhausted = True
            break
        flat_idx, offsets = draw_samples(smap, samples_per_epoch, rng)
        coords = sample_coords(window, flat_idx, offsets)
        batch = iterate_batch(g, coords, params)
        grid.add(flat_idx, colors_for(batch))
        epochs_run += 1

    image = np.clip(grid.mean_image(), 0.0, 1.0)
    stats = RenderStats(
        final_tau=tau,
        total_samples=int(grid.n.sum()),
        probe_samples=probe_samples,
        initial_passes=config.initial_samples_per_pixel,
        epochs_run=epochs_run,
        exhausted=exhausted,
        per_pixel_counts=grid.n.copy(),
        cv2_map=box_blur(cv2_map(grid)),
        elapsed_seconds=time.perf_counter() - t0,
    )
    return image, stats


def fixed_tau_config(config: RenderConfig, tau: float) -> RenderConfig:
    """Copy of ``config`` with threshold tuning disabled and tau pinned."""
    return replace(
        config,
        iteration=IterationParams(tau=tau, max_iters=config.iteration.max_iters),
        threshold=None,
    )
