"""Reference implementations the test suite checks the engine against.

Two kinds of oracle live here. ``OracleDynamics`` provides closed-form maps
(z^2, zero, arbitrary polynomials) that can be plugged into the renderer in
place of a network, giving scenes with independently known ground truth.
The scalar functions below are self-contained reimplementations (plain
Python arithmetic, no shared numerical code with the network evaluator or
the vectorized iteration loop) so agreement between the two paths is
evidence, not tautology.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coloring import ColorMap, escape_colors, indicator_colors, make_colormap
from .dynamics import IterationParams, iterate_batch
from .errors import ConfigError
from .render import ImageWindow, RenderConfig, sample_coords
from .sampler import AccumulatorGrid
from .seeds import derive_seeds

KINDS = ("mandelbrot_square", "zero", "custom")


@dataclass(frozen=True)
class OracleDynamics:
    """Closed-form dynamics selectable by kind.

    ``custom`` evaluates a polynomial with the given coefficients in
    ascending-power order; the other kinds ignore ``coefficients``.
    """

    kind: str
    coefficients: tuple[complex, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "custom" and not self.coefficients:
            raise ConfigError("custom dynamics need a non-empty coefficient list")

    @classmethod
    def mandelbrot(cls) -> "OracleDynamics":
        return cls(kind="mandelbrot_square")

    @classmethod
    def zero(cls) -> "OracleDynamics":
        return cls(kind="zero")

    @classmethod
    def polynomial(cls, coefficients) -> "OracleDynamics":
        return cls(kind="custom", coefficients=tuple(complex(c) for c in coefficients))

    def forward(self, z: complex) -> complex:
        """Scalar evaluation; routes through the batch path so the two are
        bit-identical (scalar CPython and vectorized numpy complex products
        can differ in the last ulp, which iterated dynamics would amplify)."""
        return complex(self.forward_batch(np.array([z], dtype=np.complex128))[0])

    __call__ = forward

    def forward_batch(self, z: np.ndarray) -> np.ndarray:
        if self.kind == "mandelbrot_square":
            return z * z
        if self.kind == "zero":
            return np.zeros_like(z)
        acc = np.zeros_like(z)
        for c in reversed(self.coefficients):
            acc = acc * z + c
        return acc


def mandelbrot_escape_count(c: complex, tau: float = 2.0, max_iters: int = 64) -> int | None:
    """Textbook scalar escape loop for z <- z^2 + c from z = 0.

    Returns the 0-based update count at which |z| first exceeded tau, or
    None if the orbit survived the whole budget. The budget convention
    matches the renderer's loop (max_iters + 1 updates, counts starting at
    0) so classifications are directly comparable.
    """
    z = complex(0.0, 0.0)
    for k in range(max_iters + 1):
        z = z * z + c
        if not (abs(z) <= tau):
            return k
    return None


def mandelbrot_bounded(c: complex, tau: float = 2.0, max_iters: int = 64) -> bool:
    """Set membership under the scalar reference loop."""
    return mandelbrot_escape_count(c, tau, max_iters) is None


def mandelbrot_orbit_margin(c: complex, tau: float = 2.0, max_iters: int = 64) -> float:
    """Smallest distance between any orbit magnitude and the threshold.

    Points with a tiny margin sit numerically on the escape boundary and are
    excluded from exact-agreement comparisons. Non-finite magnitudes are
    skipped; the preceding iterate was already far from tau.
    """
    z = complex(0.0, 0.0)
    margin = float("inf")
    for _ in range(max_iters + 1):
        z = z * z + c
        mag = abs(z)
        if mag == mag and mag != float("inf"):  # skip nan/inf
            margin = min(margin, abs(mag - tau))
        if not (mag <= tau):
            break
    return margin


def two_pass_mean_variance(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two-pass population mean and variance along axis 0.

    Mean first, then averaged squared deviations from it. The independent
    check for the streaming sum-of-squares statistics.
    """
    v = np.asarray(values, dtype=np.float64)
    mean = v.mean(axis=0)
    var = ((v - mean) ** 2).mean(axis=0)
    return mean, var


def dense_reference_render(
    dynamics,
    window: ImageWindow,
    iteration: IterationParams,
    samples_per_pixel: int,
    seed: int,
    cmap: ColorMap | None = None,
    color_mode: str = "escape_time",
) -> np.ndarray:
    """Brute-force render: stratified uniform passes, no adaptivity or tuning.

    One uniform sample per pixel per pass, same iteration and coloring
    pipeline as the adaptive renderer, fixed threshold, no early stopping.
    Slow by design; used as the ground-truth image estimate.
    """
    if samples_per_pixel < 1:
        raise ConfigError(f"samples_per_pixel must be >= 1, got {samples_per_pixel}")
    g = dynamics
    nx, ny = window.resolution
    if cmap is None and color_mode == "escape_time":
        cmap = make_colormap(derive_seeds(seed, 1, count=1)[0], 256)
    rng = np.random.default_rng(seed)
    all_pixels = np.arange(window.pixel_count, dtype=np.int64)
    grid = AccumulatorGrid(ny, nx)
    for _ in range(samples_per_pixel):
        coords = sample_coords(window, all_pixels, rng.random((window.pixel_count, 2)))
        batch = iterate_batch(g, coords, iteration)
        if color_mode == "indicator":
            colors = indicator_colors(batch.escaped)
        else:
            colors = escape_colors(batch.escaped, batch.escape_iter, iteration.max_iters, cmap)
        grid.add_full_pass(colors.reshape(ny, nx, 3))
    return grid.mean_image()


def mandelbrot_window() -> ImageWindow:
    """The classic full-set view used throughout the verification suite."""
    return ImageWindow(center=-0.5 + 0j, width=3.0, height=3.0, resolution=(64, 64))


def oracle_render_config(tau: float = 2.0, max_iters: int = 64, seed: int = 0) -> RenderConfig:
    """Renderer settings for membership comparisons: fixed tau, two-class colors."""
    return RenderConfig(
        iteration=IterationParams(tau=tau, max_iters=max_iters),
        threshold=None,
        color_mode="indicator",
        seed=seed,
    )


__all__ = [
    "OracleDynamics",
    "mandelbrot_escape_count",
    "mandelbrot_bounded",
    "mandelbrot_orbit_margin",
    "two_pass_mean_variance",
    "dense_reference_render",
    "mandelbrot_window",
    "oracle_render_config",
]
