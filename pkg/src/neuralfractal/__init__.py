"""Escape-time rendering and dataset generation for network-driven fractals.

The image of interest is the set of coordinates c whose orbit under
z <- g(z) + c stays bounded, where g is a small randomly initialized
complex-valued MLP. Rendering estimates each pixel by Monte Carlo sampling,
colors samples by escape count, tunes the escape threshold automatically,
and concentrates samples on high-variance pixels. The classic z^2 map is
available as a verification oracle.
"""

from .coloring import ColorMap, escape_color, escape_colors, indicator_colors, make_colormap
from .complexnet import ComplexMLP, NetworkConfig, init_network
from .dataset import (
    DatasetManifest,
    DatasetSpec,
    generate_dataset,
    is_featureless,
    save_image_png,
)
from .dynamics import BatchEscape, EscapeResult, IterationParams, indicator, iterate, iterate_batch
from .errors import (
    ConfigError,
    ExhaustedMapError,
    GenerationError,
    UndefinedStatisticsError,
)
from .oracle import (
    OracleDynamics,
    dense_reference_render,
    mandelbrot_bounded,
    mandelbrot_escape_count,
    mandelbrot_orbit_margin,
    two_pass_mean_variance,
)
from .render import (
    ImageWindow,
    PixelRegion,
    RenderConfig,
    RenderStats,
    pixel_centers,
    pixel_to_region,
    render_image,
    sample_coords,
)
from .runconfig import RunConfig, load_config
from .sampler import (
    AccumulatorGrid,
    PixelAccumulator,
    SamplingMap,
    accumulate,
    box_blur,
    compute_sampling_map,
    cv2_map,
    draw_samples,
    pixel_variance,
    save_grayscale_png,
    variance_of_mean,
)
from .seeds import derive_seeds
from .threshold import ThresholdConfig, adjust_threshold, sanitize_magnitudes
from .version import __version__

__all__ = [
    "__version__",
    "AccumulatorGrid",
    "BatchEscape",
    "ColorMap",
    "ComplexMLP",
    "ConfigError",
    "DatasetManifest",
    "DatasetSpec",
    "EscapeResult",
    "ExhaustedMapError",
    "GenerationError",
    "ImageWindow",
    "IterationParams",
    "NetworkConfig",
    "OracleDynamics",
    "PixelAccumulator",
    "PixelRegion",
    "RenderConfig",
    "RenderStats",
    "RunConfig",
    "SamplingMap",
    "ThresholdConfig",
    "UndefinedStatisticsError",
    "accumulate",
    "adjust_threshold",
    "box_blur",
    "compute_sampling_map",
    "cv2_map",
    "dense_reference_render",
    "derive_seeds",
    "draw_samples",
    "escape_color",
    "escape_colors",
    "generate_dataset",
    "indicator",
    "indicator_colors",
    "init_network",
    "is_featureless",
    "iterate",
    "iterate_batch",
    "load_config",
    "make_colormap",
    "mandelbrot_bounded",
    "mandelbrot_escape_count",
    "mandelbrot_orbit_margin",
    "pixel_centers",
    "pixel_to_region",
    "pixel_variance",
    "render_image",
    "sample_coords",
    "sanitize_magnitudes",
    "save_grayscale_png",
    "save_image_png",
    "two_pass_mean_variance",
    "variance_of_mean",
]
