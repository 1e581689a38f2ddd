"""Dict and JSON round-tripping for the configuration dataclasses.

All documents are canonicalized (sorted keys, fixed separators) before
hashing or writing, so digests and on-disk files are stable across runs and
platforms. Parsers reject unknown keys; a typo in a config file is an error,
not a silently ignored setting.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any, Mapping

from .complexnet import NetworkConfig
from .dynamics import IterationParams
from .errors import ConfigError
from .render import ImageWindow, RenderConfig
from .threshold import ThresholdConfig


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def digest_of(doc: Any) -> str:
    """Hex sha256 of the canonical JSON form of a document."""
    return hashlib.sha256(canonical_json(doc).encode("utf-8")).hexdigest()


def _check_keys(d: Mapping, allowed: set[str], where: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


def network_to_dict(cfg: NetworkConfig) -> dict:
    return {
        "hidden_layers": cfg.hidden_layers,
        "neurons_per_layer": cfg.neurons_per_layer,
        "weight_std": cfg.weight_std,
        "use_bias": cfg.use_bias,
        "output_exponent": cfg.output_exponent,
        "seed": cfg.seed,
    }


def network_from_dict(d: Mapping) -> NetworkConfig:
    _check_keys(d, set(network_to_dict(NetworkConfig())), "network")
    return NetworkConfig(**d)


def window_to_dict(window: ImageWindow) -> dict:
    return {
        "center": [window.center.real, window.center.imag],
        "width": window.width,
        "height": window.height,
        "resolution": list(window.resolution),
    }


def window_from_dict(d: Mapping) -> ImageWindow:
    _check_keys(d, {"center", "width", "height", "resolution"}, "window")
    kwargs: dict = {}
    if "center" in d:
        re, im = d["center"]
        kwargs["center"] = complex(float(re), float(im))
    if "width" in d:
        kwargs["width"] = float(d["width"])
    if "height" in d:
        kwargs["height"] = float(d["height"])
    if "resolution" in d:
        res = d["resolution"]
        if isinstance(res, int):
            res = [res, res]
        kwargs["resolution"] = (int(res[0]), int(res[1]))
    return ImageWindow(**kwargs)


def render_to_dict(cfg: RenderConfig) -> dict:
    threshold = None
    if cfg.threshold is not None:
        threshold = {
            "tau_init": cfg.threshold.tau_init,
            "growth_factor": cfg.threshold.growth_factor,
            "above_ratio": cfg.threshold.above_ratio,
        }
    return {
        "tau": cfg.iteration.tau,
        "max_iters": cfg.iteration.max_iters,
        "threshold": threshold,
        "max_epochs": cfg.max_epochs,
        "initial_samples_per_pixel": cfg.initial_samples_per_pixel,
        "samples_per_epoch": cfg.samples_per_epoch,
        "stop_threshold": cfg.stop_threshold,
        "vm_stop": cfg.vm_stop,
        "colormap_size": cfg.colormap_size,
        "palette_style": cfg.palette_style,
        "color_mode": cfg.color_mode,
        "seed": cfg.seed,
        "palette_seed": cfg.palette_seed,
    }


def render_from_dict(d: Mapping) -> RenderConfig:
    _check_keys(d, set(render_to_dict(RenderConfig())), "render")
    defaults = RenderConfig()
    iteration = IterationParams(
        tau=float(d.get("tau", defaults.iteration.tau)),
        max_iters=int(d.get("max_iters", defaults.iteration.max_iters)),
    )
    if "threshold" in d:
        t = d["threshold"]
        if t is None:
            threshold = None
        else:
            _check_keys(t, {"tau_init", "growth_factor", "above_ratio"}, "render.threshold")
            threshold = ThresholdConfig(**t)
    else:
        threshold = defaults.threshold
    kwargs = {
        k: d[k]
        for k in (
            "max_epochs",
            "initial_samples_per_pixel",
            "samples_per_epoch",
            "stop_threshold",
            "vm_stop",
            "colormap_size",
            "palette_style",
            "color_mode",
            "seed",
            "palette_seed",
        )
        if k in d
    }
    return RenderConfig(iteration=iteration, threshold=threshold, **kwargs)
