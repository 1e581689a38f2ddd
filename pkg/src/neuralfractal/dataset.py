"""Batch generation of fractal image datasets.

Every slot in the dataset re-draws a fresh random network, renders it, and
keeps the image only if it clears the featureless filter (a minimum on the
largest per-channel standard deviation). Rejected renders retry with the
next derived seed. All seeds are pure functions of (base seed, slot, retry),
so slots can be rendered in any order by any number of workers and still
produce byte-identical files.
"""

from __future__ import annotations

import json
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from PIL import Image

from .complexnet import NetworkConfig, init_network
from .errors import ConfigError, GenerationError
from .render import ImageWindow, RenderConfig, render_image
from .seeds import derive_seeds
from .serialize import digest_of, network_to_dict, render_to_dict, window_to_dict
from .version import __version__


def to_uint8(image: np.ndarray) -> np.ndarray:
    """Quantize a float image in [0, 1] to 8-bit channels (round, then clip)."""
    return np.rint(255.0 * np.clip(image, 0.0, 1.0)).astype(np.uint8)


def save_image_png(image: np.ndarray, path) -> None:
    """Write an (H, W, 3) float image as an 8-bit RGB PNG without alpha."""
    Image.fromarray(to_uint8(image), mode="RGB").save(path, format="PNG")


def write_json(doc, path) -> None:
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def is_featureless(image: np.ndarray, std_min: float) -> bool:
    """True when every channel's population std over all pixels is below std_min.

    Computed on the floating-point image before 8-bit quantization, so the
    cutoff is not aliased by the pixel value grid.
    """
    stds = np.asarray(image, dtype=np.float64).reshape(-1, 3).std(axis=0)
    return bool(stds.max() < std_min)


@dataclass(frozen=True)
class DatasetSpec:
    """Contract for one batch-generation run.

    ``resolution`` overrides the window's resolution; per-slot seeds
    override the seeds inside ``network`` and ``render``. Files land in
    ``output_dir`` as img_NNNNNN.png plus a JSON sidecar each, with a
    manifest.json covering the whole run.
    """

    count: int
    output_dir: Path
    resolution: tuple[int, int] = (256, 256)
    base_seed: int = 0
    filter_std_min: float = 0.025
    max_retries_per_slot: int = 20
    network: NetworkConfig = NetworkConfig()
    render: RenderConfig = RenderConfig()
    window: ImageWindow = ImageWindow()

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ConfigError(f"count must be >= 1, got {self.count}")
        if self.filter_std_min < 0:
            raise ConfigError(f"filter_std_min must be >= 0, got {self.filter_std_min}")
        if self.max_retries_per_slot < 1:
            raise ConfigError(
                f"max_retries_per_slot must be >= 1, got {self.max_retries_per_slot}"
            )
        object.__setattr__(self, "output_dir", Path(self.output_dir))

    def render_window(self) -> ImageWindow:
        return replace(self.window, resolution=tuple(self.resolution))


def spec_to_dict(spec: DatasetSpec) -> dict:
    return {
        "count": spec.count,
        "resolution": list(spec.resolution),
        "base_seed": spec.base_seed,
        "filter_std_min": spec.filter_std_min,
        "max_retries_per_slot": spec.max_retries_per_slot,
        "network": network_to_dict(spec.network),
        "render": render_to_dict(spec.render),
        "window": window_to_dict(spec.window),
    }


def spec_digest(spec: DatasetSpec) -> str:
    """Digest of everything that affects pixel content (output location excluded)."""
    return digest_of(spec_to_dict(spec))


@dataclass
class DatasetManifest:
    """Summary of a completed generation run, also written as manifest.json."""

    path: Path
    images: list[dict]
    rejections: list[dict]
    spec_digest: str
    tool_version: str

    @property
    def total_renders(self) -> int:
        return len(self.images) + len(self.rejections)


def _slot_configs(spec: DatasetSpec, slot: int, retry: int):
    network_seed, palette_seed, sampling_seed = derive_seeds(
        spec.base_seed, slot, retry, count=3
    )
    network = replace(spec.network, seed=network_seed)
    render = replace(spec.render, seed=sampling_seed, palette_seed=palette_seed)
    return network, render, (network_seed, palette_seed, sampling_seed)


def render_slot(spec: DatasetSpec, slot: int) -> tuple[dict, list[dict]]:
    """Render one slot to disk, retrying past featureless images.

    Returns the accepted-image record and the rejection records. Raises
    GenerationError when the retry budget runs out.
    """
    window = spec.render_window()
    digest = spec_digest(spec)
    rejections: list[dict] = []
    for retry in range(spec.max_retries_per_slot):
        network_cfg, render_cfg, seeds = _slot_configs(spec, slot, retry)
        net = init_network(network_cfg)
        image, stats = render_image(net, window, render_cfg)
        if is_featureless(image, spec.filter_std_min):
            rejections.append(
                {
                    "slot": slot,
                    "retry_index": retry,
                    "network_seed": seeds[0],
                    "reason": "featureless",
                    "max_channel_std": float(
                        image.reshape(-1, 3).std(axis=0).max()
                    ),
                }
            )
            continue
        stem = f"img_{slot:06d}"
        png_path = spec.output_dir / f"{stem}.png"
        sidecar_path = spec.output_dir / f"{stem}.json"
        save_image_png(image, png_path)
        sidecar = {
            "slot": slot,
            "retry_index": retry,
            "network_seed": seeds[0],
            "palette_seed": seeds[1],
            "sampling_seed": seeds[2],
            "final_tau": stats.final_tau,
            "total_samples": stats.total_samples,
            "resolution": list(window.resolution),
            "window": window_to_dict(window),
            "config_digest": digest,
            "config": {
                "network": network_to_dict(network_cfg),
                "render": render_to_dict(render_cfg),
            },
        }
        write_json(sidecar, sidecar_path)
        record = {
            "slot": slot,
            "file": png_path.name,
            "sidecar": sidecar_path.name,
            "retry_index": retry,
            "network_seed": seeds[0],
            "palette_seed": seeds[1],
            "final_tau": stats.final_tau,
            "total_samples": stats.total_samples,
        }
        return record, rejections
    raise GenerationError(
        f"slot {slot}: no render passed the featureless filter in "
        f"{spec.max_retries_per_slot} attempts"
    )


def generate_dataset(spec: DatasetSpec, workers: int = 1) -> DatasetManifest:
    """Produce exactly ``spec.count`` accepted images plus sidecars and a manifest.

    ``workers`` sets the process pool size; results are identical for any
    value because every slot's randomness derives from (base_seed, slot,
    retry) alone.
    """
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    spec.output_dir.mkdir(parents=True, exist_ok=True)
    slots = range(spec.count)
    if workers == 1:
        results = [render_slot(spec, slot) for slot in slots]
    else:
        # spawn, not fork: forking after the JIT threading layer is live is
        # unsafe, and fresh interpreters cost little thanks to kernel caching
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            results = list(pool.map(render_slot, [spec] * spec.count, slots))
    images = [record for record, _ in results]
    rejections = [rej for _, rejs in results for rej in rejs]
    manifest = DatasetManifest(
        path=spec.output_dir / "manifest.json",
        images=sorted(images, key=lambda r: r["slot"]),
        rejections=sorted(rejections, key=lambda r: (r["slot"], r["retry_index"])),
        spec_digest=spec_digest(spec),
        tool_version=__version__,
    )
    write_json(
        {
            "tool_version": manifest.tool_version,
            "spec_digest": manifest.spec_digest,
            "spec": spec_to_dict(spec),
            "images": manifest.images,
            "rejections": manifest.rejections,
            "totals": {
                "renders": manifest.total_renders,
                "accepted": len(manifest.images),
                "rejected": len(manifest.rejections),
            },
        },
        manifest.path,
    )
    return manifest
