"""Command-line interface.

Subcommands: ``render`` (one image plus metadata sidecar), ``dataset``
(batch generation with a manifest), ``diag`` (image plus variance and
sample-count maps). Flags override config-file values, which override
defaults. Stats go to stdout as a single JSON line; logs go to stderr.

Exit codes: 0 success, 1 argument or configuration error, 2 I/O error,
3 generation (retry exhaustion) error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .complexnet import init_network
from .dataset import generate_dataset, save_image_png, write_json
from .dynamics import IterationParams
from .errors import ConfigError, GenerationError
from .oracle import OracleDynamics
from .render import render_image
from .runconfig import RunConfig, load_config
from .sampler import save_grayscale_png
from .serialize import digest_of, network_to_dict, render_to_dict, window_to_dict
from .threshold import ThresholdConfig
from .version import __version__

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_GENERATION = 3


def log(message: str) -> None:
    print(message, file=sys.stderr)


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad arguments; route through ConfigError
    # instead so argument problems land on exit code 1 like other config errors.
    def error(self, message):
        raise ConfigError(message)


def _add_common_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="YAML/JSON run configuration file")
    p.add_argument("--seed", type=int, help="master seed; all randomness derives from it")
    p.add_argument("--oracle", choices=["mandelbrot", "zero"],
                   help="replace the random network with a reference dynamics")
    p.add_argument("--tau", type=float,
                   help="fixed escape threshold (disables automatic tuning)")
    p.add_argument("--max-iters", type=int, help="iteration budget per sample")
    p.add_argument("--epochs", type=int, help="maximum adaptive passes")
    p.add_argument("--initial-spp", type=int, help="uniform warmup samples per pixel")
    p.add_argument("--samples-per-epoch", type=int, help="samples drawn per adaptive pass")
    p.add_argument("--stop-threshold", type=float,
                   help="zero out pixels whose smoothed relative variance is below this")
    p.add_argument("--vm-stop", type=float,
                   help="stop sampling pixels whose variance of the mean drops to this")
    p.add_argument("--palette-size", type=int, help="number of palette entries")
    p.add_argument("--palette-style", choices=["uniform", "smooth"])
    p.add_argument("--color-mode", choices=["escape_time", "indicator"])
    p.add_argument("--center", type=float, nargs=2, metavar=("RE", "IM"),
                   help="window center in the complex plane")
    p.add_argument("--width", type=float, help="window extent along the real axis")
    p.add_argument("--height", type=float, help="window extent along the imaginary axis")
    p.add_argument("--resolution", type=int, nargs="+", metavar="N",
                   help="pixels per axis (one value for square output)")
    p.add_argument("--hidden-layers", type=int)
    p.add_argument("--neurons", type=int, help="neurons per hidden layer")
    p.add_argument("--weight-std", type=float)
    p.add_argument("--no-bias", action="store_true", help="disable network biases")
    p.add_argument("--output-exponent", type=int)


def build_parser() -> _Parser:
    parser = _Parser(prog="neural-fractal", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    render_p = sub.add_parser("render", help="render one image")
    _add_common_options(render_p)
    render_p.add_argument("--out", type=Path, required=True, help="output PNG path")

    dataset_p = sub.add_parser("dataset", help="generate a batch of images")
    _add_common_options(dataset_p)
    dataset_p.add_argument("--out", type=Path, help="output directory")
    dataset_p.add_argument("--count", type=int, help="number of accepted images to produce")
    dataset_p.add_argument("--filter-std-min", type=float,
                           help="featureless filter threshold on max channel std")
    dataset_p.add_argument("--max-retries", type=int, help="seed retries per slot")
    dataset_p.add_argument("--workers", type=int, default=1,
                           help="process pool size; never changes outputs")

    diag_p = sub.add_parser("diag", help="render plus variance and sample-count maps")
    _add_common_options(diag_p)
    diag_p.add_argument("--out", type=Path, required=True, help="output directory")

    return parser


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)

    render = cfg.render
    iteration = render.iteration
    if args.max_iters is not None:
        iteration = IterationParams(tau=iteration.tau, max_iters=args.max_iters)
    if args.tau is not None:
        iteration = IterationParams(tau=args.tau, max_iters=iteration.max_iters)
        render = replace(render, threshold=None)
    render = replace(render, iteration=iteration)
    if args.epochs is not None:
        render = replace(render, max_epochs=args.epochs)
    if args.initial_spp is not None:
        render = replace(render, initial_samples_per_pixel=args.initial_spp)
    if args.samples_per_epoch is not None:
        render = replace(render, samples_per_epoch=args.samples_per_epoch)
    if args.stop_threshold is not None:
        render = replace(render, stop_threshold=args.stop_threshold)
    if args.vm_stop is not None:
        render = replace(render, vm_stop=args.vm_stop)
    if args.palette_size is not None:
        render = replace(render, colormap_size=args.palette_size)
    if args.palette_style is not None:
        render = replace(render, palette_style=args.palette_style)
    if args.color_mode is not None:
        render = replace(render, color_mode=args.color_mode)

    window = cfg.window
    if args.center is not None:
        window = replace(window, center=complex(args.center[0], args.center[1]))
    if args.width is not None:
        window = replace(window, width=args.width)
    if args.height is not None:
        window = replace(window, height=args.height)
    if args.resolution is not None:
        res = args.resolution
        if len(res) == 1:
            res = [res[0], res[0]]
        elif len(res) > 2:
            raise ConfigError("--resolution takes one or two values")
        window = replace(window, resolution=(res[0], res[1]))

    network = cfg.network
    if args.hidden_layers is not None:
        network = replace(network, hidden_layers=args.hidden_layers)
    if args.neurons is not None:
        network = replace(network, neurons_per_layer=args.neurons)
    if args.weight_std is not None:
        network = replace(network, weight_std=args.weight_std)
    if args.no_bias:
        network = replace(network, use_bias=False)
    if args.output_exponent is not None:
        network = replace(network, output_exponent=args.output_exponent)

    return replace(cfg, render=render, window=window, network=network)


def _load_run_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    return _apply_overrides(cfg, args)


def _resolve_dynamics(cfg: RunConfig, args):
    """Returns (dynamics, network_config_or_None, render_config)."""
    network_cfg, render_cfg = cfg.resolve_single_render()
    if args.oracle:
        kind = "mandelbrot_square" if args.oracle == "mandelbrot" else "zero"
        return OracleDynamics(kind=kind), None, render_cfg
    return init_network(network_cfg), network_cfg, render_cfg


def _run_digest(network_cfg, render_cfg, window) -> str:
    return digest_of(
        {
            "network": network_to_dict(network_cfg) if network_cfg else None,
            "render": render_to_dict(render_cfg),
            "window": window_to_dict(window),
        }
    )


def cmd_render(args) -> int:
    cfg = _load_run_config(args)
    dynamics, network_cfg, render_cfg = _resolve_dynamics(cfg, args)
    image, stats = render_image(dynamics, cfg.window, render_cfg)
    save_image_png(image, args.out)
    sidecar = {
        "network_seed": network_cfg.seed if network_cfg else None,
        "oracle": args.oracle,
        "palette_seed": render_cfg.resolved_palette_seed(),
        "sampling_seed": render_cfg.seed,
        "final_tau": stats.final_tau,
        "total_samples": stats.total_samples,
        "resolution": list(cfg.window.resolution),
        "window": window_to_dict(cfg.window),
        "config_digest": _run_digest(network_cfg, render_cfg, cfg.window),
        "config": {
            "network": network_to_dict(network_cfg) if network_cfg else None,
            "render": render_to_dict(render_cfg),
        },
    }
    write_json(sidecar, Path(args.out).with_suffix(".json"))
    print(json.dumps({**stats.summary(), "out": str(args.out)}))
    return EXIT_OK


def cmd_dataset(args) -> int:
    cfg = _load_run_config(args)
    if args.oracle:
        raise ConfigError("dataset generation draws a fresh network per image; --oracle not supported")
    if args.filter_std_min is not None:
        cfg = replace(cfg, dataset=replace(cfg.dataset, filter_std_min=args.filter_std_min))
    if args.max_retries is not None:
        cfg = replace(cfg, dataset=replace(cfg.dataset, max_retries_per_slot=args.max_retries))
    if args.resolution is not None:
        res = args.resolution if len(args.resolution) == 2 else [args.resolution[0]] * 2
        cfg = replace(cfg, dataset=replace(cfg.dataset, resolution=(res[0], res[1])))
    spec = cfg.to_dataset_spec(output_dir=args.out, count=args.count)
    log(f"generating {spec.count} images at {spec.resolution} into {spec.output_dir}")
    manifest = generate_dataset(spec, workers=args.workers)
    print(
        json.dumps(
            {
                "manifest": str(manifest.path),
                "accepted": len(manifest.images),
                "rejected": len(manifest.rejections),
            }
        )
    )
    return EXIT_OK


def cmd_diag(args) -> int:
    cfg = _load_run_config(args)
    dynamics, network_cfg, render_cfg = _resolve_dynamics(cfg, args)
    image, stats = render_image(dynamics, cfg.window, render_cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_image_png(image, out / "image.png")
    save_grayscale_png(stats.cv2_map, out / "cv2_map.png")
    save_grayscale_png(stats.per_pixel_counts.astype(np.float64), out / "sample_counts.png")
    np.save(out / "cv2_map.npy", stats.cv2_map)
    np.save(out / "sample_counts.npy", stats.per_pixel_counts)
    write_json(
        {
            "network_seed": network_cfg.seed if network_cfg else None,
            "oracle": args.oracle,
            "final_tau": stats.final_tau,
            "total_samples": stats.total_samples,
            "epochs_run": stats.epochs_run,
            "exhausted": stats.exhausted,
        },
        out / "diag.json",
    )
    print(json.dumps({**stats.summary(), "out": str(out)}))
    return EXIT_OK


COMMANDS = {"render": cmd_render, "dataset": cmd_dataset, "diag": cmd_diag}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        log(f"error: {exc}")
        return EXIT_CONFIG
    except OSError as exc:
        log(f"I/O error: {exc}")
        return EXIT_IO
    except GenerationError as exc:
        log(f"generation error: {exc}")
        return EXIT_GENERATION


if __name__ == "__main__":
    sys.exit(main())
