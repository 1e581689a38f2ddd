import numpy as np
import pytest

from neuralfractal import (
    ComplexMLP,
    ConfigError,
    ImageWindow,
    IterationParams,
    NetworkConfig,
    OracleDynamics,
    RenderConfig,
    ThresholdConfig,
    dense_reference_render,
    init_network,
    make_colormap,
    pixel_centers,
    pixel_to_region,
    render_image,
    sample_coords,
)
from neuralfractal.oracle import mandelbrot_window


def test_window_validation():
    with pytest.raises(ConfigError):
        ImageWindow(width=0.0)
    with pytest.raises(ConfigError):
        ImageWindow(resolution=(0, 4))


def test_single_pixel_covers_whole_window():
    win = ImageWindow(center=1 + 2j, width=3.0, height=5.0, resolution=(1, 1))
    r = pixel_to_region(win, (0, 0))
    assert (r.re_min, r.re_max) == (-0.5, 2.5)
    assert (r.im_min, r.im_max) == (-0.5, 4.5)


def test_two_by_two_top_left_quadrant():
    win = ImageWindow(center=0j, width=2.0, height=2.0, resolution=(2, 2))
    r = pixel_to_region(win, (0, 0))
    assert (r.re_min, r.re_max) == (-1.0, 0.0)
    assert (r.im_min, r.im_max) == (0.0, 1.0)


def test_adjacent_pixels_share_edges():
    win = ImageWindow(center=-0.5 + 0.25j, width=3.0, height=2.0, resolution=(8, 4))
    for px in range(7):
        a = pixel_to_region(win, (px, 1))
        b = pixel_to_region(win, (px + 1, 1))
        assert a.re_max == b.re_min
    for py in range(3):
        a = pixel_to_region(win, (2, py))
        b = pixel_to_region(win, (2, py + 1))
        assert a.im_min == b.im_max


def test_regions_tile_window():
    win = ImageWindow(center=0.3 - 0.1j, width=1.5, height=2.5, resolution=(5, 3))
    area = sum(
        (pixel_to_region(win, (x, y)).re_max - pixel_to_region(win, (x, y)).re_min)
        * (pixel_to_region(win, (x, y)).im_max - pixel_to_region(win, (x, y)).im_min)
        for x in range(5)
        for y in range(3)
    )
    assert area == pytest.approx(1.5 * 2.5, rel=1e-12)


def test_out_of_range_pixel_rejected():
    win = ImageWindow(resolution=(4, 4))
    with pytest.raises(ConfigError):
        pixel_to_region(win, (4, 0))


def test_sample_coords_land_in_their_pixel():
    win = ImageWindow(center=-0.5 + 0.25j, width=3.0, height=2.0, resolution=(8, 4))
    rng = np.random.default_rng(0)
    idx = rng.integers(0, 32, size=100)
    offs = rng.random((100, 2))
    coords = sample_coords(win, idx, offs)
    for k in range(100):
        px, py = int(idx[k]) % 8, int(idx[k]) // 8
        r = pixel_to_region(win, (px, py))
        assert r.re_min <= coords[k].real <= r.re_max
        assert r.im_min <= coords[k].imag <= r.im_max


def test_pixel_centers_match_regions():
    win = ImageWindow(resolution=(3, 2), width=3.0, height=2.0)
    centers = pixel_centers(win)
    r = pixel_to_region(win, (1, 0))
    c = centers[0 * 3 + 1]
    assert c.real == pytest.approx((r.re_min + r.re_max) / 2, rel=1e-15)
    assert c.imag == pytest.approx((r.im_min + r.im_max) / 2, rel=1e-15)


def test_render_config_validation():
    with pytest.raises(ConfigError):
        RenderConfig(max_epochs=0)
    with pytest.raises(ConfigError):
        RenderConfig(color_mode="grayscale")
    with pytest.raises(ConfigError):
        RenderConfig(samples_per_epoch=0)


def _zero_network():
    h = 3
    return ComplexMLP(
        weights=(np.zeros((1, h), np.complex128), np.zeros((h, 1), np.complex128)),
        biases=None,
        output_exponent=3,
    )


def test_zero_network_renders_flat_and_exhausts():
    # orbits are fixed at c; instant escapes take the deepest palette entry,
    # same as bounded points, so the image is one solid color
    img, stats = render_image(
        _zero_network(),
        ImageWindow(resolution=(16, 16)),
        RenderConfig(seed=5, max_epochs=10),
    )
    assert np.all(img == img[0, 0])
    assert stats.exhausted
    assert stats.epochs_run == 0
    assert np.all(stats.per_pixel_counts == stats.initial_passes)


def test_render_is_deterministic():
    win = mandelbrot_window()
    cfg = RenderConfig(
        iteration=IterationParams(tau=2.0, max_iters=32),
        threshold=None,
        max_epochs=5,
        seed=11,
    )
    dyn = OracleDynamics.mandelbrot()
    img_a, stats_a = render_image(dyn, win, cfg)
    img_b, stats_b = render_image(dyn, win, cfg)
    assert np.array_equal(img_a, img_b)
    assert np.array_equal(stats_a.per_pixel_counts, stats_b.per_pixel_counts)
    assert stats_a.final_tau == stats_b.final_tau


def test_network_render_is_deterministic():
    net = init_network(NetworkConfig(seed=31))
    win = ImageWindow(resolution=(24, 24))
    cfg = RenderConfig(seed=31, max_epochs=6)
    img_a, _ = render_image(net, win, cfg)
    img_b, _ = render_image(net, win, cfg)
    assert np.array_equal(img_a, img_b)


def test_channel_bounds_and_sample_conservation():
    net = init_network(NetworkConfig(seed=8))
    win = ImageWindow(resolution=(20, 20))
    cfg = RenderConfig(seed=8, max_epochs=7, samples_per_epoch=123)
    img, stats = render_image(net, win, cfg)
    assert img.min() >= 0.0 and img.max() <= 1.0
    expected = cfg.initial_samples_per_pixel * win.pixel_count + stats.epochs_run * 123
    assert stats.per_pixel_counts.sum() == expected == stats.total_samples
    assert stats.probe_samples == win.pixel_count  # tuning probe is extra, tracked apart


def test_fixed_tau_skips_probe_and_reports_it():
    win = ImageWindow(resolution=(8, 8))
    cfg = RenderConfig(
        iteration=IterationParams(tau=2.0, max_iters=16), threshold=None, max_epochs=2, seed=1
    )
    _, stats = render_image(OracleDynamics.mandelbrot(), win, cfg)
    assert stats.probe_samples == 0
    assert stats.final_tau == 2.0


def test_auto_tau_grows_from_init():
    net = init_network(NetworkConfig(seed=77))
    win = ImageWindow(resolution=(16, 16))
    cfg = RenderConfig(seed=77, threshold=ThresholdConfig(tau_init=0.5), max_epochs=2)
    _, stats = render_image(net, win, cfg)
    assert stats.final_tau >= 0.5


def test_mandelbrot_matches_dense_reference():
    # two-class rendering of the classic set vs a 256-samples-per-pixel
    # uniform reference; mean absolute error within Monte Carlo slack
    win = mandelbrot_window()
    iteration = IterationParams(tau=2.0, max_iters=64)
    dyn = OracleDynamics.mandelbrot()
    cfg = RenderConfig(
        iteration=iteration,
        threshold=None,
        color_mode="indicator",
        initial_samples_per_pixel=8,
        max_epochs=56,
        seed=100,
    )
    adaptive, stats = render_image(dyn, win, cfg)
    reference = dense_reference_render(dyn, win, iteration, 256, seed=999, color_mode="indicator")
    mae = np.abs(adaptive[..., 0] - reference[..., 0]).mean()
    assert mae <= 0.02


def test_dense_reference_single_pass_equals_render_without_adaptivity():
    win = ImageWindow(center=-0.5 + 0j, width=3.0, height=3.0, resolution=(32, 32))
    iteration = IterationParams(tau=2.0, max_iters=24)
    dyn = OracleDynamics.mandelbrot()
    cmap = make_colormap(55, 64)
    cfg = RenderConfig(
        iteration=iteration,
        threshold=None,
        initial_samples_per_pixel=1,
        max_epochs=1,
        stop_threshold=1e30,  # everything below: adaptivity disabled
        colormap_size=64,
        palette_seed=55,
        seed=123,
    )
    img, stats = render_image(dyn, win, cfg)
    ref = dense_reference_render(dyn, win, iteration, 1, seed=123, cmap=cmap)
    assert stats.epochs_run == 0
    assert np.array_equal(img, np.clip(ref, 0.0, 1.0))
