"""Tests for the raster type and the pixel-level primitives."""

import math

import numpy as np
import PIL.Image
import pytest

from salfuse import (
    Image,
    ImageTooSmallError,
    InvalidInputError,
    InvalidParameterError,
    Kernel1D,
    box_mean,
    convolve_separable,
    downsample_half,
    load_image,
    make_gaussian_kernel,
    save_image,
    to_gray,
    upsample_to,
)

from oracles import box_mean_naive, convolve2d_replicate, gaussian_kernel_2d, gaussian_taps


def _rand(h, w, seed, channels=1):
    rng = np.random.default_rng(seed)
    shape = (h, w) if channels == 1 else (h, w, channels)
    return Image(rng.random(shape))


# ---------------------------------------------------------------- Image type


def test_image_casts_to_contiguous_float64():
    img = Image(np.array([[0, 1], [1, 0]], dtype=np.int32))
    assert img.data.dtype == np.float64
    assert img.data.flags.c_contiguous


def test_image_shape_properties():
    img = _rand(5, 7, 0, channels=3)
    assert (img.height, img.width, img.channels) == (5, 7, 3)
    assert len(list(img.planes())) == 3
    assert list(_rand(4, 4, 0).planes())[0].shape == (4, 4)


@pytest.mark.parametrize(
    "bad",
    [
        np.zeros(5),                # 1-D
        np.zeros((3, 3, 3, 3)),     # 4-D
        np.zeros((4, 4, 2)),        # 2 channels
        np.zeros((0, 5)),           # empty axis
    ],
)
def test_image_rejects_bad_shapes(bad):
    with pytest.raises(InvalidInputError):
        Image(bad)


def test_same_shape_as():
    assert _rand(4, 6, 0).same_shape_as(_rand(4, 6, 1))
    assert not _rand(4, 6, 0).same_shape_as(_rand(6, 4, 1))
    assert not _rand(4, 6, 0).same_shape_as(_rand(4, 6, 1, channels=3))


# ------------------------------------------------------------------- kernels


@pytest.mark.parametrize("sigma", [0.5, 1.0, 1.5, 2.4])
def test_gaussian_kernel_radius_and_shape(sigma):
    """Radius is ceil(3*sigma); taps are normalized samples of exp(-x^2/2s^2)."""
    k = make_gaussian_kernel(sigma)
    assert k.radius == math.ceil(3.0 * sigma)
    assert k.weights.size == 2 * k.radius + 1
    assert abs(k.weights.sum() - 1.0) < 1e-12
    c = k.radius
    ratio = k.weights[c + 1] / k.weights[c]
    assert np.isclose(ratio, math.exp(-1.0 / (2.0 * sigma * sigma)), rtol=1e-12)
    np.testing.assert_allclose(k.weights, gaussian_taps(sigma), rtol=1e-12)


def test_gaussian_kernel_tiny_sigma_is_near_delta():
    k = make_gaussian_kernel(0.1)
    assert k.radius == 1
    assert k.weights[1] > 1.0 - 1e-10


@pytest.mark.parametrize("sigma", [0.0, -1.0, float("nan"), float("inf"), "1"])
def test_gaussian_kernel_rejects_bad_sigma(sigma):
    with pytest.raises(InvalidParameterError):
        make_gaussian_kernel(sigma)


def test_kernel1d_validation():
    with pytest.raises(InvalidParameterError):
        Kernel1D(1, np.array([0.5, 0.5]))  # wrong length
    with pytest.raises(InvalidParameterError):
        Kernel1D(1, np.array([0.3, 0.3, 0.3]))  # does not sum to 1
    with pytest.raises(InvalidParameterError):
        Kernel1D(1, np.array([0.2, 0.5, 0.3]))  # asymmetric


# --------------------------------------------------------------- convolution


def test_convolve_preserves_constants():
    img = Image(np.full((10, 12), 0.37))
    out = convolve_separable(img, make_gaussian_kernel(1.3))
    np.testing.assert_allclose(out.data, 0.37, atol=1e-12)


def test_convolve_impulse_gives_outer_product():
    """An interior impulse must stamp exactly the separable kernel."""
    k = make_gaussian_kernel(0.9)
    r = k.radius
    data = np.zeros((15, 15))
    data[7, 7] = 1.0
    out = convolve_separable(Image(data), k).data
    np.testing.assert_allclose(
        out[7 - r : 7 + r + 1, 7 - r : 7 + r + 1], np.outer(k.weights, k.weights), atol=1e-15
    )
    assert out[0, :].max() < 1e-15  # far from the support


def test_convolve_matches_full_2d_oracle_with_heavy_clamping():
    """Kernel radius larger than the image: borders replicate everywhere."""
    img = _rand(5, 5, 11)
    out = convolve_separable(img, make_gaussian_kernel(1.2))
    ref = convolve2d_replicate(img.data, gaussian_kernel_2d(1.2))
    np.testing.assert_allclose(out.data, ref, atol=1e-9)


def test_convolve_matches_oracle_on_interior_and_borders():
    img = _rand(13, 9, 12)
    out = convolve_separable(img, make_gaussian_kernel(0.8))
    ref = convolve2d_replicate(img.data, gaussian_kernel_2d(0.8))
    np.testing.assert_allclose(out.data, ref, atol=1e-9)


def test_convolve_color_filters_each_plane():
    img = _rand(6, 7, 13, channels=3)
    k = make_gaussian_kernel(1.0)
    out = convolve_separable(img, k)
    for c in range(3):
        single = convolve_separable(Image(img.data[:, :, c]), k)
        np.testing.assert_array_equal(out.data[:, :, c], single.data)


# ---------------------------------------------------------------- resampling


def test_downsample_takes_every_second_pixel():
    img = _rand(8, 6, 21)
    out = downsample_half(img)
    np.testing.assert_array_equal(out.data, img.data[::2, ::2])


def test_downsample_rounds_odd_sizes_up():
    assert downsample_half(_rand(5, 5, 0)).data.shape == (3, 3)
    assert downsample_half(_rand(5, 5, 0, channels=3)).data.shape == (3, 3, 3)


def test_downsample_checkerboard_keeps_one_color():
    board = np.indices((6, 6)).sum(axis=0) % 2
    out = downsample_half(Image(1.0 - board.astype(np.float64)))
    np.testing.assert_array_equal(out.data, np.ones((3, 3)))


def test_downsample_too_small():
    with pytest.raises(ImageTooSmallError):
        downsample_half(Image(np.zeros((1, 5))))


def test_upsample_preserves_constants():
    out = upsample_to(Image(np.full((3, 4), 0.25)), 9, 7)
    np.testing.assert_allclose(out.data, 0.25, atol=1e-12)


def test_upsample_2x2_center_is_exact_corner_average():
    img = Image(np.array([[0.25, 0.5], [0.75, 0.25]]))
    out = upsample_to(img, 3, 3)
    assert out.data[1, 1] == 0.4375
    np.testing.assert_array_equal(out.data[::2, ::2], img.data)


def test_upsample_reproduces_source_grid_exactly():
    """Doubling minus one lands every source sample on a target pixel."""
    img = _rand(5, 7, 22)
    out = upsample_to(img, 13, 9)
    np.testing.assert_array_equal(out.data[::2, ::2], img.data)


def test_upsample_is_linear_on_ramps():
    ramp = Image(np.tile(np.arange(5) / 4.0, (3, 1)))
    out = upsample_to(ramp, 9, 3)
    np.testing.assert_allclose(out.data, np.tile(np.arange(9) / 8.0, (3, 1)), atol=1e-12)


def test_upsample_rejects_shrinking():
    with pytest.raises(InvalidParameterError):
        upsample_to(_rand(6, 6, 0), 5, 8)


# ------------------------------------------------------------ gray & box mean


def test_to_gray_luma_weights():
    white = Image(np.ones((3, 3, 3)))
    red = Image(np.zeros((3, 3, 3)))
    red.data[:, :, 0] = 1.0
    np.testing.assert_allclose(to_gray(white).data, 1.0, atol=1e-12)
    np.testing.assert_allclose(to_gray(red).data, 0.299, atol=1e-12)


def test_to_gray_is_identity_for_single_plane():
    img = _rand(4, 4, 3)
    assert to_gray(img) is img


def test_box_mean_radius_zero_is_identity():
    img = _rand(5, 5, 4)
    assert box_mean(img, 0) is img


def test_box_mean_constant():
    out = box_mean(Image(np.full((9, 9), 0.6)), 2)
    np.testing.assert_allclose(out.data, 0.6, atol=1e-12)


@pytest.mark.parametrize("shape,radius", [((7, 7), 2), ((6, 5), 1), ((5, 9), 4)])
def test_box_mean_matches_naive_window_means(shape, radius):
    img = _rand(*shape, 30 + radius)
    out = box_mean(img, radius)
    np.testing.assert_allclose(out.data, box_mean_naive(img.data, radius), atol=1e-12)


def test_box_mean_huge_radius_is_global_mean():
    img = _rand(5, 6, 31)
    out = box_mean(img, 10)
    np.testing.assert_allclose(out.data, img.data.mean(), atol=1e-12)


def test_box_mean_stays_within_data_range():
    img = _rand(16, 14, 32)
    out = box_mean(img, 3).data
    assert out.min() >= img.data.min() - 1e-12
    assert out.max() <= img.data.max() + 1e-12


def test_box_mean_rejects_negative_radius():
    with pytest.raises(InvalidParameterError):
        box_mean(_rand(4, 4, 0), -1)


# ----------------------------------------------------------------------- I/O


def test_save_load_roundtrip_within_quantization(tmp_path):
    img = _rand(9, 11, 40, channels=3)
    p = tmp_path / "round.png"
    save_image(img, p)
    back = load_image(p)
    assert back.data.shape == img.data.shape
    assert np.abs(back.data - img.data).max() <= 0.5 / 255.0 + 1e-12


def test_save_load_grayscale(tmp_path):
    img = _rand(8, 8, 41)
    p = tmp_path / "gray.png"
    save_image(img, p)
    back = load_image(p)
    assert back.channels == 1
    assert np.abs(back.data - img.data).max() <= 0.5 / 255.0 + 1e-12


def test_load_16bit_png_scales_by_65535(tmp_path):
    arr = (np.arange(64, dtype=np.uint16).reshape(8, 8) * 1000)
    p = tmp_path / "deep.png"
    PIL.Image.fromarray(arr, mode="I;16").save(p)
    img = load_image(p)
    np.testing.assert_allclose(img.data, arr / 65535.0, atol=1e-12)


def test_load_rejects_unknown_suffix(tmp_path):
    with pytest.raises(InvalidInputError):
        load_image(tmp_path / "image.webp")
    with pytest.raises(InvalidInputError):
        save_image(_rand(4, 4, 0), tmp_path / "image.jpg")


def test_load_missing_file(tmp_path):
    with pytest.raises(InvalidInputError):
        load_image(tmp_path / "nope.png")


def test_load_undecodable_file(tmp_path):
    p = tmp_path / "broken.png"
    p.write_bytes(b"this is not a png")
    with pytest.raises(InvalidInputError):
        load_image(p)
