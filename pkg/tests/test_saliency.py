"""Tests for the per-scale structure responses and the cross-scale saliency map."""

import numpy as np
import pytest

from salfuse import (
    Image,
    InvalidInputError,
    PyramidParams,
    SaliencyMetricKind,
    build_dog_pyramid,
    build_gaussian_pyramid,
    build_saliency_map,
    saliency_dog,
    saliency_gradient,
    saliency_log,
)
from salfuse.synthetic import texture

from oracles import convolve2d_replicate, gaussian_kernel_2d, three_tap_kernel_2d

ALL_KINDS = [SaliencyMetricKind.DOG, SaliencyMetricKind.GRADIENT, SaliencyMetricKind.LOG]


def _noise(h, w, seed):
    return Image(np.random.default_rng(seed).random((h, w)))


# ------------------------------------------------------- per-scale responses


def test_integration_window_is_a_3x3_stamp():
    """An impulse response reveals the fixed radius-1 integration filter."""
    data = np.zeros((9, 9))
    data[4, 4] = 1.0
    out = saliency_dog(Image(data)).data
    np.testing.assert_allclose(out[3:6, 3:6], three_tap_kernel_2d(0.8), atol=1e-12)
    assert out[0, :].max() == 0.0 and out[:, 0].max() == 0.0


def test_dog_response_matches_2d_oracle():
    plane = _noise(8, 8, 1)
    out = saliency_dog(plane)
    ref = convolve2d_replicate(plane.data, three_tap_kernel_2d(0.8))
    np.testing.assert_allclose(out.data, ref, atol=1e-12)


def test_gradient_response_is_zero_on_constants():
    out = saliency_gradient(Image(np.full((10, 10), 0.7)), 1.0)
    np.testing.assert_allclose(out.data, 0.0, atol=1e-15)


def test_gradient_response_on_a_ramp():
    """A ramp of slope 1/16 has squared-gradient 1/256 away from the borders."""
    ramp = Image(np.tile(np.arange(17) / 16.0, (9, 1)))
    out = saliency_gradient(ramp, 1.0)
    np.testing.assert_allclose(out.data[:, 2:-2], (1.0 / 16.0) ** 2, rtol=1e-12)


def test_gradient_response_mirrors_with_the_image():
    img = _noise(11, 13, 2)
    flipped = Image(img.data[:, ::-1])
    a = saliency_gradient(img, 1.0).data
    b = saliency_gradient(flipped, 1.0).data
    np.testing.assert_allclose(a, b[:, ::-1], atol=1e-12)


def test_gradient_response_ignores_sigma():
    img = _noise(9, 9, 3)
    np.testing.assert_array_equal(
        saliency_gradient(img, 1.0).data, saliency_gradient(img, 5.0).data
    )


def test_log_response_is_zero_on_constants_and_ramps():
    const = saliency_log(Image(np.full((12, 12), 0.4)), 1.0)
    np.testing.assert_allclose(const.data, 0.0, atol=1e-12)
    ramp = Image(np.tile(np.arange(15) / 14.0, (9, 1)))
    out = saliency_log(ramp, 1.0)
    np.testing.assert_allclose(out.data[2:-2, 2:-2], 0.0, atol=1e-12)


def test_log_response_impulse_matches_stencil_oracle():
    data = np.zeros((11, 11))
    data[5, 5] = 1.0
    sigma = 1.3
    out = saliency_log(Image(data), sigma)
    five_point = np.array([[0.0, 1.0, 0.0], [1.0, -4.0, 1.0], [0.0, 1.0, 0.0]])
    lap = convolve2d_replicate(data, five_point)
    ref = convolve2d_replicate(np.abs(sigma * sigma * lap), three_tap_kernel_2d(0.8))
    np.testing.assert_allclose(out.data, ref, atol=1e-12)


def test_log_response_scales_with_sigma_squared():
    img = _noise(10, 10, 4)
    one = saliency_log(img, 1.0).data
    two = saliency_log(img, 2.0).data
    np.testing.assert_allclose(two, 4.0 * one, rtol=1e-12)


# ------------------------------------------------------------- full saliency


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_saliency_of_constant_image_is_zero(kind):
    sal = build_saliency_map(Image(np.full((24, 24), 0.5)), PyramidParams(octaves=2), kind)
    np.testing.assert_allclose(sal.map.data, 0.0, atol=1e-12)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_saliency_is_nonnegative_and_full_resolution(kind):
    img = _noise(24, 20, 5)
    sal = build_saliency_map(img, PyramidParams(octaves=2, layers=2), kind)
    assert sal.map.data.shape == img.data.shape
    assert sal.map.data.min() >= 0.0


def test_single_octave_single_layer_reduces_to_the_dog_response():
    img = _noise(16, 16, 6)
    p = PyramidParams()
    sal = build_saliency_map(img, p)
    dog = build_dog_pyramid(build_gaussian_pyramid(img, p))
    np.testing.assert_array_equal(sal.map.data, saliency_dog(dog.octaves[0][0]).data)


def test_single_octave_saliency_matches_naive_blur_chain():
    """End-to-end oracle: blur chain, absolute differences, 3x3 integration, max."""
    img = _noise(16, 16, 7)
    p = PyramidParams(layers=2)
    sal = build_saliency_map(img, p)

    chain = [convolve2d_replicate(img.data, gaussian_kernel_2d(p.sigma0))]
    for j in range(p.layers):
        inc = p.sigma0 * p.k ** j * np.sqrt(p.k * p.k - 1.0)
        chain.append(convolve2d_replicate(chain[-1], gaussian_kernel_2d(inc)))
    w3 = three_tap_kernel_2d(0.8)
    responses = [
        convolve2d_replicate(np.abs(chain[j + 1] - chain[j]), w3) for j in range(p.layers)
    ]
    ref = np.maximum.reduce(responses)
    np.testing.assert_allclose(sal.map.data, ref, atol=1e-6)


def test_more_octaves_never_lower_the_saliency():
    """The cross-octave max can only grow as octaves are added."""
    img = texture(48, 64, channels=1, seed=8)
    small = build_saliency_map(img, PyramidParams(octaves=1, layers=2)).map.data
    large = build_saliency_map(img, PyramidParams(octaves=3, layers=2)).map.data
    assert np.all(large >= small - 1e-9)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_saliency_ignores_brightness_offsets(kind):
    base = Image(_noise(20, 20, 9).data * 0.5)
    lifted = Image(base.data + 0.3)
    p = PyramidParams(octaves=2, layers=2)
    a = build_saliency_map(base, p, kind).map.data
    b = build_saliency_map(lifted, p, kind).map.data
    np.testing.assert_allclose(a, b, atol=1e-9)


def test_saliency_rejects_color_input():
    img = Image(np.random.default_rng(0).random((16, 16, 3)))
    with pytest.raises(InvalidInputError):
        build_saliency_map(img, PyramidParams())


def test_saliency_debug_dump(tmp_path):
    build_saliency_map(
        _noise(20, 20, 10), PyramidParams(octaves=2), debug_dir=tmp_path / "dbg"
    )
    names = {f.name for f in (tmp_path / "dbg").iterdir()}
    assert {"oct0_lay0.png", "oct0_lay1.png", "saliency_oct0_max.png",
            "saliency_oct1_max.png", "saliency.png"} <= names
