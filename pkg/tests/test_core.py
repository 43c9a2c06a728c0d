import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from scribblemix.core import (
    FormatError,
    nonbackground_mask,
    tri_decode,
    tri_encode,
    validate_image,
    validate_mask,
    validate_prediction,
    validate_trilabel,
)

tri_arrays = arrays(
    np.float64,
    st.tuples(st.integers(1, 12), st.integers(1, 12)),
    elements=st.sampled_from([0.0, 0.5, 1.0]),
)


@given(tri_arrays)
def test_tri_codec_roundtrip(y):
    raster = tri_encode(y)
    assert raster.dtype == np.uint8
    assert set(np.unique(raster)).issubset({0, 128, 255})
    assert np.array_equal(tri_decode(raster), y)


def test_tri_encode_values():
    y = np.array([[0.0, 0.5, 1.0]])
    assert tri_encode(y).tolist() == [[0, 128, 255]]


def test_tri_decode_rejects_bad_byte_naming_pixel():
    raster = np.zeros((4, 4), dtype=np.uint8)
    raster[2, 3] = 7
    with pytest.raises(FormatError, match=r"\(2, 3\)"):
        tri_decode(raster)


def test_tri_encode_rejects_bad_value():
    with pytest.raises((FormatError, ValueError)):
        tri_encode(np.array([[0.25]]))


def test_validate_image_range_and_shape():
    ok = np.zeros((4, 4, 3))
    assert validate_image(ok).shape == (4, 4, 3)
    with pytest.raises(ValueError):
        validate_image(np.full((4, 4, 3), 1.5))
    with pytest.raises(ValueError):
        validate_image(np.zeros((4, 4)))
    with pytest.raises(ValueError):
        validate_image(np.full((2, 2, 3), np.nan))


def test_validate_mask_and_prediction():
    assert validate_mask(np.array([[0, 1], [1, 0]], dtype=np.uint8)).dtype == np.uint8
    with pytest.raises(ValueError):
        validate_mask(np.array([[0, 2]]))
    p = validate_prediction(np.array([[0.0, 0.3], [1.0, 0.5]]))
    assert p.dtype == np.float64
    with pytest.raises(ValueError):
        validate_prediction(np.array([[-0.1, 0.2]]))


def test_validate_trilabel_rejects_other_values():
    with pytest.raises(ValueError):
        validate_trilabel(np.array([[0.0, 0.4]]))
    with pytest.raises(ValueError):
        validate_trilabel(np.array([0.0, 1.0]))  # 1-D


@given(tri_arrays)
def test_nonbackground_mask(y):
    m = nonbackground_mask(y)
    assert m.dtype == np.uint8
    assert np.array_equal(m == 1, y > 0)
