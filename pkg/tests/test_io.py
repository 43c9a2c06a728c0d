import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from scribblemix.core import FormatError
from scribblemix.io import (
    load_image,
    load_mask,
    load_tri,
    read_tensor,
    save_image,
    save_mask,
    save_tri,
    sha256_file,
    write_tensor,
)


def test_tensor_roundtrip_bitwise(tmp_path):
    rng = np.random.Generator(np.random.PCG64(0))
    arr = rng.random((2, 3)).astype(np.float32)
    f = tmp_path / "t.rtb"
    write_tensor(f, arr)
    back = read_tensor(f)
    assert back.dtype == np.float32
    assert back.shape == (2, 3)
    assert np.array_equal(arr.view(np.uint32), back.view(np.uint32))  # bit level


@given(st.integers(0, 4))
def test_tensor_roundtrip_ranks(rank):
    import tempfile
    from pathlib import Path

    rng = np.random.Generator(np.random.PCG64(rank))
    shape = tuple(int(rng.integers(1, 4)) for _ in range(rank))
    arr = rng.random(shape).astype(np.float32)
    with tempfile.TemporaryDirectory() as d:
        f = Path(d) / "t.rtb"
        write_tensor(f, arr)
        back = read_tensor(f)
    assert back.shape == arr.shape
    assert np.array_equal(arr, back)


def test_tensor_empty_dims_valid(tmp_path):
    f = tmp_path / "e.rtb"
    write_tensor(f, np.zeros((0,), dtype=np.float32))
    back = read_tensor(f)
    assert back.shape == (0,)


def test_tensor_wrong_magic(tmp_path):
    f = tmp_path / "bad.rtb"
    f.write_bytes(b"NOPE" + b"\x00" * 16)
    with pytest.raises(FormatError, match="byte 0"):
        read_tensor(f)


def test_tensor_truncated_payload(tmp_path):
    f = tmp_path / "t.rtb"
    write_tensor(f, np.ones((4, 4), dtype=np.float32))
    data = f.read_bytes()
    f.write_bytes(data[:-8])
    with pytest.raises(FormatError, match="byte"):
        read_tensor(f)


def test_tensor_rank_too_high(tmp_path):
    import struct

    f = tmp_path / "r.rtb"
    f.write_bytes(b"RTB1" + struct.pack("<B", 5) + b"\x01\x00\x00\x00" * 5)
    with pytest.raises(FormatError, match="rank"):
        read_tensor(f)


def test_tensor_rejects_non_tensor_file(tmp_path):
    f = tmp_path / "short.rtb"
    f.write_bytes(b"RT")
    with pytest.raises(FormatError):
        read_tensor(f)


def test_image_roundtrip_quantized(tmp_path):
    rng = np.random.Generator(np.random.PCG64(1))
    img = rng.random((5, 7, 3))
    f = tmp_path / "i.png"
    save_image(f, img)
    back = load_image(f)
    want = np.floor(img * 255.0 + 0.5) / 255.0
    assert np.allclose(back, want, atol=1e-12)
    # a second trip is lossless: quantization is idempotent
    save_image(f, back)
    assert np.array_equal(load_image(f), back)


def test_tri_png_roundtrip(tmp_path):
    y = np.array([[0.0, 0.5], [1.0, 0.5]])
    f = tmp_path / "y.png"
    save_tri(f, y)
    assert np.array_equal(load_tri(f), y)


def test_tri_png_rejects_stray_gray(tmp_path):
    from PIL import Image

    f = tmp_path / "bad.png"
    Image.fromarray(np.full((3, 3), 42, dtype=np.uint8), mode="L").save(f)
    with pytest.raises(FormatError, match="42"):
        load_tri(f)


def test_mask_roundtrip_and_255_accepted(tmp_path):
    from PIL import Image

    m = np.array([[0, 1], [1, 0]], dtype=np.uint8)
    f = tmp_path / "m.png"
    save_mask(f, m)
    assert np.array_equal(load_mask(f), m)
    # masks written by other tools often use 255 for foreground
    Image.fromarray(m * 255, mode="L").save(f)
    assert np.array_equal(load_mask(f), m)


def test_load_mask_rejects_other_values(tmp_path):
    from PIL import Image

    f = tmp_path / "g.png"
    Image.fromarray(np.full((2, 2), 9, dtype=np.uint8), mode="L").save(f)
    with pytest.raises(FormatError):
        load_mask(f)


def test_sha256_file_stable(tmp_path):
    f = tmp_path / "x.bin"
    f.write_bytes(b"abc")
    # well-known digest of the three bytes "abc"
    assert sha256_file(f) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"


def test_save_overwrites_atomically(tmp_path):
    f = tmp_path / "y.png"
    save_tri(f, np.zeros((2, 2)))
    save_tri(f, np.ones((2, 2)))
    assert np.array_equal(load_tri(f), np.ones((2, 2)))
    assert [p.name for p in tmp_path.iterdir()] == ["y.png"]  # no temp litter
