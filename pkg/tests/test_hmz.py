import io

import numpy as np
import pytest

from hmdecode import FormatError, read_hmz, write_hmz
from hmdecode.hmz import MAGIC

from conftest import make_encoded


def _random_stack(rng, n=5, h=12, w=9):
    return rng.random((n, h, w)).astype(np.float32)


def test_roundtrip_bitwise_from_heatmaps(tmp_path):
    hms = [make_encoded(6.0 + i, 7.0, width=16, height=14, stride=4.0) for i in range(3)]
    path = tmp_path / "batch.hmz"
    write_hmz(path, hms)
    bundle = read_hmz(path)
    assert bundle.stride == 4.0 and bundle.sigma == 2.0
    for i, hm in enumerate(hms):
        assert np.array_equal(bundle.values[i], hm.values)
    # second write of the read contents is byte-identical
    buf = io.BytesIO()
    write_hmz(buf, bundle.values, bundle.stride, bundle.sigma)
    assert buf.getvalue() == path.read_bytes()


def test_roundtrip_bitwise_random_payload(rng):
    stack = _random_stack(rng)
    buf = io.BytesIO()
    write_hmz(buf, stack, stride=2.0, sigma=3.0)
    bundle = read_hmz(io.BytesIO(buf.getvalue()))
    assert np.array_equal(bundle.values, stack)


def test_bad_magic(rng):
    buf = io.BytesIO()
    write_hmz(buf, _random_stack(rng), stride=1.0, sigma=2.0)
    raw = bytearray(buf.getvalue())
    raw[:4] = b"NOPE"
    with pytest.raises(FormatError, match="magic"):
        read_hmz(io.BytesIO(bytes(raw)))


def test_truncated_and_trailing_payload(rng):
    buf = io.BytesIO()
    write_hmz(buf, _random_stack(rng), stride=1.0, sigma=2.0)
    raw = buf.getvalue()
    with pytest.raises(FormatError, match="size"):
        read_hmz(io.BytesIO(raw[:-8]))
    with pytest.raises(FormatError, match="size"):
        read_hmz(io.BytesIO(raw + b"\x00\x00"))
    with pytest.raises(FormatError, match="short"):
        read_hmz(io.BytesIO(MAGIC))


def test_bad_metadata_rejected(rng):
    import struct

    stack = _random_stack(rng, n=1, h=2, w=2)
    header = struct.pack("<4sIIIff", MAGIC, 1, 2, 2, -1.0, 2.0)
    with pytest.raises(FormatError, match="metadata"):
        read_hmz(io.BytesIO(header + stack.tobytes()))


def test_mixed_heatmaps_rejected():
    a = make_encoded(6.0, 6.0, width=16, height=14)
    b = make_encoded(6.0, 6.0, width=16, height=14, sigma=3.0)
    with pytest.raises(ValueError, match="share"):
        write_hmz(io.BytesIO(), [a, b])
    with pytest.raises(ValueError, match="empty"):
        write_hmz(io.BytesIO(), [])
