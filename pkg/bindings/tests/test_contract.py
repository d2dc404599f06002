import numpy as np
import pytest

from hmdecode import Coord, Space, encode
from hmdecode_bindings import decode_batch


def _stack(n=3, h=17, w=17):
    hms = [encode(Coord(8.0 + 0.2 * i, 8.0, Space.IMAGE), w, h, 1.0, 2.0) for i in range(n)]
    return np.ascontiguousarray(np.stack([hm.values for hm in hms]))


def test_identity_round_trip():
    stack = _stack(n=1)
    out = decode_batch(stack, 1.0, 2.0, method="standard")
    assert out.tolist() == [[8.0, 8.0]]


def test_accepts_raw_memoryview_and_bytes_buffer():
    stack = _stack()
    out_arr = decode_batch(stack, 1.0, 2.0, method="daec", delta=0)
    out_view = decode_batch(memoryview(stack), 1.0, 2.0, method="daec", delta=0)
    assert np.array_equal(out_arr, out_view)


def test_non_contiguous_rejected():
    stack = np.ascontiguousarray(np.random.default_rng(0).random((4, 10, 12)).astype(np.float32))
    sliced = stack[:, ::2, :]
    with pytest.raises(ValueError, match="contiguous"):
        decode_batch(sliced, 1.0, 2.0)


def test_wrong_dtype_rejected():
    stack = np.ones((2, 8, 8), dtype=np.float64)
    with pytest.raises(TypeError, match="float32"):
        decode_batch(stack, 1.0, 2.0)


def test_wrong_rank_rejected():
    with pytest.raises(ValueError, match="shape"):
        decode_batch(np.ones((8, 8), dtype=np.float32), 1.0, 2.0)


def test_non_buffer_rejected():
    with pytest.raises(TypeError, match="buffer"):
        decode_batch([[1.0, 2.0]], 1.0, 2.0)


def test_oversized_delta_propagates_library_message():
    with pytest.raises(ValueError, match="exceeds window"):
        decode_batch(_stack(), 1.0, 2.0, method="daec", delta=9)


def test_truth_shape_validated():
    from hmdecode_bindings import calibrate_batch

    stack = _stack()
    with pytest.raises(ValueError, match="truths"):
        calibrate_batch(stack, np.zeros((2, 2)), 1.0, 2.0)


def test_concurrent_calls_share_no_state():
    import threading

    stack = _stack(n=32)
    expected = decode_batch(stack, 1.0, 2.0, method="daec", delta=2)
    results = [None] * 8

    def work(slot):
        results[slot] = decode_batch(stack, 1.0, 2.0, method="daec", delta=2)

    threads = [threading.Thread(target=work, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for r in results:
        assert np.array_equal(r, expected)
