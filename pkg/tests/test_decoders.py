import math

import numpy as np
import pytest

from hmdecode import (
    DecoderConfig,
    DeltaTooLargeError,
    Heatmap,
    Method,
    Pattern,
    STATUS_OK,
    STATUS_ZERO_MASS,
    build_region,
    decode_batch,
    decode_daec,
    decode_darklite,
    decode_shifting,
    decode_standard,
    inject_noise,
    smooth,
)

from conftest import ghost, make_encoded
from oracles import argmax_rowmajor, full_grid_mean, gaussian_value, windowed_mean


class TestStandard:
    def test_exact_integer_center(self):
        hm = make_encoded(8.0, 8.0)
        assert decode_standard(hm).as_tuple() == (8.0, 8.0)

    def test_half_pixel_tie_breaks_row_major(self):
        # pixels (8,8) and (9,8) tie; the first in row-major order wins,
        # leaving the full 0.5 px quantization error
        hm = make_encoded(8.5, 8.0)
        assert argmax_rowmajor(hm.values) == (8, 8)
        assert decode_standard(hm).as_tuple() == (8.0, 8.0)

    def test_uniform_grid_returns_origin(self):
        hm = Heatmap(np.ones((6, 7), dtype=np.float32))
        assert decode_standard(hm).as_tuple() == (0.0, 0.0)

    def test_stride_scaling(self):
        hm = make_encoded(32.0, 16.0, width=16, height=12, stride=4.0)
        assert decode_standard(hm).as_tuple() == (32.0, 16.0)


class TestShifting:
    def test_shift_toward_higher_neighbor_is_exact(self):
        hm = make_encoded(8.25, 8.0)
        # confirm the neighbor ordering the method relies on
        right = gaussian_value(9, 8, 8.25, 8.0, 2.0)
        left = gaussian_value(7, 8, 8.25, 8.0, 2.0)
        up = gaussian_value(8, 7, 8.25, 8.0, 2.0)
        down = gaussian_value(8, 9, 8.25, 8.0, 2.0)
        assert right > max(left, up, down)
        assert decode_shifting(hm).as_tuple() == (8.25, 8.0)

    def test_symmetric_peak_tie_order(self):
        # all four neighbors tie; the fixed order +x, -x, +y, -y applies,
        # documenting the method's bias on symmetric input
        hm = make_encoded(8.0, 8.0)
        v = hm.values
        assert v[8, 9] == v[8, 7] == v[9, 8] == v[7, 8]
        assert decode_shifting(hm).as_tuple() == (8.25, 8.0)

    def test_corner_peak_shifts_inward_only(self):
        w, h = 9, 7
        ramp = np.add.outer(np.arange(h)[::-1], np.arange(w)[::-1]).astype(np.float32)
        hm = Heatmap(ramp)
        out = decode_shifting(hm)
        assert argmax_rowmajor(ramp) == (0, 0)
        # both in-grid neighbors tie; +x precedes +y
        assert out.as_tuple() == (0.25, 0.0)

    def test_single_pixel_rejected(self):
        with pytest.raises(ValueError):
            decode_shifting(Heatmap(np.ones((1, 1), dtype=np.float32)))


class TestDarklite:
    @pytest.mark.parametrize("center", [(8.3, 7.6), (7.85, 9.2), (8.0, 8.49)])
    def test_recovers_subpixel_center_exactly(self, center):
        # log of a Gaussian is an exact quadratic, so the finite-difference
        # Newton step lands on the mean up to float32 storage error
        hm = make_encoded(*center)
        out = decode_darklite(hm)
        assert abs(out.x - center[0]) < 1e-4
        assert abs(out.y - center[1]) < 1e-4

    def test_symmetric_peak_zero_correction(self):
        hm = make_encoded(8.0, 8.0)
        assert decode_darklite(hm).as_tuple() == (8.0, 8.0)

    def test_border_peak_falls_back_to_standard(self):
        ramp = np.add.outer(np.zeros(6), np.arange(8)).astype(np.float32)
        hm = Heatmap(ramp)
        assert decode_darklite(hm).as_tuple() == decode_standard(hm).as_tuple()

    def test_flat_curvature_falls_back(self):
        hm = Heatmap(np.ones((7, 7), dtype=np.float32))
        assert decode_darklite(hm).as_tuple() == decode_standard(hm).as_tuple()

    def test_correction_clamped_to_one_pixel(self):
        grid = np.full((7, 7), 1e-6, dtype=np.float32)
        grid[3, 3] = 1.0
        grid[3, 4] = 0.999999
        out = decode_darklite(Heatmap(grid))
        assert abs(out.x - 3.0) <= 1.0 + 1e-12
        assert abs(out.y - 3.0) <= 1.0 + 1e-12


class TestBuildRegion:
    def test_centered_window_span(self):
        hm = make_encoded(30.0, 20.0, width=64, height=48)
        region = build_region(hm, delta=0)
        assert (region.x_lo, region.x_hi) == (23, 37)
        assert (region.y_lo, region.y_hi) == (13, 27)
        assert region.width == region.height == 15

    def test_br_cut(self):
        hm = make_encoded(30.0, 20.0, width=64, height=48)
        region = build_region(hm, delta=4, pattern=Pattern.BR)
        assert (region.x_lo, region.x_hi) == (23, 33)
        assert (region.y_lo, region.y_hi) == (13, 23)

    def test_all_pattern_corners(self):
        hm = make_encoded(30.0, 20.0, width=64, height=48)
        expected = {
            Pattern.BR: (23, 34, 13, 24),
            Pattern.UR: (23, 34, 16, 27),
            Pattern.BL: (26, 37, 13, 24),
            Pattern.UL: (26, 37, 16, 27),
        }
        for pattern, bounds in expected.items():
            region = build_region(hm, delta=3, pattern=pattern)
            assert (region.x_lo, region.x_hi, region.y_lo, region.y_hi) == bounds

    def test_clipped_near_border(self):
        hm = make_encoded(1.0, 1.0, width=64, height=48)
        assert hm.argmax() == (1, 1)
        region = build_region(hm, delta=0)
        assert (region.x_lo, region.x_hi) == (0, 8)
        assert (region.y_lo, region.y_hi) == (0, 8)

    def test_negative_delta_expands_the_pattern_corner(self):
        hm = make_encoded(30.0, 20.0, width=64, height=48)
        region = build_region(hm, delta=-2)
        assert (region.x_lo, region.x_hi) == (23, 39)
        assert (region.y_lo, region.y_hi) == (13, 29)

    def test_delta_beyond_half_span_rejected(self):
        hm = make_encoded(30.0, 20.0, width=64, height=48)
        with pytest.raises(DeltaTooLargeError, match="exceeds window"):
            build_region(hm, delta=8)


class TestDaec:
    def test_noiseless_recovery_matches_oracles(self):
        for cx, cy in [(30.3, 20.7), (29.58, 19.12), (31.0, 20.5)]:
            hm = make_encoded(cx, cy, width=64, height=48)
            out = decode_daec(hm)
            region = build_region(hm)
            oracle = windowed_mean(hm.values, region.x_lo, region.x_hi, region.y_lo, region.y_hi)
            assert out.x == pytest.approx(oracle[0], abs=1e-9)
            assert out.y == pytest.approx(oracle[1], abs=1e-9)
            # windowed and full-grid means both sit within 0.01 px of truth
            full = full_grid_mean(hm.values)
            assert abs(out.x - cx) < 0.01 and abs(out.y - cy) < 0.01
            assert abs(full[0] - cx) < 0.01 and abs(full[1] - cy) < 0.01

    def test_positive_trim_beats_no_trim_under_ghost_bias(self):
        cx, cy = 30.4, 20.6
        hm = inject_noise(make_encoded(cx, cy, width=64, height=48), ghost(0.3, 2.0, 2.0))
        base = decode_daec(hm, DecoderConfig(delta=0))
        err0 = (abs(base.x - cx), abs(base.y - cy))
        improved = False
        for delta in range(1, 8):
            out = decode_daec(hm, DecoderConfig(delta=delta, pattern=Pattern.BR))
            err = (abs(out.x - cx), abs(out.y - cy))
            if err[0] < err0[0] and err[1] < err0[1]:
                improved = True
                break
        assert improved

    def test_uniform_grid_returns_region_centroid(self):
        hm = Heatmap(np.ones((20, 24), dtype=np.float32), stride=4.0)
        region = build_region(hm)
        out = decode_daec(hm)
        assert out.x == pytest.approx(4.0 * (region.x_lo + region.x_hi) / 2.0, abs=1e-12)
        assert out.y == pytest.approx(4.0 * (region.y_lo + region.y_hi) / 2.0, abs=1e-12)

    def test_zero_mass_falls_back_to_argmax(self):
        stack = np.zeros((1, 10, 12), dtype=np.float32)
        coords, status = decode_batch(stack, 2.0, 2.0, DecoderConfig(method=Method.DAEC))
        assert status[0] == STATUS_ZERO_MASS
        assert coords[0].tolist() == [0.0, 0.0]

    def test_presmooth_config_equals_external_smoothing(self):
        hm = make_encoded(30.3, 20.2, width=64, height=48)
        a = decode_daec(hm, DecoderConfig(delta=2, presmooth=2.0))
        b = decode_daec(smooth(hm, 2.0), DecoderConfig(delta=2))
        assert a.as_tuple() == b.as_tuple()

    def test_oversized_delta_rejected(self):
        hm = make_encoded(30.0, 20.0, width=64, height=48)
        with pytest.raises(DeltaTooLargeError, match="exceeds window"):
            decode_daec(hm, DecoderConfig(delta=9))

    def test_monotone_response_to_trim_under_one_sided_bias(self):
        hm = inject_noise(make_encoded(30.0, 20.0, width=64, height=48), ghost(0.4, 3.0, 3.0))
        xs, ys = [], []
        for delta in range(0, 3):  # up to sigma
            out = decode_daec(hm, DecoderConfig(delta=delta, pattern=Pattern.BR))
            xs.append(out.x)
            ys.append(out.y)
        assert all(b <= a + 1e-9 for a, b in zip(xs, xs[1:]))
        assert all(b <= a + 1e-9 for a, b in zip(ys, ys[1:]))


class TestBatch:
    def test_status_ok_on_clean_batch(self):
        stack = np.stack([make_encoded(8.0 + i * 0.3, 8.0).values for i in range(5)])
        coords, status = decode_batch(stack, 1.0, 2.0, DecoderConfig(method=Method.DAEC))
        assert (status == STATUS_OK).all()
        assert coords.shape == (5, 2)

    def test_single_heatmap_accepted(self):
        hm = make_encoded(8.0, 8.0)
        coords, _ = decode_batch(hm.values, 1.0, 2.0, DecoderConfig(method=Method.STANDARD))
        assert coords[0].tolist() == [8.0, 8.0]

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            decode_batch(np.ones((2, 2)), 0.0, 2.0, DecoderConfig())
        with pytest.raises(ValueError):
            decode_batch(np.ones(4), 1.0, 2.0, DecoderConfig())


def test_decoder_error_ordering_on_noiseless_samples(rng):
    n = 2000
    lo, hi_x, hi_y = 9.0, 54.0, 38.0
    centers = rng.uniform((lo, lo), (hi_x, hi_y), size=(n, 2))
    stack = np.stack(
        [make_encoded(cx, cy, width=64, height=48).values for cx, cy in centers]
    )
    errs = {}
    per_axis = {}
    for method in (Method.STANDARD, Method.SHIFTING, Method.DAEC):
        coords, _ = decode_batch(stack, 1.0, 2.0, DecoderConfig(method=method))
        diff = coords - centers
        errs[method] = float(np.hypot(diff[:, 0], diff[:, 1]).mean())
        per_axis[method] = float(np.abs(diff).mean())
    assert errs[Method.STANDARD] > errs[Method.SHIFTING] > errs[Method.DAEC]
    # mean of |U(-0.5, 0.5)| = 0.25 per axis for the quantizing decoder
    assert per_axis[Method.STANDARD] == pytest.approx(0.25, abs=0.01)
