"""Bit-surgery and numeric-format tests (exhaustive where the domain is tiny)."""

import numpy as np
import pytest

from faultlab import quantnum as qn


def test_quantize_zero_maps_to_zero():
    assert qn.quantize_int8([0.0], scale=0.3).raw[0] == 0
    assert qn.quantize_int8([0.0]).raw[0] == 0


def test_quantize_full_scale_point():
    assert qn.quantize_int8([1.0], scale=1 / 127).raw[0] == 127


def test_quantize_saturates():
    # unclamped 10.0 / 0.05 = 200 -> clamped to 127
    assert qn.quantize_int8([10.0], scale=0.05).raw[0] == 127
    assert qn.quantize_int8([-10.0], scale=0.05).raw[0] == -128


def test_quantize_rejects_non_finite():
    for bad in (np.nan, np.inf, -np.inf):
        with pytest.raises(ValueError):
            qn.quantize_int8([1.0, bad])


def test_quantize_auto_scale_symmetric():
    t = qn.quantize_int8([-2.0, 1.0, 0.5])
    assert t.scale == pytest.approx(2.0 / 127)
    assert t.raw[0] == -127


def test_quantize_range_and_reconstruction():
    rng = np.random.default_rng(7)
    values = rng.normal(0, 1.5, size=4000)
    t = qn.quantize_int8(values)
    assert t.raw.min() >= -128 and t.raw.max() <= 127
    # dequantize(quantize(x)) within scale/2 of clamp(x)
    clamped = np.clip(values, -128 * t.scale, 127 * t.scale)
    assert np.max(np.abs(t.dequantize() - clamped)) <= t.scale / 2 + 1e-12


def test_quantize_rounds_half_away_from_zero():
    t = qn.quantize_int8([0.5, -0.5, 1.5, -1.5], scale=1.0)
    assert list(t.raw) == [1, -1, 2, -2]


def test_flip_bit_examples():
    assert qn.flip_bit(0x00, 7) == 0x80
    assert qn.flip_bit(0x5A, 0) == 0x5B


def test_flip_bit_involution_exhaustive():
    for word in range(256):
        for pos in range(8):
            flipped = qn.flip_bit(word, pos)
            assert flipped != word
            assert flipped ^ word == 1 << pos
            assert qn.flip_bit(flipped, pos) == word


def test_apply_stuck_examples():
    assert qn.apply_stuck(0b1100, 0, 1) == 0b1101
    assert qn.apply_stuck(0b0110, 1, 0) == 0b0100


def test_apply_stuck_idempotent_exhaustive():
    for word in range(256):
        for pos in range(8):
            for val in (0, 1):
                once = qn.apply_stuck(word, pos, val)
                assert qn.apply_stuck(once, pos, val) == once
                assert (once >> pos) & 1 == val
                # already-forced bit is unchanged
                if (word >> pos) & 1 == val:
                    assert once == word


def test_bit_ops_reject_out_of_range():
    with pytest.raises(ValueError):
        qn.flip_bit(0, 8)
    with pytest.raises(ValueError):
        qn.flip_bit(0, -1)
    with pytest.raises(ValueError):
        qn.apply_stuck(0, 16, 1)
    with pytest.raises(ValueError):
        qn.apply_stuck(0, 0, 2)


def test_int8_byte_views():
    raw = np.array([-128, -1, 0, 127], dtype=np.int8)
    as_bytes = qn.int8_to_byte(raw)
    assert list(as_bytes) == [0x80, 0xFF, 0x00, 0x7F]
    assert np.array_equal(qn.byte_to_int8(as_bytes), raw)


def test_bf16_format_points():
    assert qn.bf16_decode(0x3F80) == 1.0
    assert qn.bf16_decode(0x0000) == 0.0
    assert qn.bf16_encode(1.0) == 0x3F80
    assert qn.bf16_encode(0.0) == 0x0000


def test_bf16_powers_of_two_roundtrip():
    for k in range(-10, 11):
        x = 2.0**k
        assert qn.bf16_decode(qn.bf16_encode(x)) == x
        assert qn.bf16_decode(qn.bf16_encode(-x)) == -x


def test_bf16_round_to_nearest_even():
    # 1 + 2^-8 sits exactly between 1.0 and the next bf16 value; ties go to
    # the even mantissa (1.0), while anything above rounds up.
    assert qn.bf16_encode(1.0 + 2.0**-8) == 0x3F80
    assert qn.bf16_encode(1.0 + 2.0**-8 + 2.0**-12) == 0x3F81
    # 1 + 3*2^-8 ties between 0x3F81 and 0x3F82 -> even (0x3F82)
    assert qn.bf16_encode(1.0 + 3 * 2.0**-8) == 0x3F82


def test_bf16_special_values():
    assert qn.bf16_decode(qn.bf16_encode(np.inf)) == np.inf
    assert qn.bf16_decode(qn.bf16_encode(-np.inf)) == -np.inf
    assert np.isnan(qn.bf16_decode(qn.bf16_encode(np.nan)))
    # float32 max overflows to infinity in bfloat16
    assert qn.bf16_decode(qn.bf16_encode(3.4028235e38)) == np.inf


def test_bf16_mantissa_lsb_masking_bound():
    # masking the 4 mantissa LSBs moves the value by at most
    # 2^(e-127) * 15 / 2^7 for exponent field e
    rng = np.random.default_rng(3)
    values = rng.normal(0, 10, size=2000).astype(np.float32)
    bits = qn.bf16_encode_array(values)
    masked = bits & ~np.uint16(0x000F)
    delta = np.abs(
        qn.bf16_decode_array(bits).astype(np.float64)
        - qn.bf16_decode_array(masked).astype(np.float64)
    )
    exp_field = ((bits >> 7) & 0xFF).astype(np.float64)
    bound = 2.0 ** (exp_field - 127) * 15 / 2.0**7
    assert np.all(delta <= bound + 1e-30)


def test_bf16_roundtrip_is_identity_on_bf16_values():
    rng = np.random.default_rng(11)
    bits = rng.integers(0, 0x7F80, size=500, dtype=np.uint16)  # finite values
    vals = qn.bf16_decode_array(bits)
    assert np.array_equal(qn.bf16_encode_array(vals), bits)
