"""Numeric formats and bit-level surgery shared by all fault models.

Two's-complement int8 with a symmetric per-tensor scale, bfloat16
encode/decode, and the single-bit operations (flip, stuck-at) that the
DRAM and MAC fault models are built on.

Conventions fixed here for reproducibility:
  * int8 quantization rounds half away from zero,
  * bfloat16 encode rounds to nearest even,
  * bit 7 of an int8 word is the sign bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

INT8_MIN = -128
INT8_MAX = 127
SIGN_BIT = 7

# bfloat16 field layout: 1 sign, 8 exponent, 7 mantissa.
BF16_MANTISSA_BITS = 7
BF16_EXPONENT_MASK = 0x7F80
BF16_MANTISSA_MASK = 0x007F


@dataclass(frozen=True)
class Int8Tensor:
    """An int8 weight/activation array plus its quantization scale.

    ``raw`` is two's-complement int8; ``scale`` is in value units per LSB,
    so ``dequantize() == raw * scale``.
    """

    raw: np.ndarray
    scale: float

    def __post_init__(self):
        if self.raw.dtype != np.int8:
            raise ValueError(f"raw must be int8, got {self.raw.dtype}")
        if not (self.scale > 0):
            raise ValueError(f"scale must be positive, got {self.scale}")

    def dequantize(self) -> np.ndarray:
        return self.raw.astype(np.float64) * self.scale


def round_half_away(x):
    """Round to nearest integer, halves away from zero."""
    x = np.asarray(x, dtype=np.float64)
    return np.copysign(np.floor(np.abs(x) + 0.5), x)


def quantize_int8(values, scale: float | None = None) -> Int8Tensor:
    """Quantize real values to two's-complement int8.

    With ``scale=None`` a symmetric per-tensor scale ``max|v| / 127`` is
    chosen. Output raw values are clamped to [-128, 127].
    """
    values = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise ValueError("cannot quantize non-finite values")
    if scale is None:
        peak = float(np.max(np.abs(values))) if values.size else 0.0
        scale = peak / INT8_MAX if peak > 0 else 1.0
    if not (scale > 0):
        raise ValueError(f"scale must be positive, got {scale}")
    raw = np.clip(round_half_away(values / scale), INT8_MIN, INT8_MAX)
    return Int8Tensor(raw=raw.astype(np.int8), scale=float(scale))


def dequantize_int8(tensor: Int8Tensor) -> np.ndarray:
    return tensor.dequantize()


def _check_pos(pos: int, width: int):
    if not 0 <= pos < width:
        raise ValueError(f"bit position {pos} out of range for {width}-bit word")


def flip_bit(word: int, pos: int, width: int = 8) -> int:
    """Invert exactly bit ``pos`` of an unsigned ``width``-bit word."""
    _check_pos(pos, width)
    return (int(word) ^ (1 << pos)) & ((1 << width) - 1)


def apply_stuck(word: int, pos: int, value: int, width: int = 8) -> int:
    """Force bit ``pos`` of an unsigned ``width``-bit word to 0 or 1."""
    _check_pos(pos, width)
    if value not in (0, 1):
        raise ValueError(f"stuck value must be 0 or 1, got {value}")
    word = int(word) & ((1 << width) - 1)
    if value:
        return word | (1 << pos)
    return word & ~(1 << pos)


def int8_to_byte(raw) -> np.ndarray:
    """View int8 values as the unsigned byte stored in memory."""
    return np.asarray(raw, dtype=np.int8).view(np.uint8)


def byte_to_int8(word) -> np.ndarray:
    """View stored bytes back as two's-complement int8."""
    return np.asarray(word, dtype=np.uint8).view(np.int8)


def bf16_encode(x: float) -> int:
    """Encode a real to bfloat16 bits (round to nearest even)."""
    return int(bf16_encode_array(np.asarray([x]))[0])


def bf16_decode(bits: int) -> float:
    """Decode bfloat16 bits exactly (bfloat16 is a float32 prefix)."""
    return float(bf16_decode_array(np.asarray([bits], dtype=np.uint16))[0])


def bf16_encode_array(x) -> np.ndarray:
    f32 = np.asarray(x, dtype=np.float32)
    bits32 = f32.view(np.uint32)
    lsb = (bits32 >> 16) & 1
    # uint64 keeps the round-to-nearest-even add from wrapping on NaN payloads
    out = (((bits32.astype(np.uint64) + 0x7FFF + lsb) >> 16) & 0xFFFF).astype(np.uint16)
    # NaN payloads must survive the rounding shortcut above.
    nan = np.isnan(f32)
    if np.any(nan):
        out = out.copy()
        out[nan] = ((bits32[nan] >> 16) | 0x0040).astype(np.uint16)
    return out


def bf16_decode_array(bits) -> np.ndarray:
    b = np.asarray(bits, dtype=np.uint16)
    return (b.astype(np.uint32) << 16).view(np.float32)


def bf16_round_array(x) -> np.ndarray:
    """Round an array through the bfloat16 format (encode then decode)."""
    return bf16_decode_array(bf16_encode_array(x))
