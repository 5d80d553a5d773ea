"""Logic-cone fault signatures on a multiplier output.

A fault is a set of stuck bits in the cone of the product's magnitude
bits, plus an optional worst-case carry perturbation one bit above the
highest stuck bit. For stuck bits up to and including position K the
error is bounded by sum_{i=0..K+1} 2^i = 2^(K+2) - 1 (the 2^(K+1) term
is the carry); without the carry it stays below 2^(K+1).

int8 products are treated in sign-magnitude form (16-bit magnitude);
bfloat16 faults act on the mantissa field of the bfloat16-rounded
product (7 stored mantissa bits).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..quantnum import bf16_decode_array, bf16_encode_array

PRODUCT_WIDTH = {"int8": 16, "bfloat16": 7}
NON_CRITICAL_LSBS = {"int8": 2, "bfloat16": 4}

CRITICAL = "critical"
NON_CRITICAL = "non-critical"

SIM = "sim"
WORST = "worst"


@dataclass(frozen=True)
class LogicConeFault:
    """One PE's permanent fault: stuck product bits plus a carry flag."""

    pe: tuple
    cone_bits: tuple  # ((bit_index, stuck_value), ...) sorted by bit
    carry_fault: bool = False

    def __post_init__(self):
        if not self.cone_bits:
            raise ValueError("a fault needs at least one cone bit")
        seen = set()
        for bit, val in self.cone_bits:
            if bit < 0:
                raise ValueError(f"negative bit index {bit}")
            if val not in (0, 1):
                raise ValueError(f"stuck value must be 0 or 1, got {val}")
            if bit in seen:
                raise ValueError(f"duplicate cone bit {bit}")
            seen.add(bit)
        object.__setattr__(
            self, "cone_bits", tuple(sorted((int(b), int(v)) for b, v in self.cone_bits))
        )

    @property
    def max_bit(self) -> int:
        return self.cone_bits[-1][0]

    @property
    def signature(self):
        """Hashable key identifying the fault's effect (site-independent)."""
        return (self.cone_bits, self.carry_fault)


def worst_case_error(k: int) -> int:
    """Error bound for faults on bits <= k with carry: 2^(k+2) - 1."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return (1 << (k + 2)) - 1


def _check_width(fault: LogicConeFault, fmt: str):
    width = PRODUCT_WIDTH[fmt]
    if fault.max_bit >= width:
        raise ValueError(
            f"cone bit {fault.max_bit} outside {fmt} product width {width}"
        )


def classify(fault: LogicConeFault, fmt: str = "int8") -> str:
    """Critical unless every cone bit sits in the format's tolerated LSBs.

    int8 tolerates bits {0,1}, bfloat16 the 4 mantissa LSBs; the carry
    term of a tolerated fault perturbs one bit above the window, which
    stays within the next bit's bound, so carry does not make a fault
    critical on its own.
    """
    _check_width(fault, fmt)
    return NON_CRITICAL if fault.max_bit < NON_CRITICAL_LSBS[fmt] else CRITICAL


def apply_fault_to_products(products, fault: LogicConeFault, fmt: str = "int8",
                            mode: str = SIM, rng=None):
    """Vectorized faulty product values for an array of exact products."""
    if mode not in (SIM, WORST):
        raise ValueError(f"mode must be '{SIM}' or '{WORST}'")
    _check_width(fault, fmt)
    if fmt == "int8":
        return _apply_int8(np.asarray(products), fault, mode, rng)
    return _apply_bf16(np.asarray(products, dtype=np.float64), fault, mode, rng)


def _carry_signs(error, shape, mode, rng):
    if mode == WORST:
        # push the error further from zero; +1 on ties
        return np.where(error < 0, -1, 1)
    if rng is None:
        raise ValueError("simulation mode needs an rng for the carry sign")
    return rng.integers(0, 2, size=shape) * 2 - 1


def _apply_int8(p, fault, mode, rng):
    p = p.astype(np.int64)
    mag = np.abs(p)
    for bit, val in fault.cone_bits:
        mag = mag | (1 << bit) if val else mag & ~np.int64(1 << bit)
    q = np.where(p < 0, -mag, mag)
    if fault.carry_fault:
        carry = 1 << (fault.max_bit + 1)
        q = q + _carry_signs(q - p, p.shape, mode, rng) * carry
    return q


def _apply_bf16(p, fault, mode, rng):
    bits = bf16_encode_array(p).astype(np.int64)
    man = bits & 0x7F
    stuck = man.copy()
    for bit, val in fault.cone_bits:
        stuck = stuck | (1 << bit) if val else stuck & ~np.int64(1 << bit)
    if fault.carry_fault:
        carry = 1 << (fault.max_bit + 1)
        stuck = stuck + _carry_signs(stuck - man, man.shape, mode, rng) * carry
        stuck = np.clip(stuck, 0, 0x7F)
    out = (bits & ~np.int64(0x7F)) | stuck
    return bf16_decode_array(out.astype(np.uint16)).astype(np.float64)


def faulty_mac(x, w, fault: LogicConeFault | None = None, fmt: str = "int8",
               mode: str = SIM, rng=None):
    """Single multiply through a (possibly faulty) MAC; the scalar reference."""
    if fmt == "int8":
        product = int(x) * int(w)
        if fault is None:
            return product
        return int(apply_fault_to_products(np.array([product]), fault, fmt, mode, rng)[0])
    product = float(x) * float(w)
    if fault is None:
        return product
    return float(apply_fault_to_products(np.array([product]), fault, fmt, mode, rng)[0])
