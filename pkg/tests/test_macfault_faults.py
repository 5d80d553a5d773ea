"""Logic-cone fault semantics: bounds, classification, exhaustive sweeps."""

import itertools

import numpy as np
import pytest

from faultlab.macfault import (
    LogicConeFault,
    apply_fault_to_products,
    classify,
    faulty_mac,
    worst_case_error,
)


def _signatures(max_bit_incl, carry):
    """All stuck-bit signatures over bits {0..max_bit_incl}."""
    bits = range(max_bit_incl + 1)
    for r in range(1, max_bit_incl + 2):
        for subset in itertools.combinations(bits, r):
            for values in itertools.product((0, 1), repeat=r):
                yield LogicConeFault(
                    pe=(0, 0),
                    cone_bits=tuple(zip(subset, values)),
                    carry_fault=carry,
                )


@pytest.fixture(scope="module")
def all_products():
    x = np.arange(-128, 128, dtype=np.int64)
    return np.multiply.outer(x, x).ravel()


def test_worst_case_error_values():
    assert worst_case_error(2) == 15
    assert worst_case_error(0) == 3
    assert worst_case_error(4) == 63
    with pytest.raises(ValueError):
        worst_case_error(-1)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_exhaustive_max_error_with_carry(all_products, k):
    # max |faulty - exact| over all int8 pairs and all signatures with
    # bits <= k, carry enabled, equals 2^(k+2) - 1 in worst-case mode
    worst = 0
    for fault in _signatures(k, carry=True):
        faulty = apply_fault_to_products(all_products, fault, "int8", mode="worst")
        err = int(np.max(np.abs(faulty - all_products)))
        assert err <= worst_case_error(k)
        worst = max(worst, err)
    assert worst == worst_case_error(k)


@pytest.mark.parametrize("k", [1, 2])
def test_exhaustive_error_without_carry(all_products, k):
    # cone bits < k and no carry: every per-MAC error is below 2^k
    for fault in _signatures(k - 1, carry=False):
        faulty = apply_fault_to_products(all_products, fault, "int8", mode="worst")
        assert int(np.max(np.abs(faulty - all_products))) < 2**k


def test_sim_mode_respects_bound(all_products, rng):
    for fault in _signatures(2, carry=True):
        faulty = apply_fault_to_products(all_products, fault, "int8",
                                         mode="sim", rng=rng)
        assert int(np.max(np.abs(faulty - all_products))) <= worst_case_error(2)


def test_faulty_mac_examples():
    assert faulty_mac(6, 2) == 12
    stuck0 = LogicConeFault(pe=(0, 0), cone_bits=((0, 1),))
    assert faulty_mac(6, 2, stuck0) == 13  # 0b1100 -> 0b1101


def test_fault_on_zero_product():
    stuck = LogicConeFault(pe=(0, 0), cone_bits=((0, 1), (1, 1)))
    assert faulty_mac(0, 5, stuck) == 3


def test_classification_examples():
    non_crit = LogicConeFault(pe=(0, 0), cone_bits=((0, 1), (1, 0)))
    assert classify(non_crit, "int8") == "non-critical"
    crit = LogicConeFault(pe=(0, 0), cone_bits=((7, 1),))
    assert classify(crit, "int8") == "critical"
    bf_ok = LogicConeFault(pe=(0, 0), cone_bits=((0, 1), (3, 0)))
    assert classify(bf_ok, "bfloat16") == "non-critical"
    bf_bad = LogicConeFault(pe=(0, 0), cone_bits=((4, 1),))
    assert classify(bf_bad, "bfloat16") == "critical"
    # carry alone does not make a tolerated fault critical
    with_carry = LogicConeFault(pe=(0, 0), cone_bits=((1, 1),), carry_fault=True)
    assert classify(with_carry, "int8") == "non-critical"


def test_fault_validation():
    with pytest.raises(ValueError):
        LogicConeFault(pe=(0, 0), cone_bits=())
    with pytest.raises(ValueError):
        LogicConeFault(pe=(0, 0), cone_bits=((0, 2),))
    with pytest.raises(ValueError):
        LogicConeFault(pe=(0, 0), cone_bits=((0, 1), (0, 0)))
    wide = LogicConeFault(pe=(0, 0), cone_bits=((16, 1),))
    with pytest.raises(ValueError):
        classify(wide, "int8")
    bf_wide = LogicConeFault(pe=(0, 0), cone_bits=((7, 1),))
    with pytest.raises(ValueError):
        classify(bf_wide, "bfloat16")


def test_bf16_fault_touches_only_mantissa(rng):
    fault = LogicConeFault(pe=(0, 0), cone_bits=((0, 1), (2, 0)))
    products = rng.normal(0, 4, size=500)
    faulty = apply_fault_to_products(products, fault, "bfloat16", mode="worst")
    from faultlab.quantnum import bf16_encode_array

    base = bf16_encode_array(products)
    out = bf16_encode_array(faulty)
    # sign and exponent fields are untouched
    assert np.array_equal(base & 0xFF80, out & 0xFF80)
    assert np.all((out & 0x1) == 1)  # bit 0 stuck at 1
    assert np.all((out & 0x4) == 0)  # bit 2 stuck at 0


def test_bf16_relative_error_bound(rng):
    # masking the 4 mantissa LSBs moves the value by < 2^-3 relative
    for fault in _signatures(3, carry=False):
        products = rng.normal(0, 10, size=200)
        faulty = apply_fault_to_products(products, fault, "bfloat16", mode="worst")
        from faultlab.quantnum import bf16_round_array

        base = bf16_round_array(products).astype(np.float64)
        nonzero = np.abs(base) > 0
        rel = np.abs(faulty[nonzero] - base[nonzero]) / np.abs(base[nonzero])
        assert np.max(rel) < 2.0**-3 + 1e-12
