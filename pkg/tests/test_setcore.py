import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import is_submodular
from subsup.errors import GroundSetTooLarge, ValidationError
from subsup.instances import random_cut, random_submodular
from subsup.setcore import (CountingOracle, GroundSet, SetFunctionOracle, TableOracle, check_diminishing_returns,
                            check_property, incremental_gain, mask_of, members, popcount)


def test_bit_helpers():
    assert members(0b1011) == [0, 1, 3]
    assert mask_of([0, 1, 3]) == 0b1011
    assert popcount(0b1011) == 3


def test_ground_set_labels():
    g = GroundSet(3, ["a", "b", "c"])
    assert g.full == 7
    assert g.as_mask(["a", "c"]) == 5
    assert g.as_mask(5) == 5
    with pytest.raises(ValidationError):
        g.as_mask(8)
    with pytest.raises(ValidationError):
        GroundSet(2, ["a", "a"])


def test_normalization_subtracts_empty_value():
    f = SetFunctionOracle(GroundSet(2), lambda m: 3.0 + bin(m).count("1"))
    assert f.offset == 3.0
    assert f(0) == 0.0
    assert f([0, 1]) == 2.0


def test_table_is_read_only():
    t = TableOracle([0, 1, 1, 1.5]).table()
    with pytest.raises(ValueError):
        t[0] = 2.0


def test_arithmetic_and_minor():
    f = random_cut(4, 1)
    g = random_submodular(4, 2)
    d = f - 2 * g
    for m in range(16):
        assert d._value(m) == pytest.approx(f._value(m) - 2 * g._value(m), abs=1e-12)
    mn = f.minor([1, 3], forced=0b0001)
    for m in range(4):
        full = 0b0001 | (m & 1) << 1 | (m >> 1 & 1) << 3
        assert mn._value(m) == pytest.approx(f._value(full) - f._value(0b0001), abs=1e-12)


def test_incremental_gain():
    f = TableOracle([0, 1, 2, 2.5])
    assert incremental_gain(f, [0], 1) == pytest.approx(1.5)
    with pytest.raises(ValidationError):
        incremental_gain(f, [0], 0)


def test_counting_oracle():
    c = CountingOracle(random_cut(3, 0))
    for m in range(8):
        c._value(m)
    assert c.calls == 8


def test_property_witnesses_on_supermodular():
    # f(S) = |S|^2 is strictly supermodular
    f = TableOracle([bin(m).count("1") ** 2 for m in range(8)])
    rep = check_property(f, "submodular")
    assert not rep.holds
    a, b, lhs, rhs = rep.violations[0]
    assert lhs < rhs
    assert check_property(-f, "submodular").holds


def test_symmetry_check():
    f = random_cut(5, 3)
    assert check_property(f, "symmetric").holds
    g = f + TableOracle([bin(m).count("1") * 0.1 for m in range(32)])
    assert not check_property(g, "symmetric").holds


def test_size_limits():
    big = SetFunctionOracle(GroundSet(17), lambda m: 0.0)
    with pytest.raises(GroundSetTooLarge):
        check_property(big, "symmetric")
    with pytest.raises(GroundSetTooLarge):
        check_property(SetFunctionOracle(GroundSet(11), lambda m: 0.0), "submodular")
    with pytest.raises(ValidationError):
        check_property(random_cut(3, 0), "convex")


@given(st.integers(3, 6), st.integers(0, 10_000))
def test_checker_agrees_with_reference(n, seed):
    rng = np.random.default_rng(seed)
    vals = list(rng.normal(size=1 << n))
    vals[0] = 0.0
    f = TableOracle(vals)
    assert check_property(f, "submodular").holds == is_submodular(vals, n)
    assert check_diminishing_returns(f).holds == is_submodular(vals, n)


@given(st.integers(3, 7), st.integers(0, 10_000))
def test_random_instances_are_submodular(n, seed):
    f = random_submodular(n, seed)
    assert check_property(f, "submodular", 1e-9).holds
