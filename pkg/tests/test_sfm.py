import pytest
from hypothesis import given, strategies as st

from oracles import brute_min, table_of
from subsup.errors import GroundSetTooLarge, ValidationError
from subsup.instances import random_submodular, random_symmetric
from subsup.setcore import CountingOracle, GroundSet, SetFunctionOracle, TableOracle
from subsup.sfm import (brute_force_minimize, min_norm_minimize, min_norm_point, minimize_proper,
                        queyranne_minimize)


def test_brute_force_modes():
    f = TableOracle([0, -1, 2, 0.5])
    assert brute_force_minimize(f).minimizer == 1
    assert brute_force_minimize(f, "proper-nonempty").value == -1
    with pytest.raises(ValidationError):
        brute_force_minimize(f, "weird")
    with pytest.raises(GroundSetTooLarge):
        brute_force_minimize(SetFunctionOracle(GroundSet(21), lambda m: 0.0))


def test_queyranne_two_elements():
    f = TableOracle([0, 1, 1, 0])
    res = queyranne_minimize(f)
    assert res.minimizer in (1, 2) and res.value == 1


def test_min_norm_point_lies_in_base_polytope():
    g = random_submodular(5, 3)
    x, _, converged = min_norm_point(g)
    assert converged
    assert sum(x) == pytest.approx(g._value(31), abs=1e-9)
    for m in range(32):
        assert sum(x[i] for i in range(5) if m >> i & 1) <= g._value(m) + 1e-8


@given(st.integers(2, 8), st.integers(0, 100_000))
def test_minnorm_matches_reference(n, seed):
    f = random_submodular(n, seed)
    ref = min(table_of(f._value, n))
    assert min_norm_minimize(f).value == pytest.approx(ref, abs=1e-6)


@given(st.integers(2, 8), st.integers(0, 100_000), st.sampled_from(["minnorm", "brute"]))
def test_minimize_proper_matches_reference(n, seed, engine):
    f = random_submodular(n, seed)
    ref, _ = brute_min(table_of(f._value, n), n)
    res = minimize_proper(f, engine)
    assert 0 < res.minimizer < (1 << n) - 1
    assert res.value == pytest.approx(ref, abs=1e-6)


@given(st.integers(2, 8), st.integers(0, 100_000))
def test_queyranne_matches_reference_and_call_bound(n, seed):
    f = random_symmetric(n, seed)
    ref, _ = brute_min(table_of(f._value, n), n)
    counted = CountingOracle(f)
    res = queyranne_minimize(counted)
    assert res.value == pytest.approx(ref, abs=1e-6)
    assert counted.calls <= n ** 3


def test_queyranne_debug_checks_pendant_pairs():
    res = queyranne_minimize(random_symmetric(6, 4), debug=True)
    assert res.converged
