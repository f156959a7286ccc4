import pickle

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rtdevs.timebase import INFINITY, MAX_TIME, format_seconds, seconds, time_add

finite = st.integers(min_value=0, max_value=2**40)
times = st.one_of(finite, st.just(INFINITY))


def test_time_add_table1_rows():
    assert time_add(seconds("4"), seconds("0.5")) == seconds("4.5")
    assert time_add(seconds("28.5947"), seconds("1")) == seconds("29.5947")
    assert seconds("28.5947") == 28_594_700


def test_time_add_infinity():
    assert time_add(5, INFINITY) is INFINITY
    assert time_add(INFINITY, 5) is INFINITY


def test_time_add_overflow():
    with pytest.raises(OverflowError):
        time_add(MAX_TIME, 1)


@pytest.mark.parametrize("bad", [-1, 1.5, True, "3"])
def test_time_add_rejects_non_times(bad):
    with pytest.raises((TypeError, ValueError)):
        time_add(bad, 0)


def test_infinity_singleton_and_ordering():
    assert INFINITY == INFINITY
    assert pickle.loads(pickle.dumps(INFINITY)) is INFINITY
    assert 10**18 < INFINITY
    assert not INFINITY < INFINITY
    assert min([INFINITY, 3, 7]) == 3
    assert max([INFINITY, 3]) is INFINITY


@given(times, times)
def test_total_order(a, b):
    assert [a < b, a == b, a > b].count(True) == 1


@given(finite, finite, finite)
def test_time_add_associative(a, b, c):
    assert time_add(time_add(a, b), c) == time_add(a, time_add(b, c))


@given(finite)
def test_infinity_above_every_finite(a):
    assert a < INFINITY and INFINITY > a and a != INFINITY


def test_seconds_exact():
    assert seconds("0.000001") == 1
    assert seconds(0.75) == 750_000
    assert seconds(2) == 2_000_000
    with pytest.raises(ValueError):
        seconds("0.0000001")
    with pytest.raises(ValueError):
        seconds("nan")


@given(st.integers(min_value=0, max_value=10**15))
def test_format_seconds_roundtrip(us):
    assert seconds(format_seconds(us)) == us
