import math
import threading

import pytest
from hypothesis import given, strategies as st

from qpos import qseries
from qpos.qpoly import ONE, ZERO, Polynomial
from qpos.qseries import (
    legendre3,
    pochhammer,
    qbinom,
    qbinom_quotient,
    qtrinom,
    triangular,
)


def test_small_binomials():
    assert qbinom(2, 1) == Polynomial([1, 1])
    assert qbinom(4, 2) == Polynomial([1, 1, 2, 1, 1])
    assert qbinom(5, 0) == ONE
    assert qbinom(3, 4) == ZERO
    assert qbinom(3, -1) == ZERO
    assert qbinom(2, 1, d=3) == Polynomial([1, 0, 0, 1])


def test_pochhammer():
    assert pochhammer(0) == ONE
    assert pochhammer(2) == Polynomial([1, -1, -1, 1])
    assert pochhammer(1, d=2) == Polynomial([1, 0, -1])
    with pytest.raises(ValueError):
        pochhammer(-1)
    with pytest.raises(ValueError):
        pochhammer(2, d=0)


@given(st.integers(1, 30), st.integers(0, 30))
def test_pascal_recurrence(m, n):
    lhs = qbinom(m, n)
    assert lhs == qbinom(m - 1, n - 1) + qbinom(m - 1, n).shift(n)
    assert lhs == qbinom(m - 1, n) + qbinom(m - 1, n - 1).shift(m - n)


@given(st.integers(0, 30), st.integers(0, 30))
def test_symmetry_and_palindrome(m, n):
    p = qbinom(m, n)
    assert p == qbinom(m, m - n)
    if n <= m:
        assert p.degree == n * (m - n)
        assert p.coeffs == p.coeffs[::-1]
        assert p(1) == math.comb(m, n)
        assert p.min_coeff() > 0


@given(st.integers(0, 16), st.integers(0, 16), st.integers(1, 3))
def test_quotient_route_agrees(m, n, d):
    assert qbinom(m, n, d) == qbinom_quotient(m, n, d)


def test_large_row_does_not_hit_recursion_limit():
    p = qbinom(700, 3)
    assert p(1) == math.comb(700, 3)


@given(st.integers(0, 10), st.integers(0, 10), st.integers(0, 10))
def test_trinomial_symmetry(L, m, k):
    assert qtrinom(L, m, k) == qtrinom(L, k, m)
    if m + k <= L:
        assert qtrinom(L, m, k)(1) == math.factorial(L) // (
            math.factorial(m) * math.factorial(k) * math.factorial(L - m - k))
    else:
        assert qtrinom(L, m, k) == ZERO


def test_triangular_and_legendre():
    assert [triangular(j) for j in range(5)] == [0, 1, 3, 6, 10]
    assert all(triangular(-1 - j) == triangular(j) for j in range(-5, 6))
    assert [legendre3(j) for j in range(-3, 6)] == [0, 1, -1, 0, 1, -1, 0, 1, -1]


def test_cache_size_can_be_changed():
    try:
        qseries.set_cache_size(8)
        qbinom(20, 10)
        assert qseries.cache_info().maxsize == 8
        assert qseries.cache_info().currsize <= 8
        assert qbinom(20, 10)(1) == math.comb(20, 10)
    finally:
        qseries.set_cache_size(qseries.DEFAULT_CACHE_SIZE)


def test_threads_see_the_same_values():
    expected = {m: qbinom_quotient(m, m // 2) for m in range(30, 40)}
    results = {}

    def work(m):
        results[m] = qbinom(m, m // 2)

    threads = [threading.Thread(target=work, args=(m,)) for m in expected]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert results == expected
