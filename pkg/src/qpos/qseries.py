"""q-series building blocks: Pochhammer products and Gaussian binomials."""

from __future__ import annotations

from functools import lru_cache

from qpos.qpoly import ONE, ZERO, Polynomial, poly_div_exact, poly_shift

DEFAULT_CACHE_SIZE = 1 << 16
_DEPTH_STEP = 256


def pochhammer(L: int, d: int = 1) -> Polynomial:
    """``(q^d; q^d)_L``, the product of ``1 - q^(d*k)`` for ``k = 1..L``."""
    if L < 0:
        raise ValueError(f"Pochhammer length must be >= 0, got {L}")
    if d < 1:
        raise ValueError(f"base power must be >= 1, got {d}")
    coeffs = [1]
    for k in range(1, L + 1):
        e = d * k
        new = coeffs + [0] * e
        for t, c in enumerate(coeffs):
            new[t + e] -= c
        coeffs = new
    return Polynomial(coeffs)


def _qbinom_unbounded(m, n):
    # Pascal step: [m, n] = [m-1, n-1] + q^n [m-1, n]
    if n < 0 or n > m:
        return ZERO
    if n == 0 or n == m:
        return ONE
    if n > m - n:
        n = m - n
    return _qbinom_cached(m - 1, n - 1) + poly_shift(_qbinom_cached(m - 1, n), n)


_qbinom_cached = lru_cache(maxsize=DEFAULT_CACHE_SIZE)(_qbinom_unbounded)


def set_cache_size(maxsize: int) -> None:
    """Rebuild the Gaussian-binomial memo with a new LRU entry cap."""
    global _qbinom_cached
    _qbinom_cached = lru_cache(maxsize=maxsize)(_qbinom_unbounded)


def cache_info():
    return _qbinom_cached.cache_info()


def qbinom(m: int, n: int, d: int = 1) -> Polynomial:
    """Gaussian binomial ``[m over n]`` in the variable ``q^d``.

    Zero unless ``m >= n >= 0``.  Computed by the Pascal recurrence with an
    LRU memo shared by all callers in the process.
    """
    if n < 0 or n > m:
        return ZERO
    n = min(n, m - n)
    if n == 0:
        return ONE
    if m > _DEPTH_STEP:
        # fill lower rows first so the recursion depth stays bounded
        for mm in range(_DEPTH_STEP, m, _DEPTH_STEP):
            for k in range(min(n, mm // 2) + 1):
                _qbinom_cached(mm, k)
    p = _qbinom_cached(m, n)
    return p.substitute_power(d) if d != 1 else p


def qbinom_quotient(m: int, n: int, d: int = 1) -> Polynomial:
    """Same value as :func:`qbinom`, via ``(q)_m / ((q)_n (q)_{m-n})``.

    Independent of the memoized recurrence; used as a cross-check.
    """
    if n < 0 or n > m:
        return ZERO
    return poly_div_exact(pochhammer(m, d), pochhammer(n, d) * pochhammer(m - n, d))


def qtrinom(L: int, m: int, k: int, d: int = 1) -> Polynomial:
    """``[L over m, k] = [L over m] [L-m over k]``."""
    if m < 0 or k < 0 or m + k > L:
        return ZERO
    return qbinom(L, m, d) * qbinom(L - m, k, d)


def triangular(j: int) -> int:
    """``T(j) = j(j+1)/2``; note ``T(-1-j) == T(j)``."""
    return j * (j + 1) // 2


def legendre3(j: int) -> int:
    """Legendre symbol ``(j/3)``: 1, -1 or 0 for residues 1, 2, 0 mod 3."""
    return (0, 1, -1)[j % 3]
