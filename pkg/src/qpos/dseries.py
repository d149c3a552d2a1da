"""Hook-difference polynomials D_{K,i}(N,M; alpha, beta) and G(N,M; alpha, beta, K).

``alpha`` and ``beta`` are exact :class:`fractions.Fraction` values.  Every
exponent is computed in rationals and must come out integral.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from qpos.errors import NonIntegralExponent, ParameterError
from qpos.qpoly import ZERO, Polynomial, poly_add, poly_shift
from qpos.qseries import qbinom

RationalLike = Union[int, str, Fraction]


def as_rational(x: RationalLike) -> Fraction:
    """Parse ``3``, ``"4/3"`` or a Fraction exactly (floats are rejected)."""
    if isinstance(x, float):
        raise TypeError("floating-point parameters are not accepted; use 'a/b'")
    if isinstance(x, str):
        x = x.strip()
        if not x or any(ch in x for ch in ".eE"):
            raise ParameterError(f"expected an integer or fraction 'a/b', got {x!r}")
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"expected an integer or fraction 'a/b', got {x!r}") from exc


def _integral(x: Fraction, what: str) -> int:
    if x.denominator != 1:
        raise NonIntegralExponent(f"{what} = {x} is not an integer")
    return x.numerator


def fmt_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class DParams:
    """Parameters ``(K, i, N, M, alpha, beta)`` of a D-polynomial.

    Construction checks ``0 < i < K``, ``N, M >= 0``, ``alpha, beta >= 0`` and
    that ``alpha*K, beta*K, alpha*i, beta*i`` are integers.
    """

    K: int
    i: int
    N: int
    M: int
    alpha: Fraction
    beta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_rational(self.alpha))
        object.__setattr__(self, "beta", as_rational(self.beta))
        for name in ("K", "i", "N", "M"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise ParameterError(f"{name} must be an integer, got {v!r}")
        if not 0 < self.i < self.K:
            raise ParameterError(f"need 0 < i < K, got K={self.K}, i={self.i}")
        if self.N < 0 or self.M < 0:
            raise ParameterError(f"need N, M >= 0, got N={self.N}, M={self.M}")
        if self.alpha < 0 or self.beta < 0:
            raise ParameterError(f"need alpha, beta >= 0, got {self.alpha}, {self.beta}")
        for name, v in (("alpha*K", self.alpha * self.K), ("beta*K", self.beta * self.K),
                        ("alpha*i", self.alpha * self.i), ("beta*i", self.beta * self.i)):
            if v.denominator != 1:
                raise ParameterError(f"{name} = {v} must be an integer")

    @property
    def key(self) -> str:
        return (f"D|K={self.K}|i={self.i}|N={self.N}|M={self.M}"
                f"|alpha={fmt_rational(self.alpha)}|beta={fmt_rational(self.beta)}")

    def mirrored(self) -> "DParams":
        """Parameters of the mirror image ``D_{K,K-i}(M,N; beta, alpha)``."""
        return DParams(self.K, self.K - self.i, self.M, self.N, self.beta, self.alpha)

    def sort_key(self):
        return (self.K, self.i, self.alpha, self.beta, self.N, self.M)


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def d_terms(K: int, i: int, N: int, M: int, alpha: RationalLike, beta: RationalLike):
    """Yield ``(j, exponent1, exponent2)`` for every j that can contribute.

    The binomials ``[M+N, M-Kj]`` and ``[M+N, M-Kj-i]`` both vanish outside
    ``-N-i <= Kj <= M``.
    """
    a, b = as_rational(alpha), as_rational(beta)
    s = a + b
    for j in range(_ceil_div(-N - i, K), M // K + 1):
        e1 = _integral(j * (s * K * j + K * b - s * i), f"first exponent at j={j}")
        e2 = _integral((s * j + b) * (K * j + i), f"second exponent at j={j}")
        yield j, e1, e2


def d_sum(K: int, i: int, N: int, M: int, alpha: RationalLike, beta: RationalLike,
          base: int = 1) -> Polynomial:
    """Evaluate the alternating D-sum with no parameter-regime checks.

    Accepts a negative N or M as long as ``N + M >= 0`` (the binomials then
    simply vanish where out of range); used by the lift verifiers.  With
    ``base = d`` the result is the same sum in the variable ``q^d``.
    """
    if K < 1:
        raise ParameterError(f"need K >= 1, got {K}")
    if N + M < 0:
        return ZERO
    total = ZERO
    L = N + M
    for j, e1, e2 in d_terms(K, i, N, M, alpha, beta):
        t1 = qbinom(L, M - K * j)
        t2 = qbinom(L, M - K * j - i)
        if t1:
            total = poly_add(total, poly_shift(t1, e1))
        if t2:
            total = poly_add(total, -poly_shift(t2, e2))
    return total.substitute_power(base) if base != 1 else total


def d_poly(p: DParams) -> Polynomial:
    """``D_{K,i}(N,M; alpha, beta)`` as an exact polynomial in q."""
    return d_sum(p.K, p.i, p.N, p.M, p.alpha, p.beta)


def g_params(N: int, M: int, alpha: RationalLike, beta: RationalLike, K: int) -> DParams:
    """The D-parameters ``(2K, K, N, M, alpha, beta)`` behind ``G(N,M; alpha, beta, K)``."""
    if not isinstance(K, int) or K < 1:
        raise ParameterError(f"need K >= 1, got {K!r}")
    return DParams(2 * K, K, N, M, alpha, beta)


def g_sum(N: int, M: int, alpha: RationalLike, beta: RationalLike, K: int) -> Polynomial:
    """The single alternating sum ``sum_j (-1)^j q^{K j((a+b)j + a - b)/2} [M+N, N-Kj]``."""
    if N + M < 0:
        return ZERO
    a, b = as_rational(alpha), as_rational(beta)
    total = ZERO
    L = N + M
    for j in range(_ceil_div(-M, K), N // K + 1):
        e = _integral(Fraction(K * j) * ((a + b) * j + a - b) / 2, f"exponent at j={j}")
        t = qbinom(L, N - K * j)
        if t:
            t = poly_shift(t, e)
            total = poly_add(total, -t if j % 2 else t)
    return total


def g_poly(N: int, M: int, alpha: RationalLike, beta: RationalLike, K: int,
           verify: bool = False) -> Polynomial:
    """``G(N,M; alpha, beta, K) = D_{2K,K}(N,M; alpha, beta)``.

    Evaluated through the single alternating sum; ``verify=True`` also
    evaluates the D form and raises AssertionError if they differ.
    """
    p = g_params(N, M, alpha, beta, K)
    result = g_sum(N, M, p.alpha, p.beta, K)
    if verify:
        other = d_poly(p)
        if other != result:
            raise AssertionError(f"G-sum and D-sum disagree at {p.key}")
    return result


class RegimeKind(str, enum.Enum):
    COR_1_2 = "COR_1_2"
    CONJ_1_3 = "CONJ_1_3"
    CONJ_2_1 = "CONJ_2_1"


@dataclass(frozen=True)
class Regime:
    kind: RegimeKind
    satisfied: bool
    violated_condition: Optional[str] = None


def validate(p: DParams, kind: Union[RegimeKind, str]) -> Regime:
    """Check exactly whether ``p`` lies in the named positivity regime."""
    kind = RegimeKind(kind)
    K, i, a, b = p.K, p.i, p.alpha, p.beta
    s = a + b
    diff = p.N - p.M

    def fail(msg):
        return Regime(kind, False, msg)

    if kind is RegimeKind.COR_1_2:
        if a.denominator != 1 or b.denominator != 1:
            return fail("alpha and beta must be integers")
        lo, hi = b - i, K - a - i
        if not 1 <= s <= K - 1:
            return fail(f"1 <= alpha+beta <= K-1 fails (alpha+beta = {s})")
    elif kind is RegimeKind.CONJ_2_1:
        lo, hi = b - i, K - a - i
        if not 1 <= s <= K - 1:
            return fail(f"1 <= alpha+beta <= K-1 fails (alpha+beta = {s})")
        if K == 4 and i == 2 and not 1 < s < 3:
            return fail("strict inequality at K=4, i=2")
    else:
        if K != 2 * i:
            return fail(f"not a G-instance: K={K} != 2i={2 * i}")
        KG = i
        lo, hi = b - KG, KG - a
        if not 1 <= s <= 2 * KG - 1:
            return fail(f"1 <= alpha+beta <= 2K-1 fails (alpha+beta = {s})")
        if KG == 2 and not 1 < s < 3:
            return fail("strict inequality at K=2")
    if not lo <= diff <= hi:
        return fail(f"{fmt_rational(lo)} <= N-M <= {fmt_rational(hi)} fails (N-M = {diff})")
    return Regime(kind, True)


def check_symmetry(p: DParams) -> bool:
    """Whether ``D_{K,i}(N,M; a, b) == D_{K,K-i}(M,N; b, a)``."""
    return d_poly(p) == d_poly(p.mirrored())
