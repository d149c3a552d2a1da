"""Positivity-preserving kernels and the lift identities built on them.

Five kernels are provided (see :class:`KernelKind`).  Each one turns a
family of q-binomials indexed by a summation variable into a single
q-binomial in a larger parameter L, and every kernel has non-negative
coefficients, so a non-negative family stays non-negative after the sum.

A *lift* applies a kernel to a whole D-polynomial family.  :class:`Family`
describes how ``(N, M)`` depend on the summation index, and
:func:`lift_family` gives the resulting family together with the power of q
that appears as a prefactor.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Tuple

from qpos.dseries import as_rational, d_sum, fmt_rational
from qpos.errors import OutOfDomain, ParameterError, ParityError
from qpos.qpoly import ONE, ZERO, Polynomial, poly_div_exact, poly_shift
from qpos.qseries import pochhammer, qbinom, qtrinom, triangular


class KernelKind(str, enum.Enum):
    C = "C"
    O = "O"
    W = "W"
    A = "A"
    ATILDE = "ATILDE"


def _one_minus(e: int) -> Polynomial:
    if e == 0:
        return ZERO
    return Polynomial.monomial(0) - Polynomial.monomial(e)


def kernel(kind, L: int, k: int) -> Polynomial:
    """Kernel polynomial ``kind_{L,k}(q)``.

    C, O and W are sums over m of q-powers times q-trinomials.  A and ATILDE
    are quotients of Pochhammer products evaluated by exact division.
    """
    kind = KernelKind(kind)
    if L < 0 or k < 0:
        return ZERO
    if kind is KernelKind.C:
        return _sum_over_m(L, lambda m: triangular(m) + triangular(m + k), k)
    if kind is KernelKind.O:
        return _sum_over_m(L, lambda m: 2 * triangular(k) + 2 * triangular(m + k), 2 * k + 1)
    if kind is KernelKind.W:
        return _sum_over_m(L, lambda m: k * k + (m + k) ** 2, 2 * k)
    if kind is KernelKind.A:
        r = k
        if 3 * r > L:
            return ZERO
        if L == 0:
            # 0/0 limit: (q^3;q^3)_{-1} (1 - q^0) -> 1
            return ONE
        num = pochhammer(L - r - 1, 3) * _one_minus(2 * L)
        den = pochhammer(2 * r, 3) * pochhammer(L - 3 * r)
        return poly_shift(poly_div_exact(num, den), 3 * r * r)
    r = k
    if 3 * r + 1 > L:
        return ZERO
    num = pochhammer(L - r - 1, 3) * _one_minus(2 * L + 1)
    den = pochhammer(2 * r + 1, 3) * pochhammer(L - 3 * r - 1)
    return poly_shift(poly_div_exact(num, den), 3 * r * r + 3 * r)


def _sum_over_m(L, exponent, k2):
    total = ZERO
    for m in range(0, L - k2 + 1):
        total = total + poly_shift(qtrinom(L, m, k2), exponent(m))
    return total


def kernel_range(kind, L: int) -> range:
    """Summation indices k for which ``kernel(kind, L, k)`` can be non-zero."""
    kind = KernelKind(kind)
    if L < 0:
        return range(0)
    top = {
        KernelKind.C: L,
        KernelKind.O: (L - 1) // 2,
        KernelKind.W: L // 2,
        KernelKind.A: L // 3,
        KernelKind.ATILDE: (L - 1) // 3,
    }[kind]
    return range(0, top + 1)


def f_poly(L: int, r: int) -> Polynomial:
    """``(q^3;q^3)_{(L-r-2)/2} (1 - q^L) / ((q^3;q^3)_r (q;q)_{(L-3r)/2})``.

    Defined for ``0 <= 3r <= L`` with ``r = L (mod 2)``.  ``L = r = 0`` would
    need a Pochhammer product of length -1 and is rejected.
    """
    if r < 0 or 3 * r > L:
        raise OutOfDomain(f"need 0 <= 3r <= L, got L={L}, r={r}")
    if (L - r) % 2:
        raise ParityError(f"need r = L (mod 2), got L={L}, r={r}")
    if L - r - 2 < 0:
        raise OutOfDomain(f"f_{{{L},{r}}} needs a Pochhammer product of negative length")
    num = pochhammer((L - r - 2) // 2, 3) * _one_minus(L)
    den = pochhammer(r, 3) * pochhammer((L - 3 * r) // 2)
    return poly_div_exact(num, den)


def transform_sides(kind: KernelKind, L: int, a: int):
    """Left-hand sum and right-hand side of the kernel's transformation at shift a."""
    lhs = ZERO
    for k in kernel_range(kind, L):
        if kind is KernelKind.C:
            b = qbinom(k, (k - a) // 2)
        elif kind is KernelKind.O:
            b = qbinom(2 * k + 1, k - a)
        elif kind is KernelKind.W:
            b = qbinom(2 * k, k - a)
        elif kind is KernelKind.A:
            b = qbinom(2 * k, k - a, 3)
        else:
            b = qbinom(2 * k + 1, k - a, 3)
        if b:
            lhs = lhs + kernel(kind, L, k) * b
    if kind is KernelKind.C:
        rhs = poly_shift(qbinom(2 * L + 1, L - a), triangular(a))
    elif kind is KernelKind.O:
        rhs = poly_shift(qbinom(2 * L, L - 2 * a - 1), 4 * triangular(a))
    elif kind is KernelKind.W:
        rhs = poly_shift(qbinom(2 * L, L - 2 * a), 2 * a * a)
    elif kind is KernelKind.A:
        rhs = poly_shift(qbinom(2 * L, L - 3 * a), 3 * a * a)
    else:
        rhs = poly_shift(qbinom(2 * L + 1, L - 3 * a - 1), 3 * a * a + 3 * a)
    return lhs, rhs


def verify_transform(kind, L: int, a: int) -> bool:
    """Check the kernel's transformation identity exactly at ``(L, a)``."""
    lhs, rhs = transform_sides(KernelKind(kind), L, a)
    return lhs == rhs


def transform_support(kind, L: int) -> range:
    """Shifts a for which the right-hand q-binomial is non-zero."""
    kind = KernelKind(kind)
    if kind is KernelKind.C:
        return range(-L - 1, L + 1)
    if kind is KernelKind.O:
        return range(-((L + 1) // 2), (L - 1) // 2 + 1)
    if kind is KernelKind.W:
        return range(-(L // 2), L // 2 + 1)
    if kind is KernelKind.A:
        return range(-(L // 3), L // 3 + 1)
    return range(-((L + 2) // 3), (L - 1) // 3 + 1)


# -- D-families and lifts -----------------------------------------------------


class Shape(str, enum.Enum):
    """How ``(N, M)`` depend on the size index L for a given shift c.

    HALF: ``(ceil((L+c)/2), floor((L-c)/2))`` with ``N + M = L``
    ODD:  ``(L + 1 + c, L - c)`` with ``N + M = 2L + 1``
    EVEN: ``(L + c, L - c)`` with ``N + M = 2L``
    """

    HALF = "HALF"
    ODD = "ODD"
    EVEN = "EVEN"


@dataclass(frozen=True)
class Family:
    """A one-parameter family ``L -> D_{K,i}(N(L), M(L); alpha, beta)``."""

    K: int
    i: int
    shape: Shape
    shift: int
    alpha: Fraction
    beta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "shape", Shape(self.shape))
        object.__setattr__(self, "alpha", as_rational(self.alpha))
        object.__setattr__(self, "beta", as_rational(self.beta))
        if not isinstance(self.shift, int):
            shift = as_rational(self.shift)
            if shift.denominator != 1:
                raise ParameterError(f"family shift {shift} is not an integer")
            object.__setattr__(self, "shift", int(shift))

    def sizes(self, L: int) -> Tuple[int, int]:
        c = self.shift
        if self.shape is Shape.HALF:
            return -((-(L + c)) // 2), (L - c) // 2
        if self.shape is Shape.ODD:
            return L + 1 + c, L - c
        return L + c, L - c

    def evaluate(self, L: int, base: int = 1) -> Polynomial:
        N, M = self.sizes(L)
        return d_sum(self.K, self.i, N, M, self.alpha, self.beta, base)

    def describe(self) -> str:
        return (f"K={self.K},i={self.i},{self.shape.value}({self.shift}),"
                f"alpha={fmt_rational(self.alpha)},beta={fmt_rational(self.beta)}")


_INPUT_SHAPE = {
    KernelKind.C: Shape.HALF,
    KernelKind.O: Shape.ODD,
    KernelKind.W: Shape.EVEN,
    KernelKind.A: Shape.EVEN,
    KernelKind.ATILDE: Shape.ODD,
}


def lift_family(kind, fam: Family) -> Tuple[Family, int]:
    """Family produced by summing ``kernel(kind, L, k) * fam(k)`` over k.

    Returns ``(new_family, prefactor)`` with the identity
    ``sum_k kernel_{L,k} fam(k) = q^prefactor new_family(L)``; for A and
    ATILDE ``fam`` is evaluated in ``q^3``.
    """
    kind = KernelKind(kind)
    if fam.shape is not _INPUT_SHAPE[kind]:
        raise ParameterError(f"kernel {kind.value} needs a {_INPUT_SHAPE[kind].value} family")
    K, i, a, b, c = fam.K, fam.i, fam.alpha, fam.beta, fam.shift
    if kind is KernelKind.C:
        beta = (b + 2 * c + 1 + 2 * i) / 2
        alpha = (a - 2 * c - 1 - 2 * i + 2 * K) / 2
        return Family(2 * K, 2 * i, Shape.ODD, c, alpha, beta), triangular(c)
    if kind is KernelKind.O:
        beta = (b + 4 * c + 2 + 2 * i) / 2
        alpha = (a - 4 * c - 2 - 2 * i + 2 * K) / 2
        return Family(2 * K, 2 * i, Shape.EVEN, 2 * c + 1, alpha, beta), 4 * triangular(c)
    if kind is KernelKind.W:
        beta = (b + 4 * c + 2 * i) / 2
        alpha = (a - 4 * c + 2 * K - 2 * i) / 2
        return Family(2 * K, 2 * i, Shape.EVEN, 2 * c, alpha, beta), 2 * c * c
    if kind is KernelKind.A:
        return (Family(3 * K, 3 * i, Shape.EVEN, 3 * c, a - 2 * c + K - i, b + 2 * c + i),
                3 * c * c)
    beta = b + 2 * c + 1 + i
    alpha = a + K - 2 * c - 1 - i
    return Family(3 * K, 3 * i, Shape.ODD, 3 * c + 1, alpha, beta), 3 * c * c + 3 * c


def lift_sum(kind, fam: Family, L: int) -> Polynomial:
    """``sum_k kernel(kind, L, k) * fam(k)``, with fam in ``q^3`` for A/ATILDE."""
    kind = KernelKind(kind)
    base = 3 if kind in (KernelKind.A, KernelKind.ATILDE) else 1
    total = ZERO
    for k in kernel_range(kind, L):
        term = fam.evaluate(k, base)
        if term:
            total = total + kernel(kind, L, k) * term
    return total


@dataclass(frozen=True)
class LiftInstance:
    """A concrete lift identity ``sum_k kernel_{L,k} lhs(k) = q^prefactor rhs(L)``."""

    id: str
    kernel: KernelKind
    lhs: Family
    rhs: Family
    prefactor: int

    def describe(self) -> str:
        return (f"{self.id}: sum {self.kernel.value}_L,k * D[{self.lhs.describe()}](k)"
                f" = q^{self.prefactor} D[{self.rhs.describe()}](L)")


def verify_lift(inst: LiftInstance, L: int) -> bool:
    """Exact check of the instance at size L."""
    lhs = lift_sum(inst.kernel, inst.lhs, L)
    rhs = poly_shift(inst.rhs.evaluate(L), inst.prefactor)
    return lhs == rhs


def _F(x) -> Fraction:
    return Fraction(x)


def _req(params, *names):
    missing = [n for n in names if n not in params]
    if missing:
        raise ParameterError(f"missing parameters: {', '.join(missing)}")
    return [params[n] for n in names]


def _thm22_rules(p, pp, r, s):
    if not (0 < p < pp and 0 < r < p and 0 < s < pp):
        raise ParameterError(f"need 0 < r < p < p' and 0 < s < p', got p={p}, p'={pp}, r={r}, s={s}")


def _inst_4_1(params):
    p, pp, r, s = _req(params, "p", "pp", "r", "s")
    _thm22_rules(p, pp, r, s)
    lhs = Family(pp, s, Shape.HALF, r - s, p - r, r)
    rhs = Family(2 * pp, 2 * s, Shape.ODD, r - s, _F(2 * pp - 1 - 3 * r + p) / 2, _F(3 * r + 1) / 2)
    return LiftInstance("4.1", KernelKind.C, lhs, rhs, triangular(r - s))


def _inst_4_2(params):
    p, pp, r, s = _req(params, "p", "pp", "r", "s")
    _thm22_rules(p, pp, r, s)
    lhs = _inst_4_1(params).rhs
    rhs = Family(4 * pp, 4 * s, Shape.EVEN, 1 + 2 * r - 2 * s,
                 _F(10 * pp - 5 - 11 * r + p) / 4, _F(11 * r + 5) / 4)
    return LiftInstance("4.2", KernelKind.O, lhs, rhs, 4 * triangular(r - s))


def _inst_4_4(params):
    K, i, a, alpha, beta = _req(params, "K", "i", "a", "alpha", "beta")
    alpha, beta = as_rational(alpha), as_rational(beta)
    lhs = Family(K, i, Shape.EVEN, a, alpha, beta)
    rhs = Family(2 * K, 2 * i, Shape.EVEN, 2 * a,
                 (alpha - 4 * a + 2 * K - 2 * i) / 2, (beta + 4 * a + 2 * i) / 2)
    return LiftInstance("4.4", KernelKind.W, lhs, rhs, 2 * a * a)


def _inst_4_9(params):
    nu, s = _req(params, "nu", "s")
    if not (nu >= 1 and 0 <= s <= nu - 1):
        raise ParameterError(f"need nu >= 1 and 0 <= s <= nu-1, got nu={nu}, s={s}")
    KG = 2 * nu + 1
    lhs = Family(2 * KG, KG, Shape.ODD, -s - 1,
                 _F(2 * (nu + 1) * (nu + s + 1)) / KG, _F(2 * (nu + 1) * (nu - s)) / KG)
    KG2 = 4 * nu + 2
    rhs = Family(2 * KG2, KG2, Shape.EVEN, -2 * s - 1,
                 _F((5 * nu + 3) * (nu + s + 1)) / KG, _F((5 * nu + 3) * (nu - s)) / KG)
    return LiftInstance("4.9(thm2.5 base)", KernelKind.O, lhs, rhs, 4 * triangular(s))


def _inst_4_11(params):
    K, i, a, alpha, beta = _req(params, "K", "i", "a", "alpha", "beta")
    alpha, beta = as_rational(alpha), as_rational(beta)
    lhs = Family(K, i, Shape.EVEN, a, alpha, beta)
    rhs = Family(3 * K, 3 * i, Shape.EVEN, 3 * a, alpha - 2 * a + K - i, beta + 2 * a + i)
    return LiftInstance("4.11", KernelKind.A, lhs, rhs, 3 * a * a)


def _inst_4_15(params):
    p, pp, r, s = _req(params, "p", "pp", "r", "s")
    _thm22_rules(p, pp, r, s)
    lhs = _inst_4_1(params).rhs
    rhs = Family(6 * pp, 6 * s, Shape.ODD, 1 + 3 * r - 3 * s,
                 _F(6 * pp - 3 - 7 * r + p) / 2, _F(7 * r + 3) / 2)
    return LiftInstance("4.15", KernelKind.ATILDE, lhs, rhs, 3 * (r - s) ** 2 + 3 * (r - s))


def family_4_17(p, pp, r, s, t) -> Family:
    """``t``-fold ATILDE iteration of the C-lifted base family (closed form).

    The p' coefficient of alpha is ``2 * 3**t``, which is what the lift rule
    produces; the shorter form ``4t + 2`` agrees with it only for t <= 1.
    """
    T = 3**t
    return Family(T * 2 * pp, T * 2 * s, Shape.ODD, (T - 1) // 2 + T * (r - s),
                  _F(2 * T * pp - T - (2 * T + 1) * r + p) / 2, _F((2 * T + 1) * r + T) / 2)


def family_4_19(p, pp, r, s, t) -> Family:
    T = 3**t
    return Family(T * 4 * pp, T * 4 * s, Shape.EVEN, T + T * 2 * (r - s),
                  _F(10 * T * pp - 5 * T - (10 * T + 1) * r + p) / 4,
                  _F((10 * T + 1) * r + 5 * T) / 4)


def _inst_4_16(params):
    p, pp, r, s = _req(params, "p", "pp", "r", "s")
    _thm22_rules(p, pp, r, s)
    lhs = family_4_17(p, pp, r, s, 0)
    rhs = family_4_17(p, pp, r, s, 1)
    c = lhs.shift
    return LiftInstance("4.16", KernelKind.ATILDE, lhs, rhs, 3 * c * c + 3 * c)


def _inst_4_17(params):
    # one ATILDE step between consecutive members of the closed form
    p, pp, r, s = _req(params, "p", "pp", "r", "s")
    _thm22_rules(p, pp, r, s)
    t = params.get("t", 0)
    if t < 0:
        raise ParameterError(f"need t >= 0, got {t}")
    lhs = family_4_17(p, pp, r, s, t)
    c = lhs.shift
    return LiftInstance("4.17", KernelKind.ATILDE, lhs, family_4_17(p, pp, r, s, t + 1),
                        3 * c * c + 3 * c)


def _inst_4_18(params):
    p, pp, r, s = _req(params, "p", "pp", "r", "s")
    _thm22_rules(p, pp, r, s)
    t = params.get("t", 0)
    if t < 0:
        raise ParameterError(f"need t >= 0, got {t}")
    T = 3**t
    x = (T - 1) // 2 + T * (r - s)
    return LiftInstance("4.18", KernelKind.O, family_4_17(p, pp, r, s, t),
                        family_4_19(p, pp, r, s, t), 2 * x * x + 2 * x)


def _inst_4_20(params):
    p, pp, r, s = _req(params, "p", "pp", "r", "s")
    _thm22_rules(p, pp, r, s)
    t = params.get("t", 0)
    if t < 0:
        raise ParameterError(f"need t >= 0, got {t}")
    T = 3**t
    rhs = Family(T * 8 * pp, T * 8 * s, Shape.EVEN, T * 2 + T * 4 * (r - s),
                 _F(42 * T * pp - 21 * T - (42 * T + 1) * r + p) / 8,
                 _F((42 * T + 1) * r + 21 * T) / 8)
    return LiftInstance("4.20", KernelKind.W, family_4_19(p, pp, r, s, t), rhs,
                        2 * (T + T * 2 * (r - s)) ** 2)


def family_4_22(p, pp, r, s, t, n) -> Family:
    """Closed form after the O lift and ``n - 2`` W lifts of the ATILDE chain."""
    T = 3**t
    P = 2**n
    alpha = _F((2 ** (2 * n + 1) - 2) // 3 * T * pp - (4**n - 1) // 3 * T
               - ((2 ** (2 * n + 1) - 2) // 3 * T + 1) * r + p) / P
    beta = _F(((2 ** (2 * n + 1) - 2) // 3 * T + 1) * r + (4**n - 1) // 3 * T) / P
    return Family(T * P * pp, T * P * s, Shape.EVEN,
                  T * 2 ** (n - 2) + T * 2 ** (n - 1) * (r - s), alpha, beta)


def _inst_4_22(params):
    p, pp, r, s = _req(params, "p", "pp", "r", "s")
    _thm22_rules(p, pp, r, s)
    t = params.get("t", 0)
    n = params.get("n", 3)
    if t < 0 or n < 3:
        raise ParameterError(f"need t >= 0 and n >= 3, got t={t}, n={n}")
    lhs = family_4_22(p, pp, r, s, t, n - 1)
    c = lhs.shift
    return LiftInstance("4.22", KernelKind.W, lhs, family_4_22(p, pp, r, s, t, n), 2 * c * c)


LIFT_CATALOG: Dict[str, Callable[[dict], LiftInstance]] = {
    "4.1": _inst_4_1,
    "4.2": _inst_4_2,
    "4.4": _inst_4_4,
    "4.9(thm2.5 base)": _inst_4_9,
    "4.11": _inst_4_11,
    "4.15": _inst_4_15,
    "4.16": _inst_4_16,
    "4.17": _inst_4_17,
    "4.18": _inst_4_18,
    "4.20": _inst_4_20,
    "4.22": _inst_4_22,
}


def lift_instance(id: str, **params) -> LiftInstance:
    """Build a catalogued lift identity from its parameter slots.

    ``pp`` stands for p' in the two-parameter families.
    """
    try:
        build = LIFT_CATALOG[id]
    except KeyError:
        raise ParameterError(f"unknown lift id {id!r}; known: {', '.join(LIFT_CATALOG)}") from None
    return build(params)


def iterate_lift(kind, fam: Family, times: int) -> Family:
    """Apply :func:`lift_family` ``times`` times, discarding the prefactors."""
    for _ in range(times):
        fam, _ = lift_family(kind, fam)
    return fam
