"""Dense Laurent polynomials in one variable q with big-integer coefficients.

A :class:`Polynomial` stores ``coeffs[k]`` as the coefficient of
``q**(offset + k)``.  Values are immutable and always canonical: no zero
coefficient at either end, and the zero polynomial is ``(offset=0, ())``.
"""

from __future__ import annotations

import json
from typing import Iterable, Optional, Tuple

from qpos.errors import NonExactDivision

__all__ = [
    "Polynomial",
    "ZERO",
    "ONE",
    "poly_add",
    "poly_sub",
    "poly_mul",
    "poly_shift",
    "poly_substitute_power",
    "poly_div_exact",
    "first_negative",
]


def _canonical(coeffs, offset):
    lo = 0
    hi = len(coeffs)
    while hi > lo and not coeffs[hi - 1]:
        hi -= 1
    while lo < hi and not coeffs[lo]:
        lo += 1
    if lo == hi:
        return (), 0
    return tuple(coeffs[lo:hi]), offset + lo


class Polynomial:
    __slots__ = ("coeffs", "offset", "_hash")

    def __init__(self, coeffs: Iterable[int] = (), offset: int = 0):
        c, o = _canonical(list(coeffs), int(offset))
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "offset", o)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def _raw(cls, coeffs: tuple, offset: int) -> "Polynomial":
        # caller guarantees canonical form
        p = object.__new__(cls)
        object.__setattr__(p, "coeffs", coeffs)
        object.__setattr__(p, "offset", offset)
        object.__setattr__(p, "_hash", None)
        return p

    @classmethod
    def monomial(cls, exponent: int, coeff: int = 1) -> "Polynomial":
        if not coeff:
            return ZERO
        return cls._raw((coeff,), exponent)

    @classmethod
    def from_dict(cls, terms: dict) -> "Polynomial":
        """Build from ``{exponent: coefficient}``."""
        if not terms:
            return ZERO
        lo = min(terms)
        hi = max(terms)
        c = [0] * (hi - lo + 1)
        for e, v in terms.items():
            c[e - lo] += v
        return cls(c, lo)

    # -- accessors ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    @property
    def degree(self) -> int:
        """Highest exponent present; -1 for the zero polynomial."""
        if not self.coeffs:
            return -1
        return self.offset + len(self.coeffs) - 1

    def coeff(self, exponent: int) -> int:
        k = exponent - self.offset
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return 0

    def terms(self):
        """Yield ``(exponent, coefficient)`` for non-zero coefficients."""
        for k, c in enumerate(self.coeffs):
            if c:
                yield self.offset + k, c

    def min_coeff(self) -> int:
        return min(self.coeffs) if self.coeffs else 0

    def __call__(self, x):
        if not self.coeffs:
            return 0
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc * x**self.offset

    # -- comparisons -------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            other = Polynomial.monomial(0, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.offset == other.offset and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.offset, self.coeffs)))
        return self._hash

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, int):
            other = Polynomial.monomial(0, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return poly_add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = Polynomial.monomial(0, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return poly_sub(self, other)

    def __rsub__(self, other):
        if isinstance(other, int):
            return poly_sub(Polynomial.monomial(0, other), self)
        return NotImplemented

    def __neg__(self):
        return Polynomial._raw(tuple(-c for c in self.coeffs), self.offset)

    def __mul__(self, other):
        if isinstance(other, int):
            if not other:
                return ZERO
            return Polynomial._raw(tuple(c * other for c in self.coeffs), self.offset)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, e: int) -> "Polynomial":
        return poly_shift(self, e)

    def substitute_power(self, d: int) -> "Polynomial":
        return poly_substitute_power(self, d)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {"offset": self.offset, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj) -> "Polynomial":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls([int(c) for c in obj["coeffs"]], int(obj["offset"]))

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)!r}, offset={self.offset})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for e, c in self.terms():
            if e == 0:
                mono = str(abs(c))
            else:
                q = "q" if e == 1 else f"q^{e}"
                mono = q if abs(c) == 1 else f"{abs(c)}*{q}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, mono))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, mono in parts[1:]:
            out += f" {sign} {mono}"
        return out


ZERO = Polynomial._raw((), 0)
ONE = Polynomial._raw((1,), 0)


def poly_add(P: Polynomial, Q: Polynomial) -> Polynomial:
    if not P.coeffs:
        return Q
    if not Q.coeffs:
        return P
    lo = min(P.offset, Q.offset)
    hi = max(P.degree, Q.degree)
    out = [0] * (hi - lo + 1)
    k = P.offset - lo
    out[k:k + len(P.coeffs)] = P.coeffs
    k = Q.offset - lo
    for t, c in enumerate(Q.coeffs, k):
        out[t] += c
    return Polynomial(out, lo)


def poly_sub(P: Polynomial, Q: Polynomial) -> Polynomial:
    return poly_add(P, -Q)


def poly_mul(P: Polynomial, Q: Polynomial) -> Polynomial:
    """Schoolbook product; zero coefficients of the shorter factor are skipped."""
    if not P.coeffs or not Q.coeffs:
        return ZERO
    a, b = P.coeffs, Q.coeffs
    if len(a) > len(b):
        a, b = b, a
    nb = len(b)
    out = [0] * (len(a) + nb - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        if x == 1:
            for j in range(nb):
                out[i + j] += b[j]
        elif x == -1:
            for j in range(nb):
                out[i + j] -= b[j]
        else:
            for j in range(nb):
                out[i + j] += x * b[j]
    # leading/trailing products are non-zero, so the result is canonical
    return Polynomial._raw(tuple(out), P.offset + Q.offset)


def poly_shift(P: Polynomial, e: int) -> Polynomial:
    """Multiply by ``q**e`` (``e`` may be negative)."""
    if not P.coeffs or not e:
        return P
    return Polynomial._raw(P.coeffs, P.offset + e)


def poly_substitute_power(P: Polynomial, d: int) -> Polynomial:
    """Replace q by ``q**d``."""
    if d < 1:
        raise ValueError(f"substitution power must be >= 1, got {d}")
    if d == 1 or not P.coeffs:
        return P
    out = [0] * (d * (len(P.coeffs) - 1) + 1)
    out[::d] = P.coeffs
    return Polynomial._raw(tuple(out), P.offset * d)


def poly_div_exact(P: Polynomial, Q: Polynomial) -> Polynomial:
    """Return R with ``R * Q == P``; raise :class:`NonExactDivision` otherwise."""
    if not Q.coeffs:
        raise ZeroDivisionError("division by the zero polynomial")
    if not P.coeffs:
        return ZERO
    n, m = len(P.coeffs), len(Q.coeffs)
    if n < m:
        raise NonExactDivision(f"{P!r} is not divisible by {Q!r}")
    rem = list(P.coeffs)
    den = Q.coeffs
    lead = den[-1]
    support = [(j, c) for j, c in enumerate(den[:-1]) if c]
    quot = [0] * (n - m + 1)
    for k in range(n - m, -1, -1):
        top = rem[k + m - 1]
        if not top:
            continue
        c, r = divmod(top, lead)
        if r:
            raise NonExactDivision(f"{P!r} is not divisible by {Q!r}")
        quot[k] = c
        rem[k + m - 1] = 0
        for j, dj in support:
            rem[k + j] -= c * dj
    if any(rem):
        raise NonExactDivision(f"{P!r} is not divisible by {Q!r}")
    return Polynomial(quot, P.offset - Q.offset)


def first_negative(P: Polynomial) -> Optional[Tuple[int, int]]:
    """Lowest ``(exponent, coefficient)`` with a negative coefficient, or None."""
    for k, c in enumerate(P.coeffs):
        if c < 0:
            return P.offset + k, c
    return None
