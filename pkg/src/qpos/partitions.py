"""Young diagrams, hook differences, and the brute-force D generating function.

Rows and columns are 1-based; node ``(r, c)`` lies on diagonal ``r - c``, so
``(1, 1)`` is on diagonal 0.  The hook difference at ``(r, c)`` is the length
of row r minus the length of column c.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

from qpos.dseries import as_rational
from qpos.errors import NonCombinatorial, ParameterError
from qpos.qpoly import Polynomial

Partition = Tuple[int, ...]


def make_partition(parts: Sequence[int]) -> Partition:
    """Validate and return a partition as a tuple of positive, non-increasing parts."""
    p = tuple(int(x) for x in parts)
    if any(x < 1 for x in p):
        raise ParameterError(f"parts must be positive, got {list(p)}")
    if any(p[t] < p[t + 1] for t in range(len(p) - 1)):
        raise ParameterError(f"parts must be non-increasing, got {list(p)}")
    return p


def parse_partition(text: str) -> Partition:
    text = text.strip()
    if not text:
        return ()
    try:
        return make_partition(int(x) for x in text.split(","))
    except ValueError as exc:
        raise ParameterError(f"bad partition {text!r}: {exc}") from exc


def conjugate(pi: Sequence[int]) -> Partition:
    if not pi:
        return ()
    return tuple(sum(1 for part in pi if part >= c) for c in range(1, pi[0] + 1))


def hook_differences(pi: Sequence[int]) -> List[List[int]]:
    """Ragged matrix: entry ``[r][c]`` is ``pi[r] - conjugate(pi)[c]`` (0-based)."""
    cols = conjugate(pi)
    return [[row - cols[c] for c in range(row)] for row in pi]


def diagonal_hooks(pi: Sequence[int], d: int) -> List[int]:
    """Hook differences of the nodes on diagonal ``d``, top row first."""
    cols = conjugate(pi)
    out = []
    for r, row in enumerate(pi, 1):
        c = r - d
        if 1 <= c <= row:
            out.append(row - cols[c - 1])
    return out


@dataclass(frozen=True)
class HookConstraint:
    """Hook-difference bounds for the D generating function.

    Nodes on diagonal ``1 - beta`` need hook difference ``>= beta - i + 1``;
    nodes on diagonal ``alpha - 1`` need hook difference ``<= K - alpha - i - 1``.
    """

    K: int
    i: int
    alpha: int
    beta: int

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = as_rational(getattr(self, name))
            if v.denominator != 1:
                raise NonCombinatorial(f"{name} = {v} is not an integer")
            if v < 0:
                raise ParameterError(f"{name} must be >= 0, got {v}")
            object.__setattr__(self, name, int(v))
        if not 0 < self.i < self.K:
            raise ParameterError(f"need 0 < i < K, got K={self.K}, i={self.i}")

    @property
    def low_diagonal(self) -> int:
        return 1 - self.beta

    @property
    def low_bound(self) -> int:
        return self.beta - self.i + 1

    @property
    def high_diagonal(self) -> int:
        return self.alpha - 1

    @property
    def high_bound(self) -> int:
        return self.K - self.alpha - self.i - 1


def satisfies(pi: Sequence[int], c: HookConstraint, N: int, M: int) -> bool:
    """Whether ``pi`` is counted by the D generating function for ``c`` in an N x M box.

    Also applies the extra rules for the edge cases: the largest part must
    exceed ``M - i`` when ``beta == 0`` and the number of parts must exceed
    ``N + i`` when ``alpha == 0``.
    """
    if len(pi) > M or (pi and pi[0] > N):
        return False
    if any(h < c.low_bound for h in diagonal_hooks(pi, c.low_diagonal)):
        return False
    if any(h > c.high_bound for h in diagonal_hooks(pi, c.high_diagonal)):
        return False
    if c.beta == 0 and not (pi and pi[0] > M - c.i):
        return False
    if c.alpha == 0 and not len(pi) > N + c.i:
        return False
    return True


def box_partitions(N: int, M: int) -> Iterator[Partition]:
    """All partitions with at most M parts, each at most N, in lexicographic descent."""
    def rec(prefix, cap, rows_left):
        yield tuple(prefix)
        if rows_left == 0:
            return
        for part in range(cap, 0, -1):
            prefix.append(part)
            yield from rec(prefix, part, rows_left - 1)
            prefix.pop()

    yield from rec([], N, M)


def admissible_partitions(N: int, M: int, c: HookConstraint) -> Iterator[Partition]:
    """Partitions counted by the D generating function, by pruned descent.

    Rows are appended top to bottom.  Column lengths only grow as rows are
    added, so a lower-bound failure on the low diagonal is final and prunes
    the branch.  An upper-bound failure on the high diagonal is final once the
    node's column can no longer grow.
    """
    lo_d, lo_b = c.low_diagonal, c.low_bound
    hi_d, hi_b = c.high_diagonal, c.high_bound
    cols = [0] * (N + 1)  # cols[col] for col in 1..N, current column lengths

    def alive(prefix):
        n = len(prefix)
        last = prefix[-1]
        growth = M - n  # rows that may still be added
        for r, row in enumerate(prefix, 1):
            col = r - lo_d
            if 1 <= col <= row and row - cols[col] < lo_b:
                return False
            col = r - hi_d
            if 1 <= col <= row:
                max_len = cols[col] + (growth if col <= last else 0)
                if row - max_len > hi_b:
                    return False
        return True

    def rec(prefix, cap):
        if satisfies(prefix, c, N, M):
            yield tuple(prefix)
        if len(prefix) == M:
            return
        for part in range(cap, 0, -1):
            prefix.append(part)
            for col in range(1, part + 1):
                cols[col] += 1
            if alive(prefix):
                yield from rec(prefix, part)
            for col in range(1, part + 1):
                cols[col] -= 1
            prefix.pop()

    yield from rec([], N)


def oracle_gf(N: int, M: int, c: HookConstraint) -> Polynomial:
    """Sum of ``q^|pi|`` over the admissible partitions in the N x M box."""
    if N < 0 or M < 0:
        raise ParameterError(f"need N, M >= 0, got N={N}, M={M}")
    counts = [0] * (N * M + 1)
    for pi in admissible_partitions(N, M, c):
        counts[sum(pi)] += 1
    return Polynomial(counts)
