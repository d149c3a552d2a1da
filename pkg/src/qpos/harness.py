"""Named positivity families, non-negativity sweeps, and their reports."""

from __future__ import annotations

import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from filelock import FileLock

from qpos import __version__
from qpos.dseries import (
    DParams,
    RegimeKind,
    as_rational,
    d_poly,
    fmt_rational,
    g_params,
    g_sum,
    validate,
)
from qpos.errors import NegativeSize, ParameterError
from qpos.qpoly import ZERO, Polynomial, first_negative, poly_div_exact, poly_shift
from qpos.qseries import legendre3, pochhammer, qbinom

log = logging.getLogger(__name__)

ENGINE = f"qpos-{__version__}"

FAMILY_IDS = (
    "THM_2_2", "THM_2_3", "COR_2_4", "THM_2_5", "THM_2_6", "THM_2_7",
    "EX_I", "EX_II", "BORWEIN_A", "BORWEIN_B", "BORWEIN_C", "F_2_5",
)

_ALIASES = {"p'": "pp", "p_prime": "pp", "ptilde": "pt", "p~": "pt", "ν": "nu"}


# -- parameter handling -------------------------------------------------------


def parse_params(text: str) -> Dict[str, Fraction]:
    """Parse ``"k=v,k=v"`` into exact values (integers or ``a/b`` fractions)."""
    out: Dict[str, Fraction] = {}
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise ParameterError(f"expected key=value in --params, got {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        out[_ALIASES.get(k, k)] = as_rational(v)
    return out


def _ints(params, *names, **defaults):
    vals = []
    for name in names:
        if name in params:
            v = params[name]
        elif name in defaults:
            v = defaults[name]
        else:
            raise ParameterError(f"missing parameter {name!r}")
        v = as_rational(v)
        if v.denominator != 1:
            raise ParameterError(f"parameter {name} must be an integer, got {v}")
        vals.append(int(v))
    return vals


def _need(cond, msg):
    if not cond:
        raise ParameterError(msg)


def _sizes(N, M, what):
    if N < 0 or M < 0:
        raise NegativeSize(f"{what}: L too small (N={N}, M={M})")
    return N, M


def _check_thm22(p, pp, r, s):
    _need(0 < p < pp, f"need 0 < p < p', got p={p}, p'={pp}")
    _need(0 < r < p, f"need 0 < r < p, got r={r}, p={p}")
    _need(0 < s < pp, f"need 0 < s < p', got s={s}, p'={pp}")


def _thm23_ab(n, p, pp, r):
    P = 2**n
    u = (4**n - 1) // 3
    v = (2 ** (2 * n + 1) + 1) // 3
    return Fraction(u * (2 * pp - 1) - v * r + p, P), Fraction(v * r + u, P)


def _inst_thm22(params):
    L, p, pp, r, s = _ints(params, "L", "p", "pp", "r", "s")
    _need(L >= 0, f"need L >= 0, got {L}")
    _check_thm22(p, pp, r, s)
    N = -((-(L + r - s)) // 2)
    M = (L - r + s) // 2
    _sizes(N, M, "THM_2_2")
    return DParams(pp, s, N, M, p - r, r)


def _inst_thm23(params):
    n, L, p, pp, r, s = _ints(params, "n", "L", "p", "pp", "r", "s")
    _need(n >= 2, f"need n >= 2, got {n}")
    _need(L >= 0, f"need L >= 0, got {L}")
    _check_thm22(p, pp, r, s)
    shift = 2 ** (n - 2) + 2 ** (n - 1) * (r - s)
    N, M = _sizes(L + shift, L - shift, "THM_2_3")
    alpha, beta = _thm23_ab(n, p, pp, r)
    return DParams(2**n * pp, 2**n * s, N, M, alpha, beta)


def _inst_cor24(params):
    n, L, p, pt, r = _ints(params, "n", "L", "p", "pt", "r")
    _need(n >= 2, f"need n >= 2, got {n}")
    _need(L >= 0, f"need L >= 0, got {L}")
    _need(0 < p < 2 * pt, f"need 0 < p < 2*pt, got p={p}, pt={pt}")
    _need(0 < r < p, f"need 0 < r < p, got r={r}, p={p}")
    shift = 2 ** (n - 2) + 2 ** (n - 1) * (r - pt)
    N, M = _sizes(L + shift, L - shift, "COR_2_4")
    P = 2**n
    u = (4**n - 1) // 3
    v = (2 ** (2 * n + 1) + 1) // 3
    alpha = Fraction(u * (4 * pt - 1) - v * r + p, P)
    beta = Fraction(v * r + u, P)
    return g_params(N, M, alpha, beta, 2**n * pt)


def _inst_thm25(params):
    n, L, nu, s = _ints(params, "n", "L", "nu", "s")
    _need(n >= 2, f"need n >= 2, got {n}")
    _need(nu >= 1, f"need nu >= 1, got {nu}")
    _need(0 <= s <= nu - 1, f"need 0 <= s <= nu-1, got s={s}, nu={nu}")
    shift = 2 ** (n - 1) * s + 2 ** (n - 2)
    N, M = _sizes(L - shift, L + shift, "THM_2_5")
    X = (4**n - 1) // 3 * nu + (2 ** (2 * n - 1) + 1) // 3
    den = 2 ** (n - 2) * (2 * nu + 1)
    return g_params(N, M, Fraction(X * (nu + s + 1), den), Fraction(X * (nu - s), den),
                    2 ** (n - 1) * (2 * nu + 1))


def thm25_min_L(n: int, s: int) -> int:
    """Smallest L with a non-negative N in the THM_2_5 family."""
    return 2 ** (n - 1) * s + 2 ** (n - 2)


def _inst_thm26(params):
    n, t, L, p, pp, r, s = _ints(params, "n", "t", "L", "p", "pp", "r", "s")
    _need(n >= 2 and t >= 0, f"need n >= 2 and t >= 0, got n={n}, t={t}")
    _need(L >= 0, f"need L >= 0, got {L}")
    _check_thm22(p, pp, r, s)
    T = 3**t
    shift = T * 2 ** (n - 2) + T * 2 ** (n - 1) * (r - s)
    N, M = _sizes(L + shift, L - shift, "THM_2_6")
    a23, b23 = _thm23_ab(n, p, pp, r)
    alpha = a23 - (T - 1) * 2 ** (n - 2) + (T - 1) * 2 ** (n - 1) * (pp - r)
    beta = b23 + (T - 1) * 2 ** (n - 2) + (T - 1) * 2 ** (n - 1) * r
    return DParams(T * 2**n * pp, T * 2**n * s, N, M, alpha, beta)


def _inst_thm27(params):
    n, t, L, p, pp, r, s = _ints(params, "n", "t", "L", "p", "pp", "r", "s")
    _need(n >= 2 and t >= 0, f"need n >= 2 and t >= 0, got n={n}, t={t}")
    _need(L >= 0, f"need L >= 0, got {L}")
    _check_thm22(p, pp, r, s)
    T = 3**t
    P = 2**n
    shift = T * 2 ** (n - 2) + T * 2 ** (n - 1) * (r - s)
    N, M = _sizes(L + shift, L - shift, "THM_2_7")
    w = (2 ** (2 * n + 1) - 2) // 3 * T + 1
    u = (4**n - 1) // 3 * T
    alpha = Fraction(((2 ** (2 * n + 1) - 8) // 3 * T + 4 * t + 2) * pp - u - w * r + p, P)
    beta = Fraction(w * r + u, P)
    return DParams(T * P * pp, T * P * s, N, M, alpha, beta)


def _inst_ex1(params):
    N, a = _ints(params, "N", "a")
    _need(N >= 0 and a in (0, 1), f"need N >= 0 and a in {{0, 1}}, got N={N}, a={a}")
    return DParams(6, 2, N + a, N, 1, Fraction(1, 2))


def _inst_ex2(params):
    N, a = _ints(params, "N", "a")
    _need(N >= 0 and a in (0, 1), f"need N >= 0 and a in {{0, 1}}, got N={N}, a={a}")
    return DParams(9, 3, N, N + a, Fraction(2, 3), Fraction(1, 3))


def _inst_borwein(alpha, beta, delta):
    def build(params):
        (N,) = _ints(params, "N")
        N, M = _sizes(N + delta, N - delta, "BORWEIN")
        return g_params(N, M, alpha, beta, 3)
    return build


def _inst_f25(params):
    L, nu, s = _ints(params, "L", "nu", "s")
    _need(nu >= 1 and 0 <= s <= nu - 1, f"need nu >= 1 and 0 <= s <= nu-1, got nu={nu}, s={s}")
    N, M = _sizes(L - s, L + s + 1, "F_2_5")
    K = 2 * nu + 1
    return g_params(N, M, Fraction(2 * (nu + 1) * (nu + s + 1), K),
                    Fraction(2 * (nu + 1) * (nu - s), K), K)


_BUILDERS: Dict[str, Callable[[dict], DParams]] = {
    "THM_2_2": _inst_thm22,
    "THM_2_3": _inst_thm23,
    "COR_2_4": _inst_cor24,
    "THM_2_5": _inst_thm25,
    "THM_2_6": _inst_thm26,
    "THM_2_7": _inst_thm27,
    "EX_I": _inst_ex1,
    "EX_II": _inst_ex2,
    "BORWEIN_A": _inst_borwein(Fraction(4, 3), Fraction(5, 3), 0),
    "BORWEIN_B": _inst_borwein(Fraction(2, 3), Fraction(7, 3), 1),
    "BORWEIN_C": _inst_borwein(Fraction(1, 3), Fraction(8, 3), 1),
    "F_2_5": _inst_f25,
}

# families stated as G-polynomials (D with K = 2i)
G_FAMILIES = {"COR_2_4", "THM_2_5", "BORWEIN_A", "BORWEIN_B", "BORWEIN_C", "F_2_5"}

# positivity regime each named family is expected to sit in
FAMILY_REGIME = {
    "THM_2_2": RegimeKind.COR_1_2,
    "THM_2_3": RegimeKind.CONJ_2_1,
    "COR_2_4": RegimeKind.CONJ_1_3,
    "THM_2_5": RegimeKind.CONJ_1_3,
    "THM_2_6": RegimeKind.CONJ_2_1,
    "THM_2_7": RegimeKind.CONJ_2_1,
    "EX_I": RegimeKind.CONJ_2_1,
    "EX_II": RegimeKind.CONJ_2_1,
}


def instantiate(id: str, params: dict) -> DParams:
    """Translate a named family and its parameters into exact D-parameters."""
    try:
        build = _BUILDERS[id]
    except KeyError:
        raise ParameterError(f"unknown family {id!r}; known: {', '.join(FAMILY_IDS)}") from None
    return build({_ALIASES.get(k, k): v for k, v in params.items()})


# -- displayed sums (evaluated independently of d_poly) -------------------------


def display_thm22(L, p, pp, r, s) -> Polynomial:
    """The explicit alternating sum given for the THM_2_2 family."""
    total = ZERO
    top = (L - r + s) // 2
    bot = (L - r - s) // 2
    for j in range(-L - 2, L + 3):
        total = total + poly_shift(qbinom(L, top - j * pp), j * j * p * pp + (r * pp - s * p) * j)
        total = total - poly_shift(qbinom(L, bot - j * pp), (j * p + r) * (j * pp + s))
    return total


def display_ex1(N, a) -> Polynomial:
    total = ZERO
    for j in range(-N - 2, N + 3):
        w = legendre3(j + 1)
        if w:
            total = total + poly_shift(qbinom(2 * N + a, N - 2 * j), j * j) * w
    return total


def display_ex2(N, a, flipped=False) -> Polynomial:
    """EX_II sum with ``((j+1)/3)`` weights, or the ``((1-j)/3)`` form if flipped."""
    total = ZERO
    for j in range(-N - 2, N + 3):
        if flipped:
            w, b = legendre3(1 - j), qbinom(2 * N + a, N - 3 * j)
        else:
            w, b = legendre3(j + 1), qbinom(2 * N + a, N + 3 * j)
        if w:
            total = total + poly_shift(b, j * j) * w
    return total


def display_f25(L, nu, s) -> Polynomial:
    total = ZERO
    K = 2 * nu + 1
    for j in range(-L - 2, L + 3):
        e = (nu + 1) * K * j * j + (nu + 1) * (2 * s + 1) * j
        b = poly_shift(qbinom(2 * L + 1, L - s - K * j), e)
        total = total - b if j % 2 else total + b
    return total


def borwein_abc(N: int) -> Tuple[Polynomial, Polynomial, Polynomial]:
    """``(A, B, C)`` with ``(q;q)_{3N} / (q^3;q^3)_N = A(q^3) - q B(q^3) - q^2 C(q^3)``."""
    prod = poly_div_exact(pochhammer(3 * N), pochhammer(N, 3))
    parts = [[], [], []]
    for k, c in enumerate(prod.coeffs):
        parts[k % 3].append(c)
    A = Polynomial(parts[0])
    B = -Polynomial(parts[1])
    C = -Polynomial(parts[2])
    return A, B, C


# -- verdicts -----------------------------------------------------------------


@dataclass
class Verdict:
    params: str
    degree: int
    min_coeff: int
    first_negative: Optional[Tuple[int, int]]
    offset: int
    passed: bool
    elapsed_ms: int = 0
    identity_ok: Optional[bool] = None
    polynomial: Optional[Polynomial] = None
    detail: Optional[str] = None

    @classmethod
    def of(cls, key: str, P: Polynomial, elapsed_ms: int = 0,
           identity_ok: Optional[bool] = None, detail: Optional[str] = None) -> "Verdict":
        neg = first_negative(P)
        passed = neg is None and identity_ok is not False
        return cls(key, P.degree, P.min_coeff(), neg, P.offset, passed, elapsed_ms,
                   identity_ok, None if passed else P, detail)

    def to_json(self, timing: bool = True) -> dict:
        d = {
            "params": self.params,
            "passed": self.passed,
            "degree": self.degree,
            "offset": self.offset,
            "min_coeff": str(self.min_coeff),
            "first_negative": (None if self.first_negative is None
                               else [self.first_negative[0], str(self.first_negative[1])]),
        }
        if self.identity_ok is not None:
            d["identity_ok"] = self.identity_ok
        if self.detail:
            d["detail"] = self.detail
        if self.polynomial is not None:
            d["polynomial"] = self.polynomial.to_json()
        if timing:
            d["elapsed_ms"] = self.elapsed_ms
        return d

    def cache_record(self) -> dict:
        return {
            "key": self.params,
            "engine": ENGINE,
            "passed": self.passed,
            "first_negative": (None if self.first_negative is None
                               else [self.first_negative[0], str(self.first_negative[1])]),
            "degree": self.degree,
            "min_coeff": str(self.min_coeff),
            "elapsed_ms": self.elapsed_ms,
            "offset": self.offset,
        }

    @classmethod
    def from_cache(cls, rec: dict) -> "Verdict":
        neg = rec["first_negative"]
        return cls(rec["key"], rec["degree"], int(rec["min_coeff"]),
                   None if neg is None else (int(neg[0]), int(neg[1])),
                   rec.get("offset", 0), rec["passed"], rec["elapsed_ms"])


def _ms(t0):
    return int(round((time.perf_counter() - t0) * 1000))


def family_key(id: str, params: dict) -> str:
    items = ",".join(f"{k}={fmt_rational(as_rational(v))}" for k, v in sorted(params.items()))
    return f"{id}|{items}"


def family_poly(id: str, params: dict) -> Polynomial:
    p = instantiate(id, params)
    if id in G_FAMILIES:
        return g_sum(p.N, p.M, p.alpha, p.beta, p.i)
    return d_poly(p)


def check_family(id: str, params: dict) -> Verdict:
    """Evaluate a named family, test non-negativity, and compare displayed sums.

    Displayed-sum comparisons: THM_2_2 (explicit alternating sum), EX_I and
    EX_II (Legendre-weighted sums and the mirror symmetry), F_2_5 (its sum
    against G), BORWEIN_* and every G family (single G-sum against D-sum).
    """
    t0 = time.perf_counter()
    params = {_ALIASES.get(k, k): v for k, v in params.items()}
    p = instantiate(id, params)
    P = family_poly(id, params)
    problems = []
    identity = None
    if id in G_FAMILIES:
        identity = d_poly(p) == P
        if not identity:
            problems.append("G-sum != D-sum")
    if id == "THM_2_2":
        L, pr, pp, r, s = _ints(params, "L", "p", "pp", "r", "s")
        ok = display_thm22(L, pr, pp, r, s) == P
        identity = ok
        if not ok:
            problems.append("displayed sum != D")
    elif id in ("EX_I", "EX_II"):
        N, a = _ints(params, "N", "a")
        if id == "EX_I":
            shows = [display_ex1(N, a)]
        else:
            shows = [display_ex2(N, a), display_ex2(N, a, flipped=True)]
        ok = all(x == P for x in shows)
        sym = d_poly(p.mirrored()) == P
        identity = ok and sym
        if not ok:
            problems.append("displayed sum != D")
        if not sym:
            problems.append("mirror symmetry fails")
    elif id == "F_2_5":
        L, nu, s = _ints(params, "L", "nu", "s")
        ok = display_f25(L, nu, s) == P
        identity = bool(identity) and ok
        if not ok:
            problems.append("F-sum != G")
    return Verdict.of(family_key(id, params), P, _ms(t0), identity,
                      "; ".join(problems) or None)


# -- sweeps -------------------------------------------------------------------

DEFAULT_MAX_K = {RegimeKind.COR_1_2: 6, RegimeKind.CONJ_2_1: 6, RegimeKind.CONJ_1_3: 5}


def _frac_grid(step: int, lo: Fraction, hi: Fraction):
    """Pairs ``(alpha, beta)`` of non-negative multiples of ``1/step`` with lo <= alpha+beta <= hi."""
    top = math.floor(hi * step)
    for a in range(0, top + 1):
        for b in range(0, top - a + 1):
            s = Fraction(a + b, step)
            if lo <= s <= hi:
                yield Fraction(a, step), Fraction(b, step)


def sweep_tuples(regime, max_size: int, max_K: Optional[int] = None, K: Optional[int] = None,
                 i: Optional[int] = None, den: Optional[int] = None) -> List[DParams]:
    """Every parameter tuple of the regime with ``N + M <= max_size``, in canonical order.

    For CONJ_1_3 the K filters refer to the G-level K (the D-level K is 2K).
    ``den`` restricts alpha and beta to multiples of ``1/den``.
    """
    regime = RegimeKind(regime)
    if max_K is None:
        max_K = DEFAULT_MAX_K[regime]
    out = []
    if regime is RegimeKind.CONJ_1_3:
        pairs = [(2 * kg, kg) for kg in range(1, max_K + 1) if K is None or kg == K]
    else:
        pairs = [(k, ii) for k in range(2, max_K + 1) for ii in range(1, k)
                 if (K is None or k == K) and (i is None or ii == i)]
    for k, ii in pairs:
        if regime is RegimeKind.COR_1_2:
            step = 1
        else:
            # alpha*K and alpha*i are integers iff alpha*gcd(K, i) is
            step = math.gcd(k, ii)
        for a, b in _frac_grid(step, Fraction(1), Fraction(k - 1)):
            if den is not None and ((a * den).denominator != 1 or (b * den).denominator != 1):
                continue
            for N in range(0, max_size + 1):
                for M in range(0, max_size - N + 1):
                    if not b - ii <= N - M <= k - a - ii:
                        continue
                    p = DParams(k, ii, N, M, a, b)
                    if validate(p, regime).satisfied:
                        out.append(p)
    out.sort(key=DParams.sort_key)
    return out


def _evaluate(p: DParams) -> Verdict:
    t0 = time.perf_counter()
    if p.K == 2 * p.i:
        P = g_sum(p.N, p.M, p.alpha, p.beta, p.i)
    else:
        P = d_poly(p)
    return Verdict.of(p.key, P, _ms(t0))


def _evaluate_chunk(chunk: Sequence[DParams]) -> List[Verdict]:
    return [_evaluate(p) for p in chunk]


class VerdictCache:
    """Append-only JSON Lines store of verdicts keyed by canonical parameter text."""

    def __init__(self, directory):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.path = self.dir / "verdicts.jsonl"
        self.lock = FileLock(str(self.path) + ".lock")

    def load(self) -> Dict[str, Verdict]:
        found: Dict[str, Verdict] = {}
        if not self.path.exists():
            return found
        with self.lock, open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    log.warning("skipping corrupt cache line in %s", self.path)
                    continue
                if rec.get("engine") == ENGINE:
                    found[rec["key"]] = Verdict.from_cache(rec)
        return found

    def append(self, verdicts: Iterable[Verdict]) -> None:
        lines = "".join(json.dumps(v.cache_record(), sort_keys=True) + "\n" for v in verdicts)
        if not lines:
            return
        with self.lock, open(self.path, "a", encoding="utf-8") as fh:
            fh.write(lines)
            fh.flush()


def default_jobs() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def sweep(regime, max_size: int, max_K: Optional[int] = None, K: Optional[int] = None,
          i: Optional[int] = None, den: Optional[int] = None, jobs: int = 1,
          cache_dir=None) -> Tuple[List[Verdict], dict]:
    """Evaluate every tuple of a regime and record each first negative coefficient.

    Violations never stop the sweep.  Output order is the canonical tuple
    order whatever ``jobs`` is.
    """
    t0 = time.perf_counter()
    tuples = sweep_tuples(regime, max_size, max_K, K, i, den)
    cache = VerdictCache(cache_dir) if cache_dir else None
    known = cache.load() if cache else {}
    todo = [p for p in tuples if p.key not in known]
    fresh: List[Verdict] = []
    if jobs <= 1 or len(todo) < 2:
        fresh = _evaluate_chunk(todo)
    else:
        # interleaved chunks balance the cost, which grows with N + M
        nchunks = min(len(todo), jobs * 8)
        chunks = [todo[c::nchunks] for c in range(nchunks)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_evaluate_chunk, chunks):
                fresh.extend(part)
    if cache:
        cache.append(sorted(fresh, key=lambda v: v.params))
    by_key = dict(known)
    by_key.update((v.params, v) for v in fresh)
    verdicts = [by_key[p.key] for p in tuples]
    violations = sum(1 for v in verdicts if not v.passed)
    summary = {
        "regime": RegimeKind(regime).value,
        "max_size": max_size,
        "tuples_checked": len(verdicts),
        "violations": violations,
        "cache_hits": len(tuples) - len(todo),
        "wall_time": round(time.perf_counter() - t0, 3),
    }
    return verdicts, summary


def report_lines(verdicts: Sequence[Verdict], summary: dict, timing: bool = False) -> str:
    """JSON Lines report: one verdict per line, then the summary line.

    Timing fields are left out unless ``timing`` is set, so reports of the
    same run are byte-identical regardless of worker count or cache state.
    """
    lines = [json.dumps(v.to_json(timing), sort_keys=True) for v in verdicts]
    tail = {k: v for k, v in summary.items() if timing or k not in ("wall_time", "cache_hits")}
    tail["summary"] = True
    lines.append(json.dumps(tail, sort_keys=True))
    return "\n".join(lines) + "\n"
