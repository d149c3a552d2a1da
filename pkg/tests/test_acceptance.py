"""Exit criteria for the package, one test per criterion."""

import math
import warnings
from fractions import Fraction

from qpos.dseries import DParams, check_symmetry, d_poly, g_poly
from qpos.errors import NegativeSize
from qpos.harness import (
    borwein_abc,
    check_family,
    report_lines,
    sweep,
    thm25_min_L,
)
from qpos.partitions import HookConstraint, hook_differences, oracle_gf
from qpos.qpoly import Polynomial, first_negative
from qpos.transforms import (
    KernelKind,
    kernel,
    lift_instance,
    transform_support,
    verify_lift,
    verify_transform,
)


def test_oracle_equivalence(criterion):
    checked, mismatches = 0, []
    for K in range(2, 7):
        for i in range(1, K):
            for a in range(1, K):
                for b in range(1, K - a):
                    c = HookConstraint(K, i, a, b)
                    for N in range(15):
                        for M in range(15 - N):
                            if not b - i <= N - M <= K - a - i:
                                continue
                            checked += 1
                            if oracle_gf(N, M, c) != d_poly(DParams(K, i, N, M, a, b)):
                                mismatches.append((K, i, N, M, a, b))
    criterion(1, not mismatches, f"oracle == D on {checked} tuples, {len(mismatches)} mismatches")
    assert checked > 1000
    assert mismatches == []


def test_hook_difference_example(criterion):
    rows = hook_differences((5, 3, 1))
    ok = rows == [[2, 3, 3, 4, 4], [0, 1, 1], [-2]]
    criterion(2, ok, f"hook differences of (5,3,1) = {rows}")
    assert ok


def test_symmetry(criterion):
    checked, fractional, bad = 0, 0, []
    for K in range(2, 7):
        for i in range(1, K):
            g = math.gcd(K, i)
            top = (K - 1) * g
            for a in range(top + 1):
                for b in range(top + 1 - a):
                    for N in range(21):
                        for M in range(21 - N):
                            p = DParams(K, i, N, M, Fraction(a, g), Fraction(b, g))
                            checked += 1
                            fractional += p.alpha.denominator > 1 or p.beta.denominator > 1
                            if not check_symmetry(p):
                                bad.append(p)
    criterion(3, not bad, f"mirror symmetry on {checked} tuples ({fractional} with fractional "
                          f"alpha or beta), {len(bad)} failures")
    assert fractional > 0
    assert bad == []


def test_transform_identities(criterion):
    checked, bad = 0, []
    for kind in KernelKind:
        for L in range(11):
            sup = transform_support(kind, L)
            for a in range(sup.start - 2, sup.stop + 2):
                checked += 1
                if not verify_transform(kind, L, a):
                    bad.append((kind.value, L, a))
    negative = []
    kernels = 0
    for kind in KernelKind:
        for L in range(13):
            for k in range(L + 2):
                kernels += 1
                if first_negative(kernel(kind, L, k)) is not None:
                    negative.append((kind.value, L, k))
    ok = not bad and not negative
    criterion(4, ok, f"{checked} transform identities ({len(bad)} bad), "
                     f"{kernels} kernels non-negative ({len(negative)} negative)")
    assert bad == [] and negative == []


def test_lift_identities(criterion):
    checked, bad = 0, []
    for K in (3, 4, 5):
        for i in range(1, K):
            for a in (-1, 0, 1):
                for al in range(K):
                    for be in range(K - al):
                        if al + be < 1 or not be - i <= 2 * a <= K - al - i:
                            continue
                        for inst_id in ("4.4", "4.11"):
                            inst = lift_instance(inst_id, K=K, i=i, a=a, alpha=al, beta=be)
                            for L in range(7):
                                checked += 1
                                if not verify_lift(inst, L):
                                    bad.append((inst_id, K, i, a, al, be, L))
    base = dict(p=2, pp=3, r=1, s=1)
    runs = [("4.15", dict(base))]
    runs += [(inst_id, dict(base, t=t)) for inst_id in ("4.18", "4.20") for t in (0, 1)]
    for inst_id, params in runs:
        inst = lift_instance(inst_id, **params)
        for L in range(7):
            checked += 1
            if not verify_lift(inst, L):
                bad.append((inst_id, params, L))
    criterion(5, not bad, f"{checked} lift identities, {len(bad)} mismatches")
    assert bad == []


def _family_runs():
    runs = []
    for pp in range(2, 6):
        for p in range(1, pp):
            for r in range(1, p):
                for s in range(1, pp):
                    runs += [("THM_2_2", dict(L=L, p=p, pp=pp, r=r, s=s)) for L in range(13)]
    for n in (2, 3):
        for pp in (2, 3):
            for p in range(1, pp):
                for r in range(1, p):
                    for s in range(1, pp):
                        runs += [("THM_2_3", dict(n=n, L=L, p=p, pp=pp, r=r, s=s)) for L in range(11)]
        # p' = 2*pt <= 3 leaves no admissible r, so pt runs up to 2
        for pt in (1, 2):
            for p in range(1, 2 * pt):
                for r in range(1, p):
                    runs += [("COR_2_4", dict(n=n, L=L, p=p, pt=pt, r=r)) for L in range(11)]
        for nu in (1, 2):
            for s in range(nu):
                lo = thm25_min_L(n, s)
                runs += [("THM_2_5", dict(n=n, L=L, nu=nu, s=s)) for L in range(lo, lo + 7)]
    for fam in ("THM_2_6", "THM_2_7"):
        for t in (0, 1):
            for pp in (2, 3):
                for p in range(1, pp):
                    for r in range(1, p):
                        for s in range(1, pp):
                            runs += [(fam, dict(n=2, t=t, L=L, p=p, pp=pp, r=r, s=s)) for L in range(9)]
    return runs


def test_named_family_positivity(criterion):
    checked, skipped, bad = 0, 0, []
    display_checked = 0
    for fam, params in _family_runs():
        try:
            v = check_family(fam, params)
        except NegativeSize:
            skipped += 1
            continue
        checked += 1
        if fam == "THM_2_2":
            display_checked += 1
            if v.identity_ok is not True:
                bad.append((fam, params, "display"))
        if not v.passed:
            bad.append((fam, params, v.first_negative, v.detail))
    criterion(6, not bad, f"{checked} family instances non-negative ({skipped} skipped: N or M < 0), "
                          f"{display_checked} displayed sums == D, {len(bad)} failures")
    assert bad == []


def test_borwein_cases(criterion):
    bad = []
    for N in range(26):
        for fam in ("BORWEIN_A", "BORWEIN_B", "BORWEIN_C"):
            if fam != "BORWEIN_A" and N < 1:
                continue
            v = check_family(fam, {"N": N})
            if not v.passed:
                bad.append((fam, N))
    small = g_poly(1, 1, Fraction(4, 3), Fraction(5, 3), 3)
    A1, _, _ = borwein_abc(1)
    ok = not bad and small == Polynomial([1, 1]) and A1 == small
    criterion(7, ok, f"Borwein G-polynomials non-negative for N <= 25 ({len(bad)} bad); "
                     f"G(1,1;4/3,5/3,3) = {small}, product expansion gives {A1}")
    assert ok


def test_legendre_examples(criterion):
    bad = []
    for N in range(31):
        for a in (0, 1):
            for fam in ("EX_I", "EX_II"):
                v = check_family(fam, {"N": N, "a": a})
                if not v.passed or v.identity_ok is not True:
                    bad.append((fam, N, a, v.detail))
    criterion(8, not bad, f"EX_I/EX_II for N <= 30: non-negative, displayed sums and mirror "
                          f"symmetry agree ({len(bad)} failures)")
    assert bad == []


def test_regime_sweeps(criterion):
    verdicts, summary = sweep("COR_1_2", 12, jobs=2)
    hard_ok = summary["violations"] == 0 and summary["tuples_checked"] > 0
    soft = {}
    for regime, max_K in (("CONJ_2_1", 6), ("CONJ_1_3", 5)):
        _, s = sweep(regime, 12, max_K=max_K, jobs=2)
        soft[regime] = s
        if s["violations"]:
            warnings.warn(f"FINDING: {regime} sweep found {s['violations']} negative polynomials")
    text = (f"COR_1_2 {summary['tuples_checked']} tuples/{summary['violations']} violations; "
            + "; ".join(f"{k} {v['tuples_checked']} tuples/{v['violations']} violations"
                        for k, v in soft.items()))
    criterion(9, hard_ok, text)
    assert hard_ok
    for s in soft.values():
        assert s["tuples_checked"] > 0


def test_sweep_determinism(criterion):
    reports = []
    for jobs in (1, 2, 3):
        verdicts, summary = sweep("CONJ_2_1", 8, max_K=5, jobs=jobs)
        reports.append(report_lines(verdicts, summary).encode())
    ok = len(set(reports)) == 1
    criterion(10, ok, f"CONJ_2_1 report identical across jobs=1,2,3 ({len(reports[0])} bytes)")
    assert ok
