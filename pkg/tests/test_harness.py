import json
from fractions import Fraction

import pytest

from qpos.dseries import DParams, d_poly, validate
from qpos.errors import NegativeSize, ParameterError
from qpos.harness import (
    ENGINE,
    FAMILY_REGIME,
    Verdict,
    VerdictCache,
    borwein_abc,
    check_family,
    display_ex2,
    family_key,
    instantiate,
    parse_params,
    report_lines,
    sweep,
    sweep_tuples,
    thm25_min_L,
)
from qpos.qpoly import Polynomial


def test_parse_params():
    assert parse_params("L=2, p=2,p'=3,ν=1,alpha=4/3") == {
        "L": 2, "p": 2, "pp": 3, "nu": 1, "alpha": Fraction(4, 3)}
    assert parse_params("") == {}
    with pytest.raises(ParameterError):
        parse_params("L")
    with pytest.raises(ParameterError):
        parse_params("a=0.5")


def test_instantiate_example():
    assert instantiate("THM_2_2", {"L": 2, "p": 2, "p'": 3, "r": 1, "s": 1}) == DParams(3, 1, 1, 1, 1, 1)
    assert instantiate("EX_I", {"N": 2, "a": 1}) == DParams(6, 2, 3, 2, 1, Fraction(1, 2))
    assert instantiate("BORWEIN_A", {"N": 1}) == DParams(6, 3, 1, 1, Fraction(4, 3), Fraction(5, 3))


def test_instantiate_errors():
    with pytest.raises(ParameterError):
        instantiate("THM_9_9", {})
    with pytest.raises(ParameterError):
        instantiate("THM_2_2", {"L": 2, "p": 3, "pp": 3, "r": 1, "s": 1})
    with pytest.raises(ParameterError):
        instantiate("THM_2_3", {"n": 1, "L": 2, "p": 2, "pp": 3, "r": 1, "s": 1})
    with pytest.raises(ParameterError):
        instantiate("THM_2_2", {"L": 2, "p": 2, "pp": 3, "r": 1})
    with pytest.raises(NegativeSize):
        instantiate("THM_2_5", {"n": 2, "L": thm25_min_L(2, 1) - 1, "nu": 2, "s": 1})
    assert instantiate("THM_2_5", {"n": 2, "L": thm25_min_L(2, 1), "nu": 2, "s": 1}).N == 0


def test_check_family_example():
    v = check_family("THM_2_2", {"L": 2, "p": 2, "pp": 3, "r": 1, "s": 1})
    assert v.passed and v.identity_ok
    assert v.first_negative is None
    assert v.params == "THM_2_2|L=2,p=2,pp=3,r=1,s=1"


@pytest.mark.parametrize("fam,params", [
    ("F_2_5", {"L": 4, "nu": 2, "s": 1}),
    ("BORWEIN_B", {"N": 3}),
    ("COR_2_4", {"n": 2, "L": 3, "p": 2, "pt": 2, "r": 1}),
    ("THM_2_5", {"n": 3, "L": 8, "nu": 1, "s": 0}),
])
def test_g_families_agree_with_d(fam, params):
    v = check_family(fam, params)
    assert v.passed and v.identity_ok is True


def test_cor_2_4_is_a_special_case():
    for n in (2, 3):
        for pt in (1, 2, 3):
            for p in range(1, 2 * pt):
                for r in range(1, p):
                    for L in range(6):
                        try:
                            cor = instantiate("COR_2_4", dict(n=n, L=L, p=p, pt=pt, r=r))
                        except NegativeSize:
                            with pytest.raises(NegativeSize):
                                instantiate("THM_2_3", dict(n=n, L=L, p=p, pp=2 * pt, r=r, s=pt))
                            continue
                        thm = instantiate("THM_2_3", dict(n=n, L=L, p=p, pp=2 * pt, r=r, s=pt))
                        assert cor == thm


def test_small_primed_parameter_gives_no_cor_2_4_instance():
    with pytest.raises(ParameterError):
        instantiate("COR_2_4", dict(n=2, L=3, p=1, pt=1, r=1))


def test_families_sit_in_their_regimes():
    cases = [
        ("THM_2_2", dict(L=4, p=2, pp=5, r=1, s=3)),
        ("THM_2_3", dict(n=3, L=5, p=2, pp=3, r=1, s=2)),
        ("COR_2_4", dict(n=2, L=3, p=3, pt=2, r=2)),
        ("THM_2_5", dict(n=2, L=5, nu=2, s=1)),
        ("THM_2_6", dict(n=2, t=1, L=4, p=2, pp=3, r=1, s=1)),
        ("THM_2_7", dict(n=3, t=1, L=6, p=2, pp=3, r=1, s=2)),
        ("EX_I", dict(N=4, a=1)),
        ("EX_II", dict(N=4, a=0)),
    ]
    for fam, params in cases:
        p = instantiate(fam, params)
        reg = validate(p, FAMILY_REGIME[fam])
        assert reg.satisfied, (fam, reg.violated_condition)


def test_ex2_two_displays_agree():
    for N in range(21):
        for a in (0, 1):
            assert display_ex2(N, a) == display_ex2(N, a, flipped=True)


def test_borwein_product_split():
    for N in range(6):
        A, B, C = borwein_abc(N)
        assert A == d_poly(instantiate("BORWEIN_A", {"N": N}))
        if N:
            assert B == d_poly(instantiate("BORWEIN_B", {"N": N}))
            assert C == d_poly(instantiate("BORWEIN_C", {"N": N}))


def test_verdict_reports_negative_coefficients():
    v = Verdict.of("k", Polynomial([1, -2, 3]))
    assert not v.passed
    assert v.first_negative == (1, -2)
    assert v.to_json(timing=False)["polynomial"] == {"offset": 0, "coeffs": ["1", "-2", "3"]}
    assert "elapsed_ms" not in v.to_json(timing=False)


def test_cache_round_trip(tmp_path):
    cache = VerdictCache(tmp_path)
    v = Verdict.of("D|x", Polynomial([2, 1], offset=3), elapsed_ms=5)
    cache.append([v])
    with open(cache.path, "a") as fh:
        fh.write("{not json\n")
        fh.write(json.dumps(dict(v.cache_record(), key="old", engine="other")) + "\n")
    back = VerdictCache(tmp_path).load()
    assert list(back) == ["D|x"]
    got = back["D|x"]
    assert (got.degree, got.offset, got.min_coeff, got.passed) == (4, 3, 1, True)
    rec = v.cache_record()
    assert rec["engine"] == ENGINE
    assert set(rec) >= {"key", "engine", "passed", "first_negative", "degree", "min_coeff", "elapsed_ms"}


def test_sweep_uses_cache(tmp_path):
    first, s1 = sweep("COR_1_2", 5, max_K=4, cache_dir=tmp_path)
    second, s2 = sweep("COR_1_2", 5, max_K=4, cache_dir=tmp_path)
    assert s1["cache_hits"] == 0 and s2["cache_hits"] == s2["tuples_checked"] > 0
    assert report_lines(first, s1) == report_lines(second, s2)


def test_sweep_is_deterministic_across_jobs():
    a, sa = sweep("CONJ_1_3", 6, max_K=3, jobs=1)
    b, sb = sweep("CONJ_1_3", 6, max_K=3, jobs=2)
    assert report_lines(a, sa) == report_lines(b, sb)
    assert sa["violations"] == 0


def test_sweep_tuples_filters():
    tuples = sweep_tuples("CONJ_2_1", 4, K=6, i=2, den=2)
    assert tuples and all(p.K == 6 and p.i == 2 for p in tuples)
    assert all((p.alpha * 2).denominator == 1 for p in tuples)
    assert any(p.alpha.denominator == 2 for p in tuples)
    assert all(validate(p, "CONJ_2_1").satisfied for p in tuples)
    g = sweep_tuples("CONJ_1_3", 3, K=2)
    assert g and all(p.K == 4 and p.i == 2 for p in g)


def test_family_key_is_canonical():
    assert family_key("EX_I", {"a": 1, "N": Fraction(4)}) == "EX_I|N=4,a=1"
