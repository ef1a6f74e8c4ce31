import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvedhh.curved import curved_algebra
from curvedhh.derham import twisted_cohomology, twisted_derham
from curvedhh.errors import ImperfectGroundField, NonCyclicPresentation, UnitInput
from curvedhh.exactalg import GF, QQ, IdealBasis, PolyRing, RationalFunctionField
from curvedhh.homcx import FiniteComplex, FreeGradedModule
from curvedhh.localcoh import (FG, NOT_FG, cech_complex, not_supported_on_V, presentation_from_derham,
                               rgamma_koszul_limit, rgamma_principal, smoothness_check)

X3 = twisted_derham(curved_algebra(QQ, ["x"], [2], "x^3*t"))
CHARP = twisted_derham(curved_algebra(GF(3), ["x"], [1], "x^3*t"))


def test_rgamma_supported_case_copies_cohomology():
    r = rgamma_principal(X3, "x^3", (0, 4))
    assert r.verdict == FG and r.path == "a"
    assert r.nonzero() == {(1, 0): 1, (1, 2): 1}
    assert r.to_json()["saturations"] == [{"position": 1, "ideal": ["x^2"], "saturation": ["1"]}]


def test_rgamma_char_p_not_finitely_generated():
    r = rgamma_principal(CHARP, "x^3", (-10, 2))
    assert r.verdict == NOT_FG and r.path == "b"
    for w in range(-10, 0):
        assert r.get(0, w) == 1 and r.get(1, w) == 1
    assert r.to_json()["witness"] is not None


def test_rgamma_unit_is_zero():
    assert rgamma_principal(X3, "1", (0, 4)).nonzero() == {}


def test_rgamma_rejects_non_cyclic():
    with pytest.raises(NonCyclicPresentation):
        rgamma_principal(object(), "x", (0, 1))


def test_not_supported_on_V_examples():
    F = RationalFunctionField(3)
    R = PolyRing(F, ["x", "y"])
    I = IdealBasis(R, [R("x^3 - s")])
    assert not_supported_on_V(I, [R("y"), R("x^3 - s")]).to_json() == {
        "value": True, "certificate": ["x^3 + 2*s"], "generator": "y"}
    assert not not_supported_on_V(I, R("y*(x^3 - s)"))
    Rx = PolyRing(QQ, ["x"])
    v = not_supported_on_V(IdealBasis(Rx, [Rx("x^2")]), Rx("x"))
    assert not v and v.certificate == ["1"]
    assert not not_supported_on_V(IdealBasis(Rx, [Rx("1")]), Rx("x"))


def test_smoothness_examples():
    Rx = PolyRing(QQ, ["x"])
    v = smoothness_check(Rx, "x^3")
    assert v.value and v.verify(Rx("x^3"))
    assert v.to_json()["memberships"] == [{"element": "1", "m": 1, "cofactors": ["1/3*x"]}]
    Rxy = PolyRing(QQ, ["x", "y"])
    assert smoothness_check(Rxy, "x^2 + y^2").value
    v = smoothness_check(PolyRing(GF(3), ["x"]), "x^3")
    assert not v.value and v.to_json()["failing"] == ["x^3"]


def test_smoothness_errors():
    with pytest.raises(UnitInput):
        smoothness_check(PolyRing(QQ, ["x"]), "1")
    with pytest.raises(ImperfectGroundField):
        smoothness_check(PolyRing(RationalFunctionField(3), ["x"]), "x^3 - s")


def test_koszul_limit_examples():
    L = PolyRing(QQ, ["x"])
    L1 = FiniteComplex(L, {0: FreeGradedModule([0])}, {})
    assert rgamma_koszul_limit(L1, ["x"], 4, (-3, 0)).to_json()["values"] == {
        "0": {"-3": 0, "-2": 0, "-1": 0, "0": 0}, "1": {"-3": 1, "-2": 1, "-1": 1, "0": 0}}
    rep = rgamma_koszul_limit(L1, ["1"], 3, (-3, 0))
    assert rep.all_stabilized and not any(rep.values.values())


def test_koszul_limit_agrees_with_char_p_path():
    r = rgamma_principal(CHARP, "x^3", (-10, 2))
    k = rgamma_koszul_limit(CHARP.complex, ["x^3"], 5, (-10, 2))
    assert k.all_stabilized and k.values == r.dims


def test_cech_complex_structure():
    R = PolyRing(QQ, ["x", "y"])
    C = cech_complex([R("x"), R("y")]).to_json()
    assert C == {"gens": ["x", "y"], "positions": {"0": ["1"], "1": ["x", "y"], "2": ["x*y"]}}


# ---------------------------------------------------------------- properties

@settings(max_examples=20, deadline=None)
@given(st.integers(2, 4), st.integers(1, 2), st.integers(1, 3))
def test_property_supported_rgamma_is_identity_and_matches_koszul_limit(a, n, power):
    names = ["x", "y"][:n]
    f = " + ".join(f"{v}^{a}" for v in names)
    T = twisted_derham(curved_algebra(QQ, names, [2] * n, f"({f})*t"))
    hi = 2 * n * (a - 2)
    H, _ = twisted_cohomology(T)
    r = rgamma_principal(T, f"({f})^{power}", (0, hi))
    assert r.verdict == FG and r.nonzero() == H.nonzero()
    k = rgamma_koszul_limit(T.complex, [f], 3, (0, hi))
    for key, v in k.values.items():
        if k.stabilized[key]:
            assert v == r.get(*key)


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(1, 2))
def test_property_nonsmooth_implies_not_finitely_generated(p, k):
    alg = curved_algebra(GF(p), ["x"], [1], f"x^{p * k}*t")
    assert not smoothness_check(alg.Q, f"x^{p * k}").value
    r = rgamma_principal(twisted_derham(alg), f"x^{p * k}", (-6, 0))
    assert r.verdict == NOT_FG


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(1, 2), st.integers(-8, -1))
def test_property_localization_exactness_univariate(p, k, lo):
    T = twisted_derham(curved_algebra(GF(p), ["x"], [1], f"x^{p * k}*t"))
    r = rgamma_principal(T, f"x^{k}", (lo, 0))
    # the top generator sits in weight p*k - 1; Kos(x^{k l}) reaches weight lo once k*l > p*k - 1 - lo,
    # and one further level is needed before consecutive levels can agree
    l_max = -(-(p * k - lo) // k) + 1
    lim = rgamma_koszul_limit(T.complex, [f"x^{k}"], l_max, (lo, 0))
    assert lim.all_stabilized
    for key, v in lim.values.items():
        if lim.stabilized[key]:
            assert v == r.get(*key)


def test_presentation_from_derham():
    pres = presentation_from_derham(X3)
    assert [pc.to_json() for pc in pres.pieces] == [{"position": 1, "ideal": ["x^2"], "gen_weight": 0}]
