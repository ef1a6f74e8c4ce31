import math
from functools import reduce

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvedhh.curved import curved_algebra
from curvedhh.derham import (CHERN, DifferentialForms, derham_d, in_nonreg_at_point, nonreg_locus, sing_locus,
                             tilde_construction, twisted_cohomology, twisted_derham)
from curvedhh.errors import ImperfectGroundField, NonzeroWeightInput, NotRegularSequence, ZeroCurvature
from curvedhh.exactalg import GF, QQ, RationalFunctionField, buchberger
from curvedhh.homcx import check_complex, cohomology_window

X3 = curved_algebra(QQ, ["x"], [2], "x^3*t")


def gens(ideal):
    return [str(g) for g in buchberger(ideal)]


def test_milnor_x3():
    tab, md = twisted_cohomology(twisted_derham(X3))
    assert tab.nonzero() == {(1, 0): 1, (1, 2): 1}
    assert md.to_json() == {"jacobian": ["3*x^2"], "dim": 2, "hilbert": {"0": 1, "2": 1},
                            "regular_sequence": True}


def test_milnor_x3_y3_even_parity():
    B = curved_algebra(QQ, ["x", "y"], [2, 2], "x^3*t + y^3*t")
    tab, md = twisted_cohomology(twisted_derham(B))
    assert tab.nonzero() == {(0, 0): 1, (0, 2): 2, (0, 4): 1}
    assert md.to_json()["dim"] == 4
    assert cohomology_window(twisted_derham(B).complex, (0, 8)).nonzero() == tab.nonzero()


def test_chern_convention_shifts_weights():
    B = curved_algebra(QQ, ["x", "y"], [2, 2], "x^3*t + y^3*t")
    assert cohomology_window(twisted_derham(B, CHERN).complex, (-4, 8)).nonzero() == {
        (0, -2): 1, (0, 0): 2, (0, 2): 1}


def test_zero_curvature_gives_forms():
    G = curved_algebra(QQ, ["x"], [1], "0", ground="field")
    assert cohomology_window(twisted_derham(G).complex, (0, 3)).nonzero() == {
        (0, 0): 1, (0, 1): 1, (0, 2): 1, (0, 3): 1, (1, 1): 1, (1, 2): 1, (1, 3): 1}


def test_char_p_differential_vanishes():
    C = curved_algebra(GF(3), ["x"], [1], "x^3*t")
    T = twisted_derham(C)
    assert str(T.dw) == "0"
    assert cohomology_window(T.complex, (0, 4)).nonzero() == {
        (0, 2): 1, (0, 3): 1, (0, 4): 1, (1, 0): 1, (1, 1): 1, (1, 2): 1, (1, 3): 1, (1, 4): 1}
    with pytest.raises(NotRegularSequence):
        twisted_cohomology(T)


def test_imperfect_example():
    F = RationalFunctionField(3)
    D = curved_algebra(F, ["x", "y"], [2, 6], "y*x^3*t - s*y*t")
    assert str(twisted_derham(D).dw) == "(x^3 + 2*s)*dy"
    assert gens(sing_locus(D)) == ["x^3 + 2*s"]
    with pytest.raises(ImperfectGroundField):
        nonreg_locus(D)


def test_loci():
    assert gens(sing_locus(X3)) == ["x^2"]
    assert gens(nonreg_locus(X3)) == ["x^2"]
    C = curved_algebra(GF(3), ["x"], [1], "x^3*t")
    assert gens(sing_locus(C)) == []
    assert gens(nonreg_locus(C)) == ["x^3"]
    assert in_nonreg_at_point(X3, {"x": 0}) and not in_nonreg_at_point(X3, {"x": 1})
    with pytest.raises(ZeroCurvature):
        nonreg_locus(curved_algebra(QQ, ["x"], [2], "0"))


def test_derham_d_examples():
    R = X3.Q
    f = DifferentialForms.function(R("x"), ("x",))
    assert str(derham_d(f)) == "dx"
    assert not derham_d(derham_d(f))
    S = curved_algebra(QQ, ["x", "y"], [2, 2], "0", ground="field").Q
    xdy = DifferentialForms(S, ("x", "y"), {(1,): S("x")})
    assert str(derham_d(xdy)) == "dx^dy"
    assert derham_d(xdy).terms == {(0, 1): S.one()}


def test_tilde_construction():
    t1 = tilde_construction(QQ, ["x"], [2], ["x^3"])
    assert str(t1.w) == "x^3*t"
    assert str(twisted_derham(t1).dw) == "3*x^2*t*dx + x^3*dt"
    t2 = tilde_construction(QQ, ["x"], [2], ["x^3"], base="poly")
    assert str(twisted_derham(t2).dw) == "3*x^2*t*dx"
    assert str(tilde_construction(QQ, ["x", "y"], [2, 2], ["x", "y"]).w) == "x*t1 + y*t2"


def test_tilde_construction_rejects_weight():
    with pytest.raises(NonzeroWeightInput):
        tilde_construction(QQ, ["x"], [2], ["x^3 + x"])


# ---------------------------------------------------------------- Brieskorn-Pham oracle

def brieskorn(exponents):
    """Curvature Σ x_i^{a_i} t with weights making it homogeneous, and its Milnor Hilbert series."""
    L = reduce(math.lcm, exponents)
    names = ["x", "y", "z"][:len(exponents)]
    weights = [2 * L // a for a in exponents]
    w = " + ".join(f"{v}^{a}*t" for v, a in zip(names, exponents))
    series = {0: 1}
    for wt, a in zip(weights, exponents):
        nxt = {}
        for k, c in series.items():
            for j in range(a - 1):
                nxt[k + j * wt] = nxt.get(k + j * wt, 0) + c
        series = nxt
    return curved_algebra(QQ, names, weights, w), series


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(2, 5), min_size=1, max_size=3))
def test_property_milnor_product_formula(exponents):
    alg, series = brieskorn(exponents)
    tab, md = twisted_cohomology(twisted_derham(alg))
    parity = len(exponents) % 2
    assert md.to_json()["dim"] == math.prod(a - 1 for a in exponents)
    assert tab.nonzero() == {(parity, w): c for w, c in series.items()}


@settings(max_examples=12, deadline=None)
@given(st.lists(st.integers(2, 4), min_size=1, max_size=2))
def test_property_window_mode_agrees_with_fast_path(exponents):
    alg, series = brieskorn(exponents)
    T = twisted_derham(alg)
    assert check_complex(T.complex).ok
    hi = max(series)
    fast, _ = twisted_cohomology(T)
    slow, _ = twisted_cohomology(T, "window", (0, hi))
    assert slow.nonzero() == fast.nonzero()


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.lists(st.integers(0, 3), min_size=1, max_size=3))
def test_property_frobenius_degeneration(p, coeffs):
    u = " + ".join(f"{c}*x^{i + 1}" for i, c in enumerate(coeffs) if c) or "x"
    C = curved_algebra(GF(p), ["x"], [1], f"({u})^{p}*t")
    assert twisted_derham(C).dw.is_zero()


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(-3, 3)), min_size=1, max_size=4))
def test_property_d_squared_zero(terms):
    S = curved_algebra(QQ, ["x", "y"], [2, 2], "0", ground="field").Q
    f = sum((S.monomial((a, b), c) for a, b, c in terms), S.zero())
    form = DifferentialForms.function(f, ("x", "y"))
    assert derham_d(derham_d(form)).is_zero()
    g = DifferentialForms(S, ("x", "y"), {(0,): f})
    assert derham_d(derham_d(g)).is_zero()
