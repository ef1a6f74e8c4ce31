import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvedhh.curved import (curved_algebra, curved_module_new, dual, endomorphism_dga, enveloping,
                             koszul_curved, psi_tensor, regular_triviality_probe, support_exclude,
                             support_include)
from curvedhh.derham import tilde_construction
from curvedhh.errors import CurvatureDecompositionInvalid, CurvatureMismatch, GroundRingMismatch, WeightError
from curvedhh.exactalg import GF, QQ, RationalFunctionField
from curvedhh.homcx import Infeasible, cohomology_window
from oracles import Staircase

A = curved_algebra(QQ, ["x"], [2], "x^2*t")
K = koszul_curved(A, ["x"], ["x*t"])
FIELD = curved_algebra(QQ, ["x"], [2], "0", ground="field")


def strs(M):
    return [[str(e) for e in row] for row in M]


def test_matrix_factorization_accepted():
    X = curved_module_new(A, (0, 1), [["0", "x*t"], ["x", "0"]])
    assert X.is_valid()
    assert strs(X.matrix_with_t()) == [["0", "x*t"], ["x", "0"]]


def test_curvature_mismatch_reports_defect():
    with pytest.raises(CurvatureMismatch) as exc:
        curved_module_new(A, (0, 1), [["0", "t"], ["x", "0"]])
    assert "d² − w·id" in str(exc.value)


def test_zero_curvature_zero_differential():
    Z0 = curved_module_new(FIELD, (0,), [["0"]])
    assert Z0.is_valid()
    assert endomorphism_dga(Z0).verify() == {"d2": True, "leibniz": True, "identity_closed": True}


def test_koszul_matches_matrix_form():
    assert strs(K.matrix_with_t()) == [["0", "x*t"], ["x", "0"]]
    assert K.degrees == (0, 1) and K.rank == 2


def test_koszul_rank_four():
    B = curved_algebra(QQ, ["x", "y"], [2, 2], "x^2*t + y^2*t")
    K2 = koszul_curved(B, ["x", "y"], ["x*t", "y*t"])
    assert K2.rank == 4 and K2.is_valid()


def test_koszul_trivial_decomposition():
    C = curved_algebra(QQ, ["x", "y"], [2, 2], "x^3*t + x*y^2*t")
    assert koszul_curved(C, ["x^3 + x*y^2"], ["t"]).is_valid()


def test_koszul_rejects_bad_decomposition():
    with pytest.raises(CurvatureDecompositionInvalid):
        koszul_curved(A, ["x"], ["t"])


def test_enveloping_and_psi_tensor():
    E = enveloping(A)
    assert [v for v in E.ring.variables] == ["x", "x'", "t"]
    assert str(E.w) == "x^2*t - x'^2*t"
    P = psi_tensor(K, K)
    assert P.rank == 4 and P.is_valid() and P.alg.w == E.w
    empty = curved_module_new(A, (), [])
    assert psi_tensor(K, empty).rank == 0


def test_psi_tensor_ground_mismatch():
    B = curved_algebra(QQ, ["x"], [2], "x^2*t")
    Kf = curved_module_new(FIELD, (0,), [["0"]])
    with pytest.raises(GroundRingMismatch):
        psi_tensor(koszul_curved(B, ["x"], ["x*t"]), Kf)


def test_dual_is_valid():
    D = dual(K)
    assert D.is_valid() and D.rank == 2


def test_endomorphism_dga():
    D = endomorphism_dga(K)
    assert D.rank == 4
    assert D.verify() == {"d2": True, "leibniz": True, "identity_closed": True}
    assert D.homology((0, 4)).nonzero() == {(0, 0): 1, (1, 0): 1}


def test_support_exclude_koszul():
    c = support_exclude(K, "x", 1, 0)
    assert c.to_json() == {"kind": "OUT", "g": "x", "m": 1, "h": [["0", "0"], ["1", "0"]]}
    assert c.verify(K)


def test_support_exclude_infeasible_for_zero_differential():
    Z0 = curved_module_new(FIELD, (0,), [["0"]])
    assert isinstance(support_exclude(Z0, "x", 2, 3), Infeasible)


def test_support_include():
    assert support_include(K, {"x": 0}).dims == (2, 2)
    assert support_include(K, {"x": 1}).dims == (0, 0)
    assert support_include(curved_module_new(A, (), []), {"x": 0}).dims == (0, 0)


def test_regular_triviality_probe():
    C1 = curved_algebra(QQ, ["x"], [2], "x*t")
    rep = regular_triviality_probe(C1, koszul_curved(C1, ["x"], ["t"]))
    assert rep.applicable and rep.agrees and rep.to_json()["nonreg"] == ["1"]
    rep = regular_triviality_probe(A, K)
    assert not rep.applicable and rep.to_json()["nonreg"] == ["x"]


def test_regular_triviality_probe_zero_curvature():
    rep = regular_triviality_probe(FIELD, curved_module_new(FIELD, (0,), [["0"]]))
    assert not rep.applicable


# ---------------------------------------------------------------- properties

exps = st.integers(1, 4)


@settings(max_examples=20, deadline=None)
@given(exps, st.integers(1, 4))
def test_property_koszul_curvature_identity(a, k):
    k = min(k, a)
    B = curved_algebra(QQ, ["x", "y"], [2, 2], f"x^{a}*t + y^{a}*t")
    X = koszul_curved(B, [f"x^{k}", "y"], [f"x^{a - k}*t", f"y^{a - 1}*t"])
    assert X.is_valid()
    assert all(endomorphism_dga(X).verify().values())
    assert psi_tensor(X, X).is_valid()


@settings(max_examples=15, deadline=None)
@given(exps, st.sampled_from([0, 1, 2]), st.sampled_from([0, 1, 2]))
def test_property_support_certificates_consistent(a, px, py):
    B = curved_algebra(QQ, ["x", "y"], [2, 2], f"x^{a}*t + y^{a}*t")
    X = koszul_curved(B, ["x", "y"], [f"x^{a - 1}*t", f"y^{a - 1}*t"])
    inc = support_include(X, {"x": px, "y": py})
    for g in ("x", "y"):
        out = support_exclude(X, g, 4, 3)
        if out and inc.dims != (0, 0):
            assert {"x": px, "y": py}[g] == 0


@settings(max_examples=15, deadline=None)
@given(st.lists(exps, min_size=1, max_size=3))
def test_property_classical_koszul_reduction(powers):
    names = ["x", "y", "z"][:len(powers)]
    F = curved_algebra(QQ, names, [2] * len(names), "0", ground="field")
    X = koszul_curved(F, [f"{v}^{a}" for v, a in zip(names, powers)], ["0"] * len(names))
    C = X.complex()
    table = cohomology_window(C, (0, 8))
    gens = [tuple(a if i == j else 0 for j in range(len(powers))) for i, a in enumerate(powers)]
    hilbert = Staircase(len(powers), 4).hilbert(gens)
    end = max(C.positions)
    for p in C.positions:
        for d in range(5):
            assert table.get(p, 2 * d) == (hilbert[d] if p == end else 0)


def test_characteristic_p_module():
    C = curved_algebra(GF(3), ["x"], [2], "x^3*t")
    X = koszul_curved(C, ["x"], ["x^2*t"])
    assert X.is_valid() and support_exclude(X, "x", 1, 0)


def test_odd_weight_curvature_gives_ungraded_module():
    C = curved_algebra(GF(3), ["x"], [1], "x^3*t")
    assert not C.has_half
    X = koszul_curved(C, ["x"], ["x^2*t"])
    assert X.is_valid() and X.weights == (0, 0) and X.shift == 0
    cert = support_exclude(X, "x", max_m=1)
    assert cert.to_json()["h"] == [["0", "0"], ["1", "0"]] and cert.verify(X)
    with pytest.raises(WeightError):
        curved_module_new(C, (0, 1), [["0", "x^2*t"], ["x", "0"]], weights=[0, 1])


def test_inhomogeneous_curvature_module():
    D = curved_algebra(RationalFunctionField(3), ["x", "y"], [2, 6], "y*(x^3 - s)*t")
    X = koszul_curved(D, ["y"], ["(x^3 - s)*t"])
    assert X.is_valid() and set(X.weights) == {0}
    assert support_exclude(X, "y", max_m=1).verify(X)


def test_koszul_over_tilde_construction():
    T = tilde_construction(QQ, ["x", "y"], [3, 2], ["x^2", "y^3"])
    assert T.odd_shift == 4
    X = koszul_curved(T, ["x", "y"], ["x*t1", "y^2*t2"])
    assert X.is_valid() and X.weights == (0, -1, -2, -3)
