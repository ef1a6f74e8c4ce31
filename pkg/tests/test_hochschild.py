from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvedhh.curved import curved_algebra, koszul_curved
from curvedhh.errors import PositiveCharacteristic, UnboundedWeights
from curvedhh.exactalg import GF, QQ
from curvedhh.hochschild import (EndDga, certify_minimal_model, chern, chern_compatibility_check, connes_B,
                                 connes_B_composite, ground_field_dga, hochschild_truncated, homology_stabilized,
                                 apply_linear, identity_suite, one_object, random_chain,
                                 total_differential)

POLY_X = curved_algebra(QQ, ["x"], [1], "0", ground="field")
CURVED = curved_algebra(QQ, ["x"], [1], "x^2*t")


def hkr(n: int, j: int, m: int) -> int:
    """dim of Ω^j of Q[x_1..x_n] (all weights 1) in total weight m."""
    d = m - j
    return comb(n, j) * comb(d + n - 1, n - 1) if d >= 0 else 0


def test_ground_field():
    r = homology_stabilized(ground_field_dga(QQ), (3, 4, 5), (0, 2))
    assert r.all_stabilized and r.table.nonzero() == {(0, 0): 1}


def test_hkr_polynomial_ring_in_one_variable():
    T = hochschild_truncated(one_object(POLY_X), 5, (0, 4))
    assert T.d2["ok"]
    expected = {(0, m): 1 for m in range(5)} | {(-1, m): 1 for m in range(1, 5)}
    assert T.homology().nonzero() == expected
    r = homology_stabilized(POLY_X, (4, 5, 6, 7), (0, 3))
    assert r.all_stabilized
    assert r.table.nonzero() == {k: v for k, v in expected.items() if k[1] <= 3}


@pytest.mark.parametrize("n", [1, 2])
def test_hkr_matches_forms_oracle(n):
    names = ["x", "y"][:n]
    A = curved_algebra(QQ, names, [1] * n, "0", ground="field")
    r = homology_stabilized(A, (3, 4, 5), (0, 2))
    assert r.all_stabilized
    for j in range(0, n + 1):
        for m in range(0, 3):
            assert r.table.get(-j, m) == hkr(n, j, m)


def test_unbounded_weights_rejected():
    A = curved_algebra(QQ, ["x"], [0], "0", ground="field")
    with pytest.raises(UnboundedWeights):
        hochschild_truncated(one_object(A), 3, (0, 2))


def test_connes_operator_examples():
    P = one_object(POLY_X)
    (ex,) = P.poly_to_element(P.ring.gen("x"))
    Bx = connes_B(P, (ex,))
    assert Bx == {((0,), (1,)): 1}
    assert str(chern(P, Bx)) == "dx"
    T = hochschild_truncated(P, 5, (0, 3))
    assert T.check_connes() == {"B2": True, "bBBb": True}


def test_composite_B_matches_closed_form():
    P = one_object(POLY_X)
    T = hochschild_truncated(P, 5, (0, 4))
    for w in range(5):
        for basis in T.chains_of_weight(w).values():
            for c in basis:
                assert connes_B(P, c) == connes_B_composite(P, c)


def test_chern_examples():
    P = one_object(POLY_X)
    (ex,) = P.poly_to_element(P.ring.gen("x"))
    assert str(chern(P, (ex,))) == "x"
    assert str(chern(P, (ex, ex))) == "x*dx"
    assert chern(P, (P.unit, ex, ex)).is_zero()


def test_chern_requires_characteristic_zero():
    P = one_object(curved_algebra(GF(3), ["x"], [1], "0", ground="field"))
    (ex,) = P.poly_to_element(P.ring.gen("x"))
    with pytest.raises(PositiveCharacteristic):
        chern(P, (ex,))


def test_curved_truncation_identities():
    T = hochschild_truncated(one_object(CURVED), 5, (0, 4))
    assert T.d2["ok"] and T.d2["checked"] > 0
    assert T.check_connes()["B2"]
    assert identity_suite(CURVED, 5, (0, 4)) == {"d2": True, "B2": True, "bBBb": None, "chain_map": True,
                                                 "connes_derham": True}
    assert identity_suite(POLY_X, 5, (0, 3)) == {"d2": True, "B2": True, "bBBb": True, "chain_map": True,
                                                 "connes_derham": True}


def test_chern_compatibility_hundred_samples():
    rep = chern_compatibility_check(CURVED, 100, (0, 4))
    assert rep.ok and not rep.failures
    assert all(rep.surjective.values())
    assert rep.to_json()["samples"] == 100


def test_minimal_model_certificate():
    X = koszul_curved(CURVED, ["x"], ["x*t"])
    cert = certify_minimal_model(X, (0, 4))
    assert cert.to_json() == {"epsilon_square": "-1", "annihilators": ["x"], "fiber_dim": 4, "total_dim": 2,
                              "window_dims": {"0,0": 1, "1,0": 1}, "id_class": True, "epsilon_class": True,
                              "ok": True, "reason": ""}
    assert EndDga(X).verify(4) == {"associative": True, "leibniz": True, "d2": True, "dw": True}


def test_end_dga_minimal_model_homology():
    X = koszul_curved(CURVED, ["x"], ["x*t"])
    r = homology_stabilized(X, (4, 5, 6, 7, 8), (0, 4), model="minimal")
    assert r.all_stabilized and r.table.nonzero() == {(1, 0): 1}


@pytest.mark.slow
def test_end_dga_direct_bar_complex_agrees_with_minimal_model():
    X = koszul_curved(CURVED, ["x"], ["x*t"])
    direct = homology_stabilized(X, (1, 2, 3), (0, 4), model="direct")
    assert direct.all_stabilized
    assert direct.table.nonzero() == {(1, 0): 1}


# ---------------------------------------------------------------- properties

@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_property_total_differential_squares_to_zero_on_random_chains(seed):
    P = one_object(CURVED)
    rng = np.random.default_rng(seed)
    c = random_chain(P, rng, max_n=3)
    d = lambda chain: total_differential(P, chain)  # noqa: E731
    assert not {k: v for k, v in apply_linear(d, apply_linear(d, c)).items() if v}


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([("x^2*t", 1), ("x^3*t", 2), ("0", 1)]))
def test_property_chern_is_chain_map(seed, case):
    w, weight = case
    alg = curved_algebra(QQ, ["x"], [weight], w, ground="laurent" if w != "0" else "field")
    rep = chern_compatibility_check(alg, 20, (0, 3), seed=seed)
    assert rep.chain_map and rep.connes_derham, rep.failures
