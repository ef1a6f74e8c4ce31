import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvedhh.errors import InfiniteSlice, NotChainMap
from curvedhh.exactalg import QQ, PolyRing
from curvedhh.homcx import (ChainMap, CohomologyTable, FiniteComplex, FreeGradedModule, ModuleMap, Z2,
                            check_complex, cohomology_window, complex_from_maps, cone, euler_characteristic,
                            find_null_homotopy, fold_Z2, hom_complex, identity_map, scalar_endomorphism,
                            shift, strand, tensor, verify_homotopy)
from oracles import Staircase

R = PolyRing(QQ, ["x"], [2])
x = R.gen("x")
R2 = PolyRing(QQ, ["x", "y"], [2, 2])
X, Y = R2.gen("x"), R2.gen("y")


def mult(ring, f, w):
    return ModuleMap(ring, FreeGradedModule([0]), FreeGradedModule([0]), [[f]], w)


def koszul1(ring, f, shift=None):
    """The two-term complex R --f--> R; with ``shift`` the source is regraded so d has that shift."""
    if shift is None:
        return complex_from_maps(ring, [mult(ring, f, f.weight())])
    d = ModuleMap(ring, FreeGradedModule([f.weight() - shift]), FreeGradedModule([0]), [[f]], shift)
    return complex_from_maps(ring, [d])


K = koszul1(R, x)


def test_koszul_on_x():
    assert check_complex(K).ok
    assert cohomology_window(K, (0, 6)).nonzero() == {(1, 0): 1}


def test_koszul_on_x_squared():
    assert cohomology_window(koszul1(R, x ** 2), (0, 6)).nonzero() == {(1, 0): 1, (1, 2): 1}


def test_check_complex_reports_offending_entry():
    one = FreeGradedModule([0])
    bad = FiniteComplex(R, {0: one, 1: one, 2: one}, {0: mult(R, x, 2), 1: mult(R, x, 2)})
    rep = check_complex(bad)
    assert not rep.ok
    assert rep.to_json()["offending"] == {"position": 0, "row": 0, "col": 0, "value": "x^2"}


def test_cone_of_identity_is_acyclic():
    idK = ChainMap(K, K, {p: identity_map(R, K.module(p)) for p in K.positions})
    C = cone(idK)
    assert check_complex(C).ok
    assert C.positions == [-1, 0, 1]
    assert cohomology_window(C, (-2, 6)).nonzero() == {}
    h = find_null_homotopy(C, scalar_endomorphism(C, R.one()), 0)
    assert h and verify_homotopy(C, h, scalar_endomorphism(C, R.one()))


def test_non_chain_map_rejected():
    two = ModuleMap(R, FreeGradedModule([0]), FreeGradedModule([0]), [[R.one()]], 0)
    f = ChainMap(K, K, {0: two, 1: two.scale(2)})
    with pytest.raises(NotChainMap):
        cone(f)


def test_null_homotopy_search():
    assert not find_null_homotopy(K, scalar_endomorphism(K, R.one()), 3)
    h = find_null_homotopy(K, scalar_endomorphism(K, x), 0)
    assert h.to_json() == {"degree_bound": 0,
                           "components": {"1": {"shift": 0, "source": [0], "target": [0], "matrix": [["1"]]}}}
    assert verify_homotopy(K, h, scalar_endomorphism(K, x))


def test_tensor_hom_fold_shift():
    Kx, Ky = koszul1(R2, X), koszul1(R2, Y)
    T = tensor(Kx, Ky)
    assert check_complex(T).ok
    assert cohomology_window(T, (0, 8)).nonzero() == {(2, 0): 1}
    H = hom_complex(Kx, Kx)
    assert check_complex(H).ok and H.positions == [-1, 0, 1]
    assert cohomology_window(H, (-2, 4)).nonzero() == {
        (0, 0): 1, (0, 2): 1, (0, 4): 1, (1, 0): 1, (1, 2): 1, (1, 4): 1}
    F = fold_Z2(T)
    assert F.mode == Z2
    assert cohomology_window(F, (0, 8)).nonzero() == {(0, 0): 1}
    assert cohomology_window(shift(K, 1), (0, 4)).nonzero() == {(0, 0): 1}


def test_infinite_slice_rejected():
    S = PolyRing(QQ, ["x", "u"], [2, 0])
    with pytest.raises(InfiniteSlice):
        cohomology_window(koszul1(S, S.gen("x")), (0, 2))


def test_csv_roundtrip():
    T = cohomology_window(koszul1(R, x ** 3), (0, 6))
    back = CohomologyTable.from_csv(T.to_csv(), (0, 6))
    assert back.nonzero() == T.nonzero()


def test_json_dump_is_stable():
    assert K.dumps() == koszul1(R, x).dumps()


# ---------------------------------------------------------------- properties against a staircase oracle

@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4))
def test_property_koszul_complex_computes_quotient(a, b):
    T = tensor(koszul1(R2, X ** a, 2), koszul1(R2, Y ** b, 2))
    table = cohomology_window(T, (0, 16))
    hilbert = Staircase(2, 8).hilbert([(a, 0), (0, b)])
    for d in range(0, 9):
        assert table.get(2, 2 * d) == hilbert[d]
        assert table.get(0, 2 * d) == 0 and table.get(1, 2 * d) == 0


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 12))
def test_property_euler_characteristic_matches_cohomology(a, b, w):
    T = tensor(koszul1(R2, X ** a + Y ** a, 2), koszul1(R2, X ** b, 2))
    slices = strand(T, w)
    table = cohomology_window(T, (w, w + 4))
    assert sum((-1) ** p * table.get(p, v) for p, v in slices) == euler_characteristic(T, w)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(0, 12))
def test_property_euler_characteristic_independent_of_differential(a, w):
    T = tensor(koszul1(R2, X ** a, 2), koszul1(R2, Y ** a, 2))
    zero = FiniteComplex(R2, dict(T.modules),
                         {p: ModuleMap(R2, T.module(p), T.module(p + 1), None, 2) for p in T.positions[:-1]})
    hz = cohomology_window(zero, (w, w + 4))
    ht = cohomology_window(T, (w, w + 4))
    slices = strand(T, w)
    chi = euler_characteristic(T, w)
    assert chi == euler_characteristic(zero, w)
    assert chi == sum((-1) ** p * hz.get(p, v) for p, v in slices)
    assert chi == sum((-1) ** p * ht.get(p, v) for p, v in slices)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.integers(0, 3))
def test_property_cone_of_identity_acyclic(a, n):
    C0 = shift(koszul1(R, x ** a), n)
    C = cone(ChainMap(C0, C0, {p: identity_map(R, C0.module(p)) for p in C0.positions}))
    assert check_complex(C).ok
    assert cohomology_window(C, (0, 8)).nonzero() == {}


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3))
def test_property_fold_preserves_total_cohomology(a):
    T = tensor(koszul1(R2, X ** a, 2), koszul1(R2, Y, 2))
    full = cohomology_window(T, (0, 10))
    folded = cohomology_window(fold_Z2(T), (0, 10))
    for w in range(0, 11):
        even = sum(full.get(p, w) for p in T.positions if p % 2 == 0)
        odd = sum(full.get(p, w) for p in T.positions if p % 2)
        assert (folded.get(0, w), folded.get(1, w)) == (even, odd)


def test_tensor_with_unit_complex_is_identity():
    unit = FiniteComplex(R, {0: FreeGradedModule([0])}, {})
    K3 = koszul1(R, x ** 3)
    assert cohomology_window(tensor(K3, unit), (0, 8)).nonzero() == cohomology_window(K3, (0, 8)).nonzero()


def test_hom_identity_is_a_cycle():
    from curvedhh.homcx import apply_hom_differential, hom_element
    H = hom_complex(K, K)
    ident = hom_element(H, 0, {p: identity_map(R, K.module(p)) for p in K.positions})
    assert all(not v for v in apply_hom_differential(H, 0, ident).values())
