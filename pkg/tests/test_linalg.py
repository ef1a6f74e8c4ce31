import os
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from curvedhh.exactalg import GF, QQ, RationalFunctionField
from curvedhh.linalg import SparseMatrix, in_span, nullspace, rank, rank_modp, rref_modp, solve
from curvedhh.linalg import kernels
from oracles import staircase_rank

small_matrices = st.tuples(st.integers(1, 7), st.integers(1, 7)).flatmap(
    lambda s: arrays(np.int64, s, elements=st.integers(-4, 4)))


@settings(max_examples=80, deadline=None)
@given(small_matrices)
def test_property_rank_over_QQ_matches_oracle(A):
    M = SparseMatrix.from_dense(A.tolist())
    assert rank(M, QQ) == staircase_rank(A.tolist())


@settings(max_examples=80, deadline=None)
@given(small_matrices, st.sampled_from([2, 3, 7]))
def test_property_rank_mod_p_matches_oracle(A, p):
    M = SparseMatrix.from_dense(A.tolist())
    assert rank(M, GF(p)) == staircase_rank(A.tolist(), p)
    assert rank_modp(A, p, backend="numpy") == staircase_rank(A.tolist(), p)


@settings(max_examples=60, deadline=None)
@given(small_matrices)
def test_property_nullspace_is_annihilated(A):
    M = SparseMatrix.from_dense(A.tolist())
    N = nullspace(M, QQ)
    assert len(N) == M.ncols - rank(M, QQ)
    for v in N:
        assert all(x == 0 for x in M.matvec(v).values())


@settings(max_examples=60, deadline=None)
@given(small_matrices, st.lists(st.integers(-3, 3), min_size=7, max_size=7))
def test_property_solve_consistent_systems(A, x):
    M = SparseMatrix.from_dense(A.tolist())
    b = {i: v for i, v in enumerate(A @ np.array(x[:A.shape[1]])) if v}
    sol = solve(M, b, QQ)
    assert sol is not None
    got = M.matvec(sol)
    assert {i: v for i, v in got.items() if v} == {i: Fraction(int(v)) for i, v in b.items()}


def test_solve_inconsistent():
    M = SparseMatrix.from_dense([[1, 0], [1, 0]])
    assert solve(M, {0: 1, 1: 2}, QQ) is None


def test_in_span():
    assert in_span([{0: 1, 1: 1}], {0: 2, 1: 2}, QQ)
    assert not in_span([{0: 1}], {1: 1}, QQ)


def test_rank_over_rational_function_field():
    F = RationalFunctionField(3)
    s = F.gen
    M = SparseMatrix(2, 2, [{0: s, 1: F.one}, {0: s * s, 1: s}])
    assert rank(M, F) == 1


def test_large_rational_rank_uses_modular_shortcut_correctly():
    rng = np.random.default_rng(1)
    A = rng.integers(-3, 4, size=(20, 12)) @ rng.integers(-3, 4, size=(12, 30))
    assert rank(SparseMatrix.from_dense(A.tolist()), QQ) == staircase_rank(A.tolist())


@pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba backend disabled")
@settings(max_examples=60, deadline=None)
@given(small_matrices, st.sampled_from([3, 101, kernels.LARGE_PRIME]))
def test_property_numba_and_numpy_agree(A, p):
    assert rank_modp(A, p, backend="numba") == rank_modp(A, p, backend="numpy")
    R1, r1, piv1 = rref_modp(A, p, backend="numba")
    R2, r2, piv2 = rref_modp(A, p, backend="numpy")
    assert r1 == r2 and list(piv1) == list(piv2)
    assert np.array_equal(R1 % p, R2 % p)


def test_rank_modp_does_not_modify_input():
    A = np.array([[2, 4], [1, 2]], dtype=np.int64)
    B = A.copy()
    rank_modp(A, 7)
    assert np.array_equal(A, B)


@pytest.mark.parametrize("flag, expected", [("0", "numpy"), ("off", "numpy")])
def test_env_flag_selects_numpy(flag, expected):
    code = "from curvedhh.linalg.kernels import active_backend; print(active_backend())"
    env = dict(os.environ, CURVEDHH_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == expected


def test_env_flag_enables_numba_when_installed():
    pytest.importorskip("numba")
    code = "from curvedhh.linalg.kernels import active_backend; print(active_backend())"
    env = dict(os.environ, CURVEDHH_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numba"
