import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gatelab.bipartite import (
    BipartiteOperator,
    Dims,
    NotUnitaryError,
    apply_local,
    density_R,
    density_T,
    haar_unitary,
    local_product,
    make_rng,
    partial_transpose,
    partial_transpose_array,
    reshuffle,
    reshuffle_array,
    schmidt_spectrum,
    swap_operator,
)

dims_st = st.tuples(st.integers(2, 4), st.integers(2, 4))


def _entry_reference(u, n, m):
    """Loop-based reshuffle and partial transpose, straight from the index definitions."""
    r = np.zeros((n * n, m * m), dtype=complex)
    t = np.zeros((n * m, n * m), dtype=complex)
    for i in range(n):
        for a in range(m):
            for j in range(n):
                for b in range(m):
                    r[i * n + j, a * m + b] = u[i * m + a, j * m + b]
                    t[j * m + a, i * m + b] = u[i * m + a, j * m + b]
    return r, t


@given(dims_st, st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_permutations_match_index_definition(nm, seed):
    n, m = nm
    u = haar_unitary(n * m, np.random.default_rng(seed))
    r, t = _entry_reference(u, n, m)
    np.testing.assert_array_equal(reshuffle_array(u, n, m), r)
    np.testing.assert_array_equal(partial_transpose_array(u, n, m), t)


@given(dims_st, st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_partial_transpose_is_involution(nm, seed):
    n, m = nm
    u = haar_unitary(n * m, np.random.default_rng(seed))
    twice = partial_transpose_array(partial_transpose_array(u, n, m), n, m)
    np.testing.assert_array_equal(twice, u)


def test_reshuffle_of_product_is_rank_one():
    rng = make_rng(1)
    op = local_product(haar_unitary(2, rng), haar_unitary(3, rng))
    sv = np.linalg.svd(reshuffle(op), compute_uv=False)
    assert sv[0] ** 2 == pytest.approx(6.0)
    assert np.all(sv[1:] < 1e-12)


def test_swap_reshuffle_is_swap():
    for n in (2, 3, 4):
        s = swap_operator(n)
        np.testing.assert_array_equal(reshuffle(s), s.mat)


def test_swap_acts_on_basis():
    s = swap_operator(3).mat
    for i in range(3):
        for j in range(3):
            e = np.zeros(9)
            e[i * 3 + j] = 1
            assert np.argmax(s @ e) == j * 3 + i


@given(dims_st, st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_schmidt_weights_sum_to_order(nm, seed):
    n, m = nm
    op = BipartiteOperator(Dims(n, m), haar_unitary(n * m, np.random.default_rng(seed)))
    spec = schmidt_spectrum(op)
    assert len(spec.values) == n * n
    assert spec.total == pytest.approx(n * m, abs=1e-9)
    assert np.all(np.diff(spec.values) <= 1e-12)


def test_density_matrices_have_unit_trace():
    op = BipartiteOperator(Dims(2, 3), haar_unitary(6, make_rng(2)))
    assert np.trace(density_R(op)).real == pytest.approx(1.0)
    assert np.trace(density_T(op)).real == pytest.approx(1.0)
    assert density_R(op).shape == (4, 4)


def test_haar_unitary_is_unitary_batched():
    u = haar_unitary(5, make_rng(3), size=7)
    eye = np.eye(5)
    for k in range(7):
        assert np.max(np.abs(u[k].conj().T @ u[k] - eye)) < 1e-12


def test_haar_phases_uniform():
    # first-moment check: E[u_00] = 0 and E|u_00|^2 = 1/d
    u = haar_unitary(3, make_rng(4), size=20000)
    assert abs(u[:, 0, 0].mean()) < 0.02
    assert np.mean(np.abs(u[:, 0, 0]) ** 2) == pytest.approx(1 / 3, abs=0.01)


def test_apply_local_matches_kron():
    rng = make_rng(5)
    w = haar_unitary(6, rng, size=3)
    ua, ub = haar_unitary(2, rng, size=3), haar_unitary(3, rng, size=3)
    got = apply_local(w, ua, ub)
    for k in range(3):
        np.testing.assert_allclose(got[k], np.kron(ua[k], ub[k]) @ w[k], atol=1e-13)


def test_dims_validation_and_parse():
    assert Dims.parse("2x3") == Dims(2, 3)
    assert str(Dims(4, 5)) == "4x5"
    with pytest.raises(ValueError):
        Dims(1, 3)
    with pytest.raises(ValueError):
        Dims.parse("2by3")


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError, match="does not match"):
        BipartiteOperator(Dims(2, 2), np.eye(6))


def test_require_unitary():
    op = BipartiteOperator(Dims(2, 2), np.eye(4) * 1.01)
    with pytest.raises(NotUnitaryError):
        op.require_unitary()
    assert not op.is_unitary()


def test_partial_transpose_wrapper_keeps_dims():
    op = BipartiteOperator(Dims(2, 3), haar_unitary(6, make_rng(6)))
    assert partial_transpose(op).dims == Dims(2, 3)


def test_make_rng_streams_are_independent_and_reproducible():
    a = make_rng(7, 0).standard_normal(4)
    b = make_rng(7, 1).standard_normal(4)
    np.testing.assert_array_equal(a, make_rng(7, 0).standard_normal(4))
    assert not np.allclose(a, b)
