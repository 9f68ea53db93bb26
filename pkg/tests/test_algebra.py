from fractions import Fraction

import numpy as np
import pytest

from kaclattice.algebra import (
    FiniteStarAlgebra,
    algebra_from_matrices,
    canonical_trace,
    canonical_weights_exact,
    commutative_algebra,
    conditional_expectation,
    function_of,
    left_regular,
    matrix_algebra,
    multimatrix_algebra,
    opposite_algebra,
    random_self_adjoint,
    scalars,
    spectrum_bounds,
    subalgebra_from_basis,
    tensor_algebra,
    wedderburn,
    xi_element,
)
from kaclattice.errors import (
    IncompatibleTrace,
    InvalidAlgebra,
    InvalidEmbedding,
)

RNG = np.random.default_rng(11)


def unit_index(n, i, j):
    # row-major position of the matrix unit e_ij in matrix_algebra(n)
    return n * i + j


def test_matrix_algebra_units():
    a = matrix_algebra(2)
    assert a.dim == 4
    e01 = np.zeros(4)
    e01[unit_index(2, 0, 1)] = 1.0
    e10 = np.zeros(4)
    e10[unit_index(2, 1, 0)] = 1.0
    e00 = np.zeros(4)
    e00[unit_index(2, 0, 0)] = 1.0
    assert np.allclose(a.product(e01, e10), e00)
    assert np.allclose(a.product(e10, e01) + a.product(e01, e10), a.unit)
    assert np.allclose(a.star_of(e01), e10)
    # normalized trace of a minimal projection in M_2 is 1/2
    assert a.trace @ e00 == pytest.approx(0.5)
    assert a.trace @ a.unit == pytest.approx(1.0)


def test_matrix_algebra_associative():
    a = matrix_algebra(3)
    res = np.einsum("ijp,pkq->ijkq", a.mult, a.mult) \
        - np.einsum("jkp,ipq->ijkq", a.mult, a.mult)
    assert np.abs(res).max() < 1e-12


def test_commutative_algebra_idempotents():
    a = commutative_algebra(3)
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1.0
        assert np.allclose(a.product(e, e), e)
        assert np.allclose(a.star_of(e), e)
    assert a.trace @ a.unit == pytest.approx(1.0)


def test_canonical_trace_values():
    w = canonical_trace((1, 2))
    assert np.allclose(w, [1 / 5, 4 / 5])
    assert canonical_weights_exact((1, 2)) == [Fraction(1, 5), Fraction(4, 5)]
    assert canonical_weights_exact((2, 3)) == [Fraction(4, 13), Fraction(9, 13)]


def test_multimatrix_blocks_and_trace():
    a = multimatrix_algebra((1, 2))
    assert a.dim == 5
    bs = wedderburn(a, seed=3)
    assert tuple(bs.block_sizes) == (1, 2)
    assert np.allclose(bs.weights, (1 / 5, 4 / 5))
    # trace of a minimal projection in the 2x2 block is weight / size
    p = bs.minimal_idempotent(1)
    assert np.allclose(a.product(p, p), p)
    assert a.trace @ p == pytest.approx(2 / 5)


def test_wedderburn_recovers_matrix_factor():
    a = tensor_algebra(matrix_algebra(2), matrix_algebra(2))
    bs = wedderburn(a, seed=0)
    assert tuple(bs.block_sizes) == (4,)
    z = tensor_algebra(commutative_algebra(2), matrix_algebra(2))
    assert sorted(wedderburn(z, seed=0).block_sizes) == [2, 2]


def test_opposite_algebra_reverses_products():
    a = multimatrix_algebra((2, 1))
    o = opposite_algebra(a)
    assert np.allclose(o.mult, a.mult.transpose(1, 0, 2))
    x = random_self_adjoint(a, RNG)
    y = random_self_adjoint(a, RNG)
    assert np.allclose(o.product(x, y), a.product(y, x))


def test_algebra_from_matrices_pauli_span():
    sx = np.array([[0, 1], [1, 0]], complex)
    sy = np.array([[0, -1j], [1j, 0]], complex)
    sz = np.array([[1, 0], [0, -1]], complex)
    alg, mats = algebra_from_matrices(np.stack([np.eye(2), sx, sy, sz]))
    assert alg.dim == 4
    assert tuple(wedderburn(alg, seed=1).block_sizes) == (2,)
    assert mats.shape == (4, 2, 2)


def test_algebra_from_matrices_commutant_of_diagonal():
    d = np.stack([np.eye(3), np.diag([1.0, 1.0, -1.0])]).astype(complex)
    alg, _ = algebra_from_matrices(d)
    assert alg.dim == 2
    assert tuple(sorted(wedderburn(alg, seed=1).block_sizes)) == (1, 1)


def test_invalid_algebra_rejected():
    a = matrix_algebra(2)
    bad = np.array(a.mult)
    bad[0, 1, 2] += 0.2
    with pytest.raises(InvalidAlgebra):
        FiniteStarAlgebra(bad, a.unit, a.star, a.trace)


def test_xi_element_scalar_iff_canonical():
    a = multimatrix_algebra((1, 2))
    xi, scalar = xi_element(a)
    assert scalar
    assert np.allclose(xi, a.dim * a.unit)
    w = np.array([0.25, 0.75])
    b = multimatrix_algebra((1, 2), weights=w)
    xi2, scalar2 = xi_element(b)
    assert not scalar2
    assert not np.allclose(xi2, b.dim * b.unit)


def test_embedding_diagonal_in_m2():
    small = commutative_algebra(2)
    big = matrix_algebra(2)
    emb_cols = np.zeros((4, 2))
    emb_cols[unit_index(2, 0, 0), 0] = 1.0
    emb_cols[unit_index(2, 1, 1), 1] = 1.0
    from kaclattice.algebra import SubalgebraEmbedding

    emb = SubalgebraEmbedding(small=small, big=big, embed=emb_cols)
    e = conditional_expectation(emb)
    e01 = np.zeros(4)
    e01[unit_index(2, 0, 1)] = 1.0
    assert np.abs(e @ e01).max() < 1e-12
    e00 = np.zeros(4)
    e00[unit_index(2, 0, 0)] = 1.0
    assert np.allclose(e @ e00, e00)
    # E is an idempotent fixing the subalgebra
    assert np.abs(e @ e - e).max() < 1e-12
    x = emb.restrict(e00)
    assert np.allclose(emb.embed @ x, e00)
    with pytest.raises(InvalidEmbedding):
        emb.restrict(e01)


def test_embedding_trace_mismatch_rejected():
    from kaclattice.algebra import SubalgebraEmbedding

    small = commutative_algebra(2, weights=(1 / 3, 2 / 3))
    big = matrix_algebra(2)
    emb_cols = np.zeros((4, 2))
    emb_cols[unit_index(2, 0, 0), 0] = 1.0
    emb_cols[unit_index(2, 1, 1), 1] = 1.0
    with pytest.raises(IncompatibleTrace):
        SubalgebraEmbedding(small=small, big=big, embed=emb_cols)


def test_embedding_not_multiplicative_rejected():
    from kaclattice.algebra import SubalgebraEmbedding

    small = commutative_algebra(2)
    big = matrix_algebra(2)
    emb_cols = np.zeros((4, 2))
    emb_cols[unit_index(2, 0, 0), 0] = 1.0
    emb_cols[unit_index(2, 0, 1), 0] = 0.5
    emb_cols[unit_index(2, 1, 1), 1] = 1.0
    with pytest.raises(InvalidEmbedding):
        SubalgebraEmbedding(small=small, big=big, embed=emb_cols)


def test_subalgebra_from_basis_swap():
    big = matrix_algebra(2)
    swap = np.zeros(4)
    swap[unit_index(2, 0, 1)] = swap[unit_index(2, 1, 0)] = 1.0
    emb = subalgebra_from_basis(big, np.stack([big.unit, swap], axis=1))
    assert emb.small.dim == 2
    assert tuple(sorted(wedderburn(emb.small, seed=2).block_sizes)) == (1, 1)


def test_left_regular_is_multiplication():
    a = multimatrix_algebra((2, 1))
    lam = left_regular(a)
    for _ in range(4):
        x = random_self_adjoint(a, RNG)
        y = random_self_adjoint(a, RNG)
        lx = lam @ x
        assert np.allclose(lx.reshape(a.dim, a.dim) @ y, a.product(x, y))


def test_function_of_square_root():
    a = matrix_algebra(2)
    x = random_self_adjoint(a, RNG)
    pos = a.product(x, x)
    r = function_of(a, pos, np.sqrt)
    assert np.allclose(a.product(r, r), pos)
    lo, hi = spectrum_bounds(a, pos)
    assert lo >= -1e-12
    assert hi >= lo


def test_random_self_adjoint_is_self_adjoint():
    a = multimatrix_algebra((1, 2))
    x = random_self_adjoint(a, RNG)
    assert np.allclose(a.star_of(x), x)


def test_scalars_unit():
    s = scalars()
    assert s.dim == 1
    assert s.trace @ s.unit == pytest.approx(1.0)


def test_dimension_cap_guard():
    from kaclattice import config

    with config.override(max_algebra_dim=8):
        with pytest.raises(InvalidAlgebra):
            matrix_algebra(4)
