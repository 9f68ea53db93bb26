import numpy as np
import pytest

from kaclattice.algebra import matrix_algebra
from kaclattice.coaction import coaction_of_action, t_iota_v, trivial_coaction
from kaclattice.corep import diagonal_corepresentation
from kaclattice.errors import DimensionMismatch, ErgodicityFailed
from kaclattice.invariant import principal_graph, r_lattice, standard_invariant
from kaclattice.kac import cyclic_group, group_algebra, translation_action
from kaclattice.tower import diagonal_inclusion, scalar_inclusion

Z2 = cyclic_group(2)


def z2_order_two_corep():
    return diagonal_corepresentation(group_algebra(Z2), [0, 1])


def test_standard_invariant_z2_rows():
    v = z2_order_two_corep()
    beta = t_iota_v(v)
    lat = standard_invariant(scalar_inclusion(beta.target), beta, depth=3)
    assert lat.depth == 3
    assert lat.cell_dims(0) == (1, 2, 8, 32)
    assert lat.cell_dims(1) == (1, 2, 8)
    assert lat.cell_dims(2) == (1, 2)
    assert lat.cell_dims(3) == (1,)
    assert lat.meta["square_residual"] < 1e-9
    assert lat.meta["horizontal_residual"] < 1e-9
    assert lat.meta["vertical_residual"] < 1e-9


def test_r_lattice_matches_tower_computation():
    v = z2_order_two_corep()
    beta = t_iota_v(v)
    lat_t = standard_invariant(scalar_inclusion(beta.target), beta, depth=3)
    lat_r = r_lattice(v, depth=3)
    for row in range(4):
        assert lat_t.cell_dims(row) == lat_r.cell_dims(row)
    assert lat_r.meta["square_residual"] < 1e-12


def test_r_lattice_block_structures():
    v = z2_order_two_corep()
    lat = r_lattice(v, depth=2)
    assert lat.cell_dims(0) == (1, 2, 8)
    # End(v (x) vbar) of the order-two grading is two 2x2 blocks
    c = lat.cell(0, 2).small
    assert sorted(c.block_structure().block_sizes) == [2, 2]


def test_r_lattice_mirror_same_dims_for_self_conjugate():
    v = z2_order_two_corep()
    a = r_lattice(v, depth=2)
    b = r_lattice(v, depth=2, mirror=True)
    for row in range(3):
        assert a.cell_dims(row) == b.cell_dims(row)
    assert b.meta["mirror"]


def test_standard_invariant_translation_z3():
    z3 = cyclic_group(3)
    beta = coaction_of_action(translation_action(z3), kind="anticoaction")
    lat = standard_invariant(scalar_inclusion(beta.target), beta, depth=2)
    assert lat.cell_dims(0) == (1, 1, 3)
    assert lat.cell_dims(1) == (1, 1)


def test_standard_invariant_trivial_kac_gives_relative_commutants():
    k1 = group_algebra(cyclic_group(1))
    beta = trivial_coaction(k1, matrix_algebra(2), "anticoaction")
    lat = standard_invariant(scalar_inclusion(beta.target), beta, depth=2)
    assert lat.cell_dims(0) == (1, 4, 16)


def test_diagonal_cells_are_scalar():
    v = z2_order_two_corep()
    lat = r_lattice(v, depth=3)
    for i in range(4):
        assert lat.cell(i, i).small.dim == 1


def test_ergodicity_guard():
    k = group_algebra(Z2)
    beta = trivial_coaction(k, matrix_algebra(2), "anticoaction")
    data = diagonal_inclusion([1, 1])
    from kaclattice.tower import basic_construction

    _, _, up = basic_construction(data)
    # trivial anticoaction on M_2(C) (+) M_2(C): center is 2-dimensional
    beta_big = trivial_coaction(k, up.big, "anticoaction")
    with pytest.raises(ErgodicityFailed):
        standard_invariant(up, beta_big, depth=1)


def test_lattice_squares_commute():
    v = z2_order_two_corep()
    lat = r_lattice(v, depth=3)
    for i in range(3):
        for j in range(i + 1, 3):
            h_low = lat.horizontal[(i + 1, j)]
            v_right = lat.vertical[(i, j + 1)]
            h_up = lat.horizontal[(i, j)]
            v_left = lat.vertical[(i, j)]
            lhs = h_up @ v_left
            rhs = v_right @ h_low
            assert np.abs(lhs - rhs).max() < 1e-9


def test_principal_graph_z2():
    v = z2_order_two_corep()
    lat = r_lattice(v, depth=3)
    g = principal_graph(lat)
    assert g.rows == (0, 1)
    # blocks go (1) -> (1,1) -> (2,2) -> (4,4): dims 1, 2, 8, 32
    assert [m.tolist() for m in g.matrices[0]] == [
        [[1, 1]], [[1, 1], [1, 1]], [[1, 1], [1, 1]]][:len(g.matrices[0])]
    assert g.block_sizes[0][0] == (1,)
    assert g.block_sizes[0][1] == (1, 1)
    edges = g.edge_list(0)
    assert ((0, 0), (1, 0), 1) in edges
    assert ((0, 0), (1, 1), 1) in edges


def test_principal_graph_translation_z3():
    z3 = cyclic_group(3)
    beta = coaction_of_action(translation_action(z3), kind="anticoaction")
    lat = standard_invariant(scalar_inclusion(beta.target), beta, depth=2)
    g = principal_graph(lat)
    assert [m.tolist() for m in g.matrices[0]] == [[[1]], [[1, 1, 1]]]
    assert g.depth_profile[0] == (1, 1, 3)


def test_r_lattice_depth_cap():
    v = z2_order_two_corep()
    with pytest.raises(DimensionMismatch):
        r_lattice(v, depth=6)


def test_principal_graph_needs_depth():
    v = z2_order_two_corep()
    lat = r_lattice(v, depth=1)
    with pytest.raises(DimensionMismatch):
        principal_graph(lat)


def test_row_embeddings_are_valid():
    v = z2_order_two_corep()
    lat = r_lattice(v, depth=2)
    emb = lat.row_embedding(0, 1)
    assert emb.small.dim == 2
    assert emb.big.dim == 8
