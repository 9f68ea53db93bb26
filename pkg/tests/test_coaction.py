import numpy as np
import pytest

from kaclattice.algebra import (
    commutative_algebra,
    matrix_algebra,
    multimatrix_algebra,
)
from kaclattice.coaction import (
    averaging,
    averaging_matrix,
    beta_tensor_pi,
    center_basis,
    coaction_of_action,
    def31_views,
    eigenmatrix,
    fixed_point_tensor,
    inner_coaction,
    invariant_center,
    invariant_vectors,
    is_relatively_ergodic,
    kappa_delta,
    regular_coaction,
    spectral,
    t_iota_v,
    t_twist,
    transposition,
    trivial_coaction,
)
from kaclattice.corep import (
    corep_of_coaction,
    diagonal_corepresentation,
    trivial_corepresentation,
)
from kaclattice.errors import KindMismatch, MixedAlgebras, NotACoaction
from kaclattice.kac import (
    crossed_product,
    cyclic_group,
    function_algebra,
    group_algebra,
    symmetric_group,
    translation_action,
)

Z2 = cyclic_group(2)
Z3 = cyclic_group(3)
S3 = symmetric_group(3)


@pytest.mark.parametrize("k", [function_algebra(Z2), group_algebra(S3)])
def test_regular_coaction_valid(k):
    d = regular_coaction(k)
    assert d.kind == "coaction"
    assert d.validate()["passed"]
    # fixed points of the regular coaction are the scalars
    assert invariant_vectors(d).shape[1] == 1


@pytest.mark.parametrize("k", [function_algebra(S3), group_algebra(S3)])
def test_kappa_delta_is_anticoaction(k):
    b = kappa_delta(k)
    assert b.kind == "anticoaction"
    assert b.validate()["passed"]
    assert averaging(b).report["fixed_dim"] == 1
    assert is_relatively_ergodic(b)


def test_trivial_coaction_both_kinds():
    k = function_algebra(Z3)
    b = commutative_algebra(2)
    for kind in ("coaction", "anticoaction"):
        t = trivial_coaction(k, b, kind)
        assert t.validate()["passed"]
        assert averaging(t).report["fixed_dim"] == 2
    assert not is_relatively_ergodic(trivial_coaction(k, b, "anticoaction"))


def test_action_coaction_fixed_points():
    d = coaction_of_action(translation_action(Z3))
    assert d.validate()["passed"]
    assert averaging(d).report["fixed_dim"] == 1


def test_inner_coaction_of_diagonal():
    k = group_algebra(Z2)
    v = diagonal_corepresentation(k, [0, 1])
    c = inner_coaction(v)
    assert c.validate()["passed"]
    # Ad(diag(u_e, u_g)) fixes exactly the diagonal of M_2
    assert averaging(c).report["fixed_dim"] == 2


def test_t_iota_v_anticoaction():
    k = group_algebra(Z2)
    v = diagonal_corepresentation(k, [0, 1])
    b = t_iota_v(v)
    assert b.kind == "anticoaction"
    assert b.validate()["passed"]
    assert b.target.dim == 4
    assert is_relatively_ergodic(b)


@pytest.mark.parametrize("k", [function_algebra(Z2), function_algebra(S3),
                               group_algebra(S3)])
def test_def31_views_agree_on_valid(k):
    out = def31_views(kappa_delta(k))
    assert out["anticoaction"]["passed"]
    assert out["equivalence_ok"]


def test_def31_views_agree_on_invalid():
    k = function_algebra(Z2)
    bad = kappa_delta(k)
    m = np.array(bad.map)
    m[0, 1] += 1e-3
    bad = type(bad)(kac=bad.kac, target=bad.target, map=m,
                    kind="anticoaction")
    out = def31_views(bad)
    assert not out["anticoaction"]["passed"]
    assert out["equivalence_ok"]


def test_validation_catches_swapped_legs():
    # a coaction map labelled anticoaction over a noncommutative Kac
    # algebra must fail (products reverse on the second leg)
    k = group_algebra(S3)
    d = regular_coaction(k)
    rep = d.with_kind("anticoaction").validate()
    assert not rep["passed"]
    assert rep["antimultiplicative"] > 1e-3


def test_transposition_is_antiautomorphism():
    for alg in (matrix_algebra(2), multimatrix_algebra((1, 2))):
        t = transposition(alg)
        rng = np.random.default_rng(2)
        from kaclattice.algebra import random_self_adjoint

        x = random_self_adjoint(alg, rng)
        y = random_self_adjoint(alg, rng)
        assert np.allclose(t @ alg.product(x, y),
                           alg.product(t @ y, t @ x))
        assert np.allclose(t @ (t @ x), x)


def test_t_twist_involution():
    k = group_algebra(Z2)
    v = diagonal_corepresentation(k, [0, 1])
    b = t_iota_v(v)
    tb = t_twist(b)
    assert tb.kind == "coaction"
    assert tb.validate()["passed"]
    back = t_twist(tb)
    assert back.kind == "anticoaction"
    assert np.allclose(back.map, b.map)


def test_averaging_report_is_an_expectation():
    d = regular_coaction(function_algebra(S3))
    fp = averaging(d)
    assert fp.report["passed"]
    assert fp.report["idempotent"] < 1e-12
    assert fp.report["trace_preserving"] < 1e-12
    e = averaging_matrix(d)
    assert np.allclose(e @ e, e)


def test_beta_tensor_pi_requires_anticoaction():
    k = function_algebra(Z2)
    with pytest.raises(KindMismatch):
        beta_tensor_pi(regular_coaction(k), regular_coaction(k))


def test_beta_tensor_pi_mixed_kac_rejected():
    with pytest.raises(MixedAlgebras):
        beta_tensor_pi(kappa_delta(function_algebra(Z2)),
                       regular_coaction(function_algebra(Z3)))


def test_fixed_point_tensor_kappa_delta_case():
    # fixed points of kappa-delta (x) delta are the flipped image of delta
    k = group_algebra(Z2)
    fp, res = fixed_point_tensor(kappa_delta(k), regular_coaction(k))
    assert res < 1e-9
    assert fp.report["fixed_dim"] == 2
    gamma = beta_tensor_pi(kappa_delta(k), regular_coaction(k))
    assert gamma.validate()["passed"]


def test_fixed_point_tensor_t_iota_case():
    k = group_algebra(Z2)
    v = diagonal_corepresentation(k, [0, 1])
    fp, res = fixed_point_tensor(t_iota_v(v), regular_coaction(k))
    assert res < 1e-9
    assert fp.report["fixed_dim"] == 4
    assert tuple(fp.embedding.small.block_structure().block_sizes) == (2,)


def test_fixed_point_tensor_with_dual_coaction():
    k = group_algebra(Z2)
    _, dual = crossed_product(translation_action(Z2))
    fp, res = fixed_point_tensor(kappa_delta(k), dual)
    assert res < 1e-9
    assert fp.report["fixed_dim"] == 4


def test_spectral_regular_z2():
    sd = spectral(regular_coaction(function_algebra(Z2)))
    assert sd.complete
    assert sorted(sd.dimensions) == [1, 1]
    assert sd.orthogonality < 1e-12
    delta_e = np.array([1.0, 0.0])
    by_char = {int(np.round(u.character()[1].real)): e
               for u, e in zip(sd.coreps, sd.expectations)}
    assert np.allclose(by_char[1] @ delta_e, [0.5, 0.5])
    assert np.allclose(by_char[-1] @ delta_e, [0.5, -0.5])
    total = sum(sd.expectations)
    assert np.allclose(total, np.eye(2))


def test_spectral_regular_s3_group_algebra():
    sd = spectral(regular_coaction(group_algebra(S3)))
    assert sd.complete
    assert sorted(sd.dimensions) == [1] * 6
    assert np.allclose(sum(sd.expectations), np.eye(6))


def test_spectral_rejects_anticoaction():
    with pytest.raises(KindMismatch):
        spectral(kappa_delta(function_algebra(Z2)))


def test_eigenmatrix_regular_self():
    for k in (function_algebra(Z3), group_algebra(S3)):
        d = regular_coaction(k)
        u = corep_of_coaction(d)
        m = eigenmatrix(d, u)
        assert m.status == "unitary"
        assert m.residual < 1e-9
        assert m.unitarity < 1e-9


def test_eigenmatrix_none_for_trivial_target():
    k = function_algebra(S3)
    from kaclattice.corep import decompose_regular

    two = [u for u, _ in decompose_regular(k) if u.dim == 2][0]
    triv = trivial_coaction(k, commutative_algebra(1))
    m = eigenmatrix(triv, two)
    assert m.status == "none"
    assert m.matrix is None


def test_center_and_invariant_center():
    assert center_basis(multimatrix_algebra((1, 2))).shape[1] == 2
    assert center_basis(matrix_algebra(3)).shape[1] == 1
    k = group_algebra(S3)
    w = invariant_center(kappa_delta(k))
    assert w.shape[1] == 1


def test_coaction_requires_sane_map():
    k = function_algebra(Z2)
    d = regular_coaction(k)
    bad = type(d)(kac=k, target=d.target, map=np.array(d.map) * 0.5,
                  kind="coaction")
    with pytest.raises(NotACoaction):
        bad.require_valid()
