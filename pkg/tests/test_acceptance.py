"""End-to-end acceptance gate.

Eleven numbered criteria, one per test.  Each test prints a single
PASS/FAIL line with the elapsed time and, where one applies, the runtime
budget; every numeric claim is asserted at the stated tolerance inside the
body.
"""
import time

import numpy as np
import pytest

from kaclattice import (
    CommutingSquareData,
    IncompatibleTrace,
    NotAlgebraicData,
    SubalgebraEmbedding,
    averaging_matrix,
    beta_tensor_pi,
    canonical_trace,
    center_basis,
    coaction_of_action,
    conjugate,
    corep_of_coaction,
    crossed_product,
    cyclic_group,
    decompose_regular,
    def31_views,
    diagonal_corepresentation,
    diagonal_inclusion,
    eigenmatrix,
    extend_anticoaction,
    fixed_point_square,
    fixed_point_tensor,
    function_algebra,
    group_algebra,
    integrality_check,
    invariant_center,
    is_relatively_ergodic,
    jones_tower,
    kappa_delta,
    left_regular,
    lemma_square_coaction,
    markov_index,
    matrix_algebra,
    multimatrix_algebra,
    pi_u_expectation,
    r_lattice,
    regular_coaction,
    restrict_coaction,
    scalar_inclusion,
    spectral,
    square_check,
    standard_invariant,
    symmetric_group,
    t_iota_v,
    translation_action,
    trivial_coaction,
    xi_element,
)
from kaclattice.linalg import matrix_rank, subspace_contains

EPS = 1e-9


def _run(capsys, label, budget, body):
    t0 = time.perf_counter()
    err = None
    try:
        body()
    except BaseException as exc:
        err = exc
    dt = time.perf_counter() - t0
    over = budget is not None and dt > budget
    verdict = "PASS" if err is None and not over else "FAIL"
    suffix = f", budget {budget:g} s" if budget is not None else ""
    with capsys.disabled():
        print(f"{label}: {verdict} ({dt:.2f} s{suffix})", flush=True)
    if err is not None:
        raise err
    assert not over, f"{label}: exceeded {budget:g} s budget ({dt:.2f} s)"


def _anticoaction_corpus():
    """(beta, pi) pairs over Z2, Z3 and S3 used by criteria 4 and 11.

    For each group: the comultiplication twisted by the antipode, the
    twisted matrix anticoaction of diag(u_e, u_g), and, where it validates
    (abelian groups only), the dual coaction relabeled as an anticoaction;
    paired with the regular coaction and the dual coaction on the crossed
    product.
    """
    pairs = []
    for gname, grp in (("Z2", cyclic_group(2)), ("Z3", cyclic_group(3)),
                       ("S3", symmetric_group(3))):
        k = group_algebra(grp)
        betas = [("kdelta", kappa_delta(k)),
                 ("tiota", t_iota_v(diagonal_corepresentation(k, [0, 1])))]
        _, dual = crossed_product(translation_action(grp))
        cand = dual.with_kind("anticoaction")
        if cand.validate()["passed"]:
            betas.append(("dual", cand))
        pis = [("regular", regular_coaction(k)), ("dual", dual)]
        pairs += [(gname, bn, b, pn, p) for bn, b in betas for pn, p in pis]
    return pairs


def test_c01_canonical_trace_scalar(capsys):
    def body():
        cases = [(1,), (2,), (1, 1), (1, 2), (2, 3), (1, 1, 2)]
        for sizes in cases:
            w0 = [float(x) for x in canonical_trace(sizes)]
            alg = multimatrix_algebra(sizes, weights=w0)
            xi, scalar = xi_element(alg)
            assert scalar, sizes
            assert np.abs(xi - alg.dim * alg.unit).max() < 1e-9, sizes
            if len(sizes) == 1:
                # the sole weight is pinned by normalization; moving it
                # leaves the state space entirely
                with pytest.raises(IncompatibleTrace):
                    multimatrix_algebra(sizes, weights=[w0[0] + 1e-3])
                continue
            for i in range(len(sizes)):
                w = list(w0)
                w[i] += 1e-3
                w[(i + 1) % len(w)] -= 1e-3
                _, scalar = xi_element(multimatrix_algebra(sizes, weights=w))
                assert not scalar, (sizes, i)

    _run(capsys, "C01 canonical trace scalar criterion", 1.0, body)


def test_c02_index_integrality(capsys):
    def body():
        for n in range(1, 5):
            rep = integrality_check(scalar_inclusion(matrix_algebra(n)))
            assert rep["integer"] and rep["index"] == n * n
        rep = integrality_check(diagonal_inclusion([1, 1]))
        assert rep["integer"] and rep["index"] == 2
        rep = integrality_check(diagonal_inclusion([1, 1, 1]))
        assert rep["integer"] and rep["index"] == 3
        golden = np.array([[1, 1], [0, 1]])
        with pytest.raises(NotAlgebraicData) as exc:
            integrality_check(golden)
        assert "unsolvable" in str(exc.value)
        assert abs(exc.value.index - 2.6180339887) < 1e-9
        assert abs(markov_index(golden) - 2.6180339887) < 1e-9

    _run(capsys, "C02 index integrality certificates", 1.0, body)


def test_c03_anticoaction_equivalence_views(capsys):
    def body():
        s3 = symmetric_group(3)
        kf, kg = function_algebra(s3), group_algebra(s3)
        v2 = next(u for u, _ in decompose_regular(kf) if u.dim == 2)
        _, dual = crossed_product(translation_action(s3))

        def perturbed(c):
            bad = c.map.copy()
            bad[:, 1] *= 1.01
            return type(c)(kac=c.kac, target=c.target, map=bad, kind=c.kind)

        corpus = [
            (regular_coaction(kf), True),
            (regular_coaction(kg), False),
            (trivial_coaction(kf, matrix_algebra(2), "coaction"), True),
            (trivial_coaction(kg, matrix_algebra(2), "coaction"), True),
            (coaction_of_action(translation_action(s3)), True),
            (kappa_delta(kf), True),
            (kappa_delta(kg), True),
            (t_iota_v(diagonal_corepresentation(kg, [0, 1])), True),
            (t_iota_v(v2), True),
            (dual, False),
            (perturbed(regular_coaction(kf)), False),
            (perturbed(kappa_delta(kg)), False),
            (perturbed(t_iota_v(diagonal_corepresentation(kg, [0, 1]))),
             False),
        ]
        assert len(corpus) >= 12
        for m, expect in corpus:
            views = def31_views(m)
            assert views["equivalence_ok"]
            assert views["anticoaction"]["passed"] is expect

    _run(capsys, "C03 anticoaction equivalence views", 5.0, body)


def test_c04_expectation_transport_identity(capsys):
    def body():
        pairs = _anticoaction_corpus()
        assert len(pairs) == 16
        for _, _, beta, _, pi in pairs:
            u = corep_of_coaction(beta)
            e_u = pi_u_expectation(u, pi)
            lam = np.kron(left_regular(beta.target), np.eye(pi.target.dim))
            e_g = averaging_matrix(beta_tensor_pi(beta, pi))
            assert np.abs(e_u @ lam - lam @ e_g).max() < 1e-9

    _run(capsys, "C04 expectation transport identity", 10.0, body)


def test_c05_worked_fixed_point_identities(capsys):
    def body():
        tol = np.sqrt(EPS)

        # fixed points of (twisted comultiplication (x) pi) are the flipped
        # image of pi
        for k in (function_algebra(cyclic_group(2)),
                  group_algebra(cyclic_group(2)),
                  group_algebra(symmetric_group(3))):
            pi = regular_coaction(k)
            fp, _ = fixed_point_tensor(kappa_delta(k), pi)
            npd, ad = pi.target.dim, k.dim
            flip = np.stack([pi.map[:, j].reshape(npd, ad).T.reshape(-1)
                             for j in range(npd)], axis=1)
            assert fp.report["fixed_dim"] == npd
            r1 = matrix_rank(fp.embedding.embed, tol)
            r2 = matrix_rank(flip, tol)
            joint = matrix_rank(
                np.concatenate([fp.embedding.embed, flip], axis=1), tol)
            assert r1 == r2 == joint == npd

        # the averaging projection of the conjugate-implemented coaction
        # equals the averaging projection of the twisted tensor product
        for grp in (cyclic_group(2), cyclic_group(3)):
            k = group_algebra(grp)
            v = diagonal_corepresentation(k, [0, 1])
            _, dual = crossed_product(translation_action(grp))
            for pi in (regular_coaction(k), dual):
                e1 = pi_u_expectation(conjugate(v), pi)
                e2 = averaging_matrix(beta_tensor_pi(t_iota_v(v), pi))
                assert np.abs(e1 - e2).max() < 1e-9

        # crossed-product form: the fixed points are a unitary conjugate of
        # M_n (x) Q inside M_n (x) (Q x| Gamma)
        z2 = cyclic_group(2)
        k = group_algebra(z2)
        p, dual = crossed_product(translation_action(z2))
        beta = t_iota_v(diagonal_corepresentation(k, [0, 1]))
        fp, _ = fixed_point_tensor(beta, dual)
        assert fp.report["fixed_dim"] == 8
        amb = fp.ambient
        nq, ng = 2, 2

        def u_elem(g):
            w = np.zeros(p.dim, complex)
            for i in range(nq):
                w[i * ng + g] = 1.0
            return w

        big_v = np.zeros(amb.dim, complex)
        for i, g in enumerate((0, 1)):
            eii = np.zeros(4)
            eii[2 * i + i] = 1.0
            big_v += np.kron(eii, u_elem(g))
        vs = amb.star_of(big_v)
        assert np.abs(amb.product(big_v, vs) - amb.unit).max() < 1e-9
        cols = []
        for i in range(2):
            for j in range(2):
                eij = np.zeros(4)
                eij[2 * i + j] = 1.0
                for qi in range(nq):
                    qv = np.zeros(p.dim, complex)
                    qv[qi * ng] = 1.0
                    x = np.kron(eij, qv)
                    cols.append(amb.product(big_v, amb.product(x, vs)))
        conj = np.stack(cols, axis=1)
        r1 = matrix_rank(fp.embedding.embed, tol)
        r2 = matrix_rank(conj, tol)
        joint = matrix_rank(
            np.concatenate([fp.embedding.embed, conj], axis=1), tol)
        assert r1 == r2 == joint == 8

    _run(capsys, "C05 worked fixed point identities", 10.0, body)


def test_c06_spectral_projections(capsys):
    def body():
        dec = spectral(regular_coaction(function_algebra(cyclic_group(3))))
        assert len(dec.coreps) == 3
        assert dec.dimensions == [1, 1, 1]
        assert dec.orthogonality < 1e-9
        assert dec.completeness < 1e-9
        assert dec.complete
        total = sum(dec.expectations)
        assert np.abs(total - np.eye(3)).max() < 1e-9
        for e in dec.expectations:
            assert np.abs(e @ e - e).max() < 1e-9
            assert matrix_rank(e, 1e-9) == 1

        # hand value over Z2: the signed component of the identity indicator
        dec2 = spectral(regular_coaction(function_algebra(cyclic_group(2))))
        sign = next(e for u, e in zip(dec2.coreps, dec2.expectations)
                    if np.abs(u.entries[0, 0] - np.array([1, -1])).max()
                    < 1e-12)
        delta_e = np.array([1.0, 0.0])
        np.testing.assert_allclose(sign @ delta_e, [0.5, -0.5], atol=1e-9)

    _run(capsys, "C06 spectral projections", None, body)


def test_c07_eigenmatrix_solver(capsys):
    def body():
        # every irreducible corepresentation is its own unitary eigenmatrix
        # under the regular coaction
        for k in (function_algebra(cyclic_group(2)),
                  function_algebra(cyclic_group(3)),
                  function_algebra(symmetric_group(3)),
                  group_algebra(cyclic_group(2)),
                  group_algebra(cyclic_group(3)),
                  group_algebra(symmetric_group(3))):
            d = regular_coaction(k)
            for u, _ in decompose_regular(k):
                res = eigenmatrix(d, u, prefer=u.entries)
                assert res.status == "unitary"
                assert res.residual < 1e-9
                assert np.abs(res.matrix - u.entries).max() < 1e-9

        # canonical eigenmatrix of the dual coaction on a crossed product:
        # the diagonal of implementing unitaries
        z2 = cyclic_group(2)
        k = group_algebra(z2)
        p, dual = crossed_product(translation_action(z2))
        v = diagonal_corepresentation(k, [0, 1])
        pref = np.zeros((2, 2, p.dim), complex)
        for i, g in enumerate((0, 1)):
            for qi in range(2):
                pref[i, i, qi * 2 + g] = 1.0
        res = eigenmatrix(dual, v, prefer=pref)
        assert res.status == "unitary"
        assert res.residual < 1e-9
        assert np.abs(res.matrix - pref).max() < 1e-9

    _run(capsys, "C07 eigenmatrix solver", None, body)


def test_c08_tower_extension(capsys):
    def body():
        k = group_algebra(cyclic_group(2))
        beta = t_iota_v(diagonal_corepresentation(k, [0, 1]))
        chain = jones_tower(scalar_inclusion(beta.target), 2)
        assert chain.index == 4
        assert [lvl.dim for lvl in chain.levels] == [1, 4, 16, 64]
        betas = extend_anticoaction(beta, chain)
        assert len(betas) == chain.depth + 1
        for j in (2, 3):
            assert betas[j].kind == "anticoaction"
            assert betas[j].validate()["passed"]
        for j in range(1, chain.depth + 1):
            back = restrict_coaction(betas[j], chain.embeddings[j - 1])
            assert np.abs(back.map - betas[j - 1].map).max() < 1e-12
        for i, e in enumerate(chain.jones_projections):
            level = chain.levels[i + 2]
            assert abs(level.trace_of(e) - 1 / 4) < 1e-9
            img = betas[i + 2].map @ e
            assert np.abs(img - np.kron(e, k.alg.unit)).max() < 1e-9

    _run(capsys, "C08 tower extension", 30.0, body)


def test_c09_invariant_cross_check(capsys):
    def body():
        k = group_algebra(cyclic_group(2))
        v = diagonal_corepresentation(k, [0, 1])
        beta = t_iota_v(v)
        lat_t = standard_invariant(scalar_inclusion(beta.target), beta,
                                   depth=2)
        lat_r = r_lattice(v, depth=2)
        assert lat_t.cell_dims(0) == (1, 2, 8)
        assert lat_r.cell_dims(0) == (1, 2, 8)
        for row in range(3):
            assert lat_t.cell_dims(row) == lat_r.cell_dims(row)

    _run(capsys, "C09 invariant cross check", 60.0, body)


def test_c10_commuting_squares(capsys):
    def body():
        for k in (function_algebra(cyclic_group(2)),
                  group_algebra(symmetric_group(3))):
            rep = square_check(lemma_square_coaction(regular_coaction(k)))
            assert rep["commuting"] and rep["nondegenerate"]
            rep = square_check(
                fixed_point_square(kappa_delta(k), regular_coaction(k)))
            assert rep["commuting"] and rep["nondegenerate"]

        # non-equivariant perturbation: replace the coaction leg by the
        # second-leg unital embedding x -> 1 (x) x
        k = function_algebra(cyclic_group(2))
        sq = lemma_square_coaction(regular_coaction(k))
        a = k.dim
        cols = np.stack([np.kron(k.alg.unit, np.eye(a)[:, j])
                         for j in range(a)], axis=1)
        bad = SubalgebraEmbedding(small=k.alg, big=sq.ambient, embed=cols)
        rep = square_check(CommutingSquareData(
            top=sq.top, right=bad, left=sq.left, bottom=sq.bottom))
        assert not rep["commuting"]
        assert rep["commuting_residual"] > 1e-3

    _run(capsys, "C10 commuting squares", 5.0, body)


def test_c11_center_inclusion_shadow(capsys):
    def body():
        for _, bname, beta, _, pi in _anticoaction_corpus():
            fp, _ = fixed_point_tensor(beta, pi)
            w = invariant_center(beta)
            shadow = np.stack([np.kron(w[:, t], pi.target.unit)
                               for t in range(w.shape[1])], axis=1)
            big_center = fp.embedding.embed @ center_basis(
                fp.embedding.small)
            assert subspace_contains(big_center, shadow) < 1e-9
            if bname == "tiota":
                assert w.shape[1] == 1
                assert is_relatively_ergodic(beta)
        k = group_algebra(cyclic_group(2))
        loose = trivial_coaction(k, multimatrix_algebra((1, 1)),
                                 "anticoaction")
        assert invariant_center(loose).shape[1] == 2
        assert not is_relatively_ergodic(loose)

    _run(capsys, "C11 center inclusion shadow", None, body)
