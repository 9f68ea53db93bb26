"""Standard-invariant lattices of a Markov inclusion with an anticoaction.

Two independent constructions of the doubly indexed lattice of higher
relative commutants:

* ``standard_invariant`` climbs the Jones tower: cell (i, j) consists of the
  elements of level j that commute with the embedded copy of level i and are
  fixed by the extended anticoaction beta_j.  Each cell is one stacked
  nullspace (commutation rows plus fixedness rows) with a single rank
  decision.
* ``r_lattice`` never builds a tower: cell (i, j) is the endomorphism
  algebra of the alternating tensor word with letters at positions
  i, ..., j-1 (letter at even position = v, at odd position = conjugate(v),
  highest position leftmost), computed with the intertwiner solver.

Row-0 cell dimensions of the two constructions agree for the transposed
inner anticoactions attached to diagonal corepresentations; the test suite
uses this as a cross-oracle between the code paths.

Layout.  Cells are indexed (i, j) with 0 <= i <= j <= depth and cell (i, i)
is the scalars.  The horizontal map includes cell (i, j) into cell
(i, j+1); the vertical map includes cell (i+1, j) into cell (i, j)
(dropping commutation constraints enlarges the cell).  Both are stored as
coefficient matrices between cell bases and the mixed squares commute.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .algebra import (SubalgebraEmbedding, conditional_expectation,
                      matrix_algebra, subalgebra_from_basis)
from .coaction import CoactionMap, invariant_center
from .config import get_config, resolve_eps
from .corep import Corepresentation, conjugate, intertwiners, tensor_product
from .errors import (CrossCheckFailed, DimensionMismatch, ErgodicityFailed,
                     KindMismatch, MixedAlgebras)
from .linalg import nullspace
from .tower import (InclusionData, extend_anticoaction, inclusion_data,
                    jones_tower, restrict_coaction, same_algebra)


@dataclass(frozen=True, eq=False)
class InvariantLattice:
    """Doubly indexed lattice of cells with inclusion maps.

    ``cells[(i, j)]`` embeds the abstract cell algebra into its ambient (the
    tower level j, or the full matrix algebra of the word space).
    ``horizontal[(i, j)]`` maps cell (i, j) coefficients into cell (i, j+1);
    ``vertical[(i, j)]`` maps cell (i+1, j) coefficients into cell (i, j).
    ``meta`` records the construction and the verification residuals.
    """

    depth: int
    cells: dict
    horizontal: dict
    vertical: dict
    meta: dict = field(default_factory=dict)

    def cell(self, i: int, j: int) -> SubalgebraEmbedding:
        return self.cells[(i, j)]

    def cell_dims(self, row: int = 0) -> tuple[int, ...]:
        return tuple(self.cells[(row, j)].small.dim
                     for j in range(row, self.depth + 1))

    def row_embedding(self, row: int, j: int) -> SubalgebraEmbedding:
        """Cell (row, j) included in cell (row, j+1) as abstract algebras."""
        return SubalgebraEmbedding(small=self.cells[(row, j)].small,
                                   big=self.cells[(row, j + 1)].small,
                                   embed=self.horizontal[(row, j)])


def _express(embed: np.ndarray, vecs: np.ndarray, eps: float,
             what: str) -> tuple[np.ndarray, float]:
    """Coefficients of ambient columns in a cell basis, with residual guard."""
    coords, *_ = np.linalg.lstsq(embed, vecs, rcond=None)
    res = float(np.abs(embed @ coords - vecs).max())
    if res > np.sqrt(eps) * max(1.0, float(np.abs(vecs).max())):
        raise CrossCheckFailed(
            f"{what} does not land in the expected cell (residual {res:.2e})")
    return coords, res


def _require_ergodic(beta: CoactionMap, level: int, eps: float) -> None:
    w = invariant_center(beta, eps)
    if w.shape[1] == 1:
        return
    b = beta.target
    u, g = b.unit, b.gram
    uu = float((u.conj() @ g @ u).real)
    worst, worst_norm = w[:, 0], -1.0
    for c in w.T:
        c2 = c - u * (u.conj() @ g @ c) / uu
        nrm = float(np.sqrt(abs(c2.conj() @ g @ c2)))
        if nrm > worst_norm:
            worst, worst_norm = c2, nrm
    raise ErgodicityFailed(
        f"the invariant center of level {level} has dimension {w.shape[1]}; "
        f"non-scalar element with coefficients {np.round(worst, 6).tolist()}")


def standard_invariant(data: InclusionData, beta1: CoactionMap,
                       depth: int = 3, eps: float | None = None
                       ) -> InvariantLattice:
    """Lattice of relative commutants intersected with fixed points.

    Builds the Jones tower of ``data`` up to level ``depth``, extends
    ``beta1`` along it, and computes every cell as one stacked nullspace.
    Requires the ergodicity surrogate (invariant center is scalar) at levels
    0 and 1; the same condition is then verified at every level through the
    diagonal cells.
    """
    eps = resolve_eps(eps)
    if depth < 1:
        raise DimensionMismatch("depth must be at least 1")
    if beta1.kind != "anticoaction":
        raise KindMismatch("beta1 must be an anticoaction")
    if not same_algebra(beta1.target, data.big):
        raise MixedAlgebras("beta1 must act on the big algebra of the inclusion")
    beta1.require_valid(eps)
    beta0 = restrict_coaction(beta1, data.emb, eps)
    _require_ergodic(beta0, 0, eps)
    _require_ergodic(beta1, 1, eps)

    chain = jones_tower(data, max(1, depth - 1), eps)
    betas = extend_anticoaction(beta1, chain, eps)

    # composed coefficient embeddings between tower levels
    into = {}
    for i in range(depth + 1):
        into[(i, i)] = np.eye(chain.levels[i].dim, dtype=np.complex128)
        for j in range(i + 1, depth + 1):
            into[(i, j)] = chain.embeddings[j - 1].embed @ into[(i, j - 1)]

    cells = {}
    for j in range(depth + 1):
        bj = chain.levels[j]
        unit_col = betas[j].kac.alg.unit[:, None]
        fix_rows = betas[j].map - np.kron(np.eye(bj.dim), unit_col)
        for i in range(j + 1):
            rows = [fix_rows]
            for col in into[(i, j)].T:
                rows.append(_backend.left_matrix(bj.mult, col)
                            - _backend.right_matrix(bj.mult, col))
            basis = nullspace(np.vstack(rows), eps)
            if i == j and basis.shape[1] != 1:
                raise ErgodicityFailed(
                    f"cell ({i}, {i}) has dimension {basis.shape[1]}; "
                    f"tower level {i} is not relatively ergodic")
            cells[(i, j)] = subalgebra_from_basis(bj, basis, eps)

    # the spanned Jones projections belong to their cells
    jones_res = 0.0
    for (i, j), emb in cells.items():
        ms = range(i + 1, j)
        if not ms:
            continue
        proj = conditional_expectation(emb)
        for m in ms:
            e = into[(m + 1, j)] @ chain.jones_projections[m - 1]
            jones_res = max(jones_res, float(np.abs(proj @ e - e).max()))
    if jones_res > np.sqrt(eps):
        raise CrossCheckFailed(
            f"a Jones projection escapes its cell (residual {jones_res:.2e})")

    horizontal, vertical = {}, {}
    hres = vres = 0.0
    for i in range(depth + 1):
        for j in range(i, depth):
            vecs = chain.embeddings[j].embed @ cells[(i, j)].embed
            horizontal[(i, j)], r = _express(
                cells[(i, j + 1)].embed, vecs, eps, f"horizontal ({i}, {j})")
            hres = max(hres, r)
    for i in range(depth):
        for j in range(i + 1, depth + 1):
            vertical[(i, j)], r = _express(
                cells[(i, j)].embed, cells[(i + 1, j)].embed, eps,
                f"vertical ({i}, {j})")
            vres = max(vres, r)
    sres = _square_residual(horizontal, vertical, depth)
    meta = {"construction": "tower", "index": chain.index,
            "jones_membership": jones_res, "horizontal_residual": hres,
            "vertical_residual": vres, "square_residual": sres}
    return InvariantLattice(depth=depth, cells=cells, horizontal=horizontal,
                            vertical=vertical, meta=meta)


def _square_residual(horizontal: dict, vertical: dict, depth: int) -> float:
    worst = 0.0
    for i in range(depth):
        for j in range(i + 1, depth):
            lhs = horizontal[(i, j)] @ vertical[(i, j)]
            rhs = vertical[(i, j + 1)] @ horizontal[(i + 1, j)]
            worst = max(worst, float(np.abs(lhs - rhs).max()))
    if worst > np.sqrt(get_config().eps):
        raise CrossCheckFailed(
            f"horizontal and vertical inclusions do not commute "
            f"(residual {worst:.2e})")
    return worst


def r_lattice(v: Corepresentation, depth: int = 3, mirror: bool = False,
              eps: float | None = None) -> InvariantLattice:
    """Lattice of endomorphism algebras of alternating words in v.

    Cell (i, j) is End of the word with letters at positions i..j-1, the
    letter at even position being v and at odd position conjugate(v)
    (swapped when ``mirror``), highest position leftmost.  The horizontal
    inclusion tensors the identity onto a new leftmost letter, the vertical
    inclusion onto a new rightmost letter.
    """
    eps = resolve_eps(eps)
    if depth < 1:
        raise DimensionMismatch("depth must be at least 1")
    v.require_unitary(eps)
    h = v.dim
    cap = get_config().max_algebra_dim
    if h ** (2 * depth) > cap:
        raise DimensionMismatch(
            f"depth-{depth} words need ambient dimension {h ** (2 * depth)} "
            f"> max_algebra_dim={cap}")
    even, odd = v, conjugate(v)
    if mirror:
        even, odd = odd, even

    def letter(k: int) -> Corepresentation:
        return even if k % 2 == 0 else odd

    words = {}
    for i in range(depth):
        words[(i, i + 1)] = letter(i)
        for j in range(i + 2, depth + 1):
            words[(i, j)] = tensor_product(letter(j - 1), words[(i, j - 1)])

    cells = {}
    for i in range(depth + 1):
        amb = matrix_algebra(1)
        cells[(i, i)] = subalgebra_from_basis(amb, amb.unit[:, None], eps)
    for (i, j), w in words.items():
        mats = intertwiners(w, w, eps)
        cells[(i, j)] = subalgebra_from_basis(
            matrix_algebra(w.dim), mats.reshape(mats.shape[0], -1).T, eps)

    horizontal, vertical = {}, {}
    hres = vres = 0.0
    for i in range(depth + 1):
        for j in range(i, depth):
            n = h ** (j - i)
            big = np.stack(
                [np.kron(np.eye(h), c.reshape(n, n)).reshape(-1)
                 for c in cells[(i, j)].embed.T], axis=1)
            horizontal[(i, j)], r = _express(
                cells[(i, j + 1)].embed, big, eps, f"horizontal ({i}, {j})")
            hres = max(hres, r)
    for i in range(depth):
        for j in range(i + 1, depth + 1):
            n = h ** (j - i - 1)
            big = np.stack(
                [np.kron(c.reshape(n, n), np.eye(h)).reshape(-1)
                 for c in cells[(i + 1, j)].embed.T], axis=1)
            vertical[(i, j)], r = _express(
                cells[(i, j)].embed, big, eps, f"vertical ({i}, {j})")
            vres = max(vres, r)
    sres = _square_residual(horizontal, vertical, depth)
    meta = {"construction": "words", "mirror": mirror,
            "horizontal_residual": hres, "vertical_residual": vres,
            "square_residual": sres}
    return InvariantLattice(depth=depth, cells=cells, horizontal=horizontal,
                            vertical=vertical, meta=meta)


@dataclass(frozen=True, eq=False)
class PrincipalGraphData:
    """Bratteli data of lattice rows as bipartite multigraphs.

    For each requested row, column t holds the blocks of cell
    (row, row + t) in the deterministic block order of the cell algebra, and
    ``matrices[row][t]`` is the inclusion matrix from column t to t+1.
    """

    rows: tuple
    block_sizes: dict
    matrices: dict
    depth_profile: dict

    def edge_list(self, row: int) -> list:
        """Edges ((col, a), (col + 1, b), multiplicity), multiplicity > 0."""
        out = []
        for t, m in enumerate(self.matrices[row]):
            for a in range(m.shape[0]):
                for b in range(m.shape[1]):
                    k = int(m[a, b])
                    if k:
                        out.append(((t, a), (t + 1, b), k))
        return out


def principal_graph(lat: InvariantLattice, rows=(0, 1),
                    eps: float | None = None) -> PrincipalGraphData:
    eps = resolve_eps(eps)
    if lat.depth < 2:
        raise DimensionMismatch("principal graph needs lattice depth >= 2")
    rows = tuple(int(r) for r in rows)
    sizes, mats, prof = {}, {}, {}
    for r in rows:
        if not 0 <= r < lat.depth:
            raise DimensionMismatch(f"row {r} is not in 0..{lat.depth - 1}")
        cols = [lat.cells[(r, j)].small.block_structure().block_sizes
                for j in range(r, lat.depth + 1)]
        ms = [inclusion_data(lat.row_embedding(r, j), eps).matrix
              for j in range(r, lat.depth)]
        sizes[r] = tuple(cols)
        mats[r] = tuple(ms)
        prof[r] = tuple(len(c) for c in cols)
    return PrincipalGraphData(rows=rows, block_sizes=sizes, matrices=mats,
                              depth_profile=prof)
