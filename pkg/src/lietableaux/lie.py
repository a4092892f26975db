"""Finite-dimensional Lie algebras over Q by structure constants.

A LieAlgebra stores the full bracket table c[i][j] = [e_i, e_j] as coordinate
vectors.  Construction validates antisymmetry (free, by filling from i < j)
and the Jacobi identity on every basis triple; a violation reports the triple
and the residual vector.

The Cartan-pair machinery lives here too: decompositions g = g0 (+) g1 with
[g0,g0] c g0, [g0,g1] c g1, [g1,g1] c g0, Killing-orthogonality tools, and
regularity of elements of a maximal abelian subspace a c g1 (ad_A must map
m = a-perp ^ g1 isomorphically onto b = g0 ^ (centralizer of a in g0)-perp).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    DimensionMismatch,
    InputError,
    JacobiViolation,
    NotAbelian,
    NotComplementary,
    NotInDecomposition,
)
from .linalg import (
    Matrix,
    Subspace,
    Vec,
    format_rational,
    is_zero_vec,
    rat,
    vec,
    vec_add,
    vec_scale,
    zero_vec,
)


class LieAlgebra:
    def __init__(self, dim: int, brackets: dict, labels: Optional[Sequence[str]] = None,
                 _skip_jacobi: bool = False):
        """brackets maps (i, j) with i < j to the coordinate vector of [e_i, e_j]."""
        if dim < 0:
            raise InputError("dimension must be nonnegative")
        table = [[zero_vec(dim) for _ in range(dim)] for _ in range(dim)]
        for (i, j), v in brackets.items():
            if not (0 <= i < j < dim):
                raise InputError(f"bracket key ({i},{j}) must satisfy 0 <= i < j < dim")
            v = vec(v)
            if len(v) != dim:
                raise DimensionMismatch(f"bracket value for ({i},{j}) has wrong length")
            table[i][j] = v
            table[j][i] = vec_scale(Fraction(-1), v)
        self.dim = dim
        self.c = tuple(tuple(row) for row in table)
        self.labels = tuple(labels) if labels is not None \
            else tuple(f"e{i}" for i in range(dim))
        if len(self.labels) != dim:
            raise InputError("label count must equal the dimension")
        self._ad_cache: Optional[tuple[Matrix, ...]] = None
        self._killing: Optional[Matrix] = None
        if not _skip_jacobi:
            self._check_jacobi()

    # -- core operations ----------------------------------------------------

    def bracket(self, x: Sequence, y: Sequence) -> Vec:
        x, y = vec(x), vec(y)
        if len(x) != self.dim or len(y) != self.dim:
            raise DimensionMismatch("vectors must have the algebra's dimension")
        out = zero_vec(self.dim)
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, yj in enumerate(y):
                if not yj:
                    continue
                cij = self.c[i][j]
                if not is_zero_vec(cij):
                    out = vec_add(out, vec_scale(xi * yj, cij))
        return out

    def ad(self, x: Sequence) -> Matrix:
        """Matrix of ad_x = [x, .] acting on coordinates."""
        x = vec(x)
        cols = [self.bracket(x, _unit(self.dim, j)) for j in range(self.dim)]
        return Matrix.from_cols(cols)

    def _basis_ads(self) -> tuple[Matrix, ...]:
        if self._ad_cache is None:
            self._ad_cache = tuple(self.ad(_unit(self.dim, i)) for i in range(self.dim))
        return self._ad_cache

    def killing_form(self) -> Matrix:
        """K(x,y) = trace(ad_x ad_y) on the basis."""
        if self._killing is None:
            ads = self._basis_ads()
            rows = []
            for i in range(self.dim):
                row = []
                for j in range(self.dim):
                    prod = ads[i].mul(ads[j])
                    row.append(sum((prod.entry(k, k) for k in range(self.dim)), Fraction(0)))
                rows.append(row)
            self._killing = Matrix.from_rows(rows, cols=self.dim)
        return self._killing

    def _check_jacobi(self) -> None:
        for i in range(self.dim):
            ei = _unit(self.dim, i)
            for j in range(i + 1, self.dim):
                ej = _unit(self.dim, j)
                for k in range(j + 1, self.dim):
                    ek = _unit(self.dim, k)
                    res = vec_add(
                        vec_add(self.bracket(ei, self.c[j][k]),
                                self.bracket(ej, self.c[k][i])),
                        self.bracket(ek, self.c[i][j]))
                    if not is_zero_vec(res):
                        raise JacobiViolation(i, j, k, res)

    def is_abelian_subspace(self, S: Subspace) -> bool:
        bs = S.basis
        return all(is_zero_vec(self.bracket(bs[i], bs[j]))
                   for i in range(len(bs)) for j in range(i + 1, len(bs)))

    def bracket_closed_into(self, S: Subspace, T: Subspace, target: Subspace) -> bool:
        """[S, T] c target, checked on basis pairs."""
        return all(target.contains(self.bracket(u, v))
                   for u in S.basis for v in T.basis)

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        entries = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                terms = [[k, format_rational(x)] for k, x in enumerate(self.c[i][j]) if x]
                if terms:
                    entries.append([i, j, terms])
        return {"dim": self.dim, "structure": entries, "labels": list(self.labels)}

    @classmethod
    def from_json(cls, obj) -> "LieAlgebra":
        try:
            dim = int(obj["dim"])
            raw = obj.get("structure", [])
            labels = obj.get("labels")
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"Lie algebra JSON needs 'dim' and 'structure': {exc}")
        brackets = {}
        for item in raw:
            if not (isinstance(item, list) and len(item) == 3):
                raise InputError(f"bad structure entry {item!r}")
            i, j, terms = int(item[0]), int(item[1]), item[2]
            v = [Fraction(0)] * dim
            for term in terms:
                if not (isinstance(term, list) and len(term) == 2):
                    raise InputError(f"bad structure term {term!r}")
                k = int(term[0])
                if not 0 <= k < dim:
                    raise InputError(f"structure target index {k} out of range")
                v[k] += rat(term[1])
            brackets[(i, j)] = v
        return cls(dim, brackets, labels=labels)


def _unit(n: int, i: int) -> Vec:
    return tuple(Fraction(1 if j == i else 0) for j in range(n))


# ---------------------------------------------------------------------------
# constructions


def abelian(dim: int) -> LieAlgebra:
    return LieAlgebra(dim, {})


def from_matrices(mats: Sequence[Matrix], labels: Optional[Sequence[str]] = None) -> LieAlgebra:
    """Structure constants of a matrix Lie algebra from commutators.

    The given matrices must be linearly independent and closed under
    commutation; the bracket table is solved exactly.
    """
    if not mats:
        return abelian(0)
    k = mats[0].rows
    if any(m.shape != (k, k) for m in mats):
        raise InputError("matrix realization needs square matrices of one size")
    flats = [tuple(x for row in m.data for x in row) for m in mats]
    span = Matrix.from_rows(flats)
    if span.rank() != len(mats):
        raise InputError("matrix realization basis is linearly dependent")
    coord_solver = span.transpose()
    brackets = {}
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            comm = mats[i].mul(mats[j]).sub(mats[j].mul(mats[i]))
            flat = tuple(x for row in comm.data for x in row)
            sol = coord_solver.solve(flat)
            if sol is None:
                raise InputError(
                    f"commutator of generators {i} and {j} leaves the span; not a Lie algebra basis")
            brackets[(i, j)] = sol
    return LieAlgebra(len(mats), brackets, labels=labels)


def so3() -> LieAlgebra:
    return LieAlgebra(3, {(0, 1): [0, 0, 1], (1, 2): [1, 0, 0], (0, 2): [0, -1, 0]},
                      labels=("e1", "e2", "e3"))


def sl2() -> LieAlgebra:
    # basis (H, X, Y): [H,X] = 2X, [H,Y] = -2Y, [X,Y] = H
    return LieAlgebra(3, {(0, 1): [0, 2, 0], (0, 2): [0, 0, -2], (1, 2): [1, 0, 0]},
                      labels=("H", "X", "Y"))


def heisenberg3() -> LieAlgebra:
    return LieAlgebra(3, {(0, 1): [0, 0, 1]}, labels=("x", "y", "z"))


# ---------------------------------------------------------------------------
# Cartan decompositions


@dataclass(frozen=True)
class CartanDecomposition:
    """g = g0 (+) g1 with [g0,g0] c g0, [g0,g1] c g1, [g1,g1] c g0."""

    g: LieAlgebra
    g0: Subspace
    g1: Subspace


def make_cartan_decomposition(g: LieAlgebra, g0: Subspace, g1: Subspace) -> CartanDecomposition:
    if g0.ambient_dim != g.dim or g1.ambient_dim != g.dim:
        raise DimensionMismatch("subspaces must live in the algebra")
    if g0.dim + g1.dim != g.dim or g0.intersect(g1).dim != 0:
        raise NotComplementary("g0 and g1 must split g as a direct sum")
    if not g.bracket_closed_into(g0, g0, g0):
        raise NotInDecomposition("[g0, g0] is not contained in g0")
    if not g.bracket_closed_into(g0, g1, g1):
        raise NotInDecomposition("[g0, g1] is not contained in g1")
    if not g.bracket_closed_into(g1, g1, g0):
        raise NotInDecomposition("[g1, g1] is not contained in g0")
    if g.killing_form().rank() != g.dim:
        raise NotInDecomposition("Killing form must be nondegenerate")
    return CartanDecomposition(g, g0, g1)


def centralizer_in(g: LieAlgebra, S: Subspace, T: Subspace) -> Subspace:
    """{x in S : [x, t] = 0 for all t in T}, as a subspace of g."""
    if S.ambient_dim != g.dim or T.ambient_dim != g.dim:
        raise DimensionMismatch("subspaces must live in the algebra")
    if S.dim == 0 or T.dim == 0:
        return S
    rows = []
    for t in T.basis:
        images = [g.bracket(u, t) for u in S.basis]
        for coord in range(g.dim):
            rows.append(tuple(img[coord] for img in images))
    ker = Matrix.from_rows(rows, cols=S.dim).kernel_basis()
    vecs = []
    for coeffs in ker.basis:
        w = zero_vec(g.dim)
        for c, u in zip(coeffs, S.basis):
            if c:
                w = vec_add(w, vec_scale(c, u))
        vecs.append(w)
    return Subspace.from_vectors(g.dim, vecs)


def killing_perp(g: LieAlgebra, S: Subspace) -> Subspace:
    """Killing-orthogonal complement of S in g."""
    if S.ambient_dim != g.dim:
        raise DimensionMismatch("subspace must live in the algebra")
    if S.dim == 0:
        return Subspace.full(g.dim)
    K = g.killing_form()
    rows = [K.mul_vec(u) for u in S.basis]
    return Matrix.from_rows(rows, cols=g.dim).kernel_basis()


@dataclass(frozen=True)
class CartanPairData:
    """The derived spaces of a rank-k pair (decomposition, abelian a, regular A).

    m = Killing-perp of a inside g1; b = g0 ^ (Killing-perp of the
    centralizer of a in g0).  For regular A, ad_A swaps m and b bijectively.
    """

    decomposition: CartanDecomposition
    a: Subspace
    regular: Vec
    m: Subspace
    b: Subspace
    g0_centralizer: Subspace


def cartan_pair_data(g: LieAlgebra, cd: CartanDecomposition, a: Subspace,
                     A: Sequence) -> CartanPairData:
    A = vec(A)
    if a.ambient_dim != g.dim:
        raise DimensionMismatch("a must live in the algebra")
    if not cd.g1.contains_subspace(a):
        raise NotInDecomposition("a must be contained in g1")
    if not g.is_abelian_subspace(a):
        raise NotAbelian("a must be an abelian subspace")
    if not a.contains(A):
        raise NotInDecomposition("the candidate regular element must lie in a")
    m = killing_perp(g, a).intersect(cd.g1)
    g0a = centralizer_in(g, cd.g0, a)
    b = cd.g0.intersect(killing_perp(g, g0a))
    return CartanPairData(cd, a, A, m, b, g0a)


def is_regular(g: LieAlgebra, cd: CartanDecomposition, a: Subspace, A: Sequence) -> bool:
    """ad_A maps m into b injectively with dim m = dim b (hence bijectively)."""
    data = cartan_pair_data(g, cd, a, A)
    if data.m.dim != data.b.dim:
        return False
    if data.m.dim == 0:
        return True
    images = [g.bracket(data.regular, x) for x in data.m.basis]
    if not all(data.b.contains(img) for img in images):
        return False
    return Matrix.from_rows(images, cols=g.dim).rank() == data.m.dim


def cartan_tableau(g: LieAlgebra, cd: CartanDecomposition, a: Subspace, A: Sequence):
    """The tableau of the pair: m embedded in Hom(a, b) by X -> -ad_X.

    Returns a certified-construction LieTableau over the splitting
    g = a (+) (m + b + centralizer); see lie_tableau.cartan_tableau_build.
    """
    from .lie_tableau import cartan_tableau_build  # deferred, avoids a cycle

    return cartan_tableau_build(g, cd, a, A)
