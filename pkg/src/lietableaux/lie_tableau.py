"""Tableaux over Lie algebras: splittings, the torsion map, certification.

The data is a Lie algebra g with a vector-space splitting g = a (+) b and a
tableau A in Hom(a,b) written in split coordinates.  For Q in A the lift
x -> x + Q(x) embeds a into g; the torsion

    tau(Q)(x,y) = [x+Qx, y+Qy]_b - Q([x+Qx, y+Qy]_a)

measures how far the lifted bracket is from staying on the graph of Q.  tau
is polynomial in the coordinates of Q: expanding Q = offset + q^eps G_eps
gives monomial coefficient cochains in b (x) Lambda^2(a*) up to degree three
(the cubic part comes from Q applied to the a-component of [Im Q, Im Q]; it
vanishes whenever brackets of image vectors have no a-component, e.g. for
Cartan pairs).  Since Im delta^{1,1} is a fixed linear subspace, the
condition "tau(Q) lies in Im delta^{1,1} for every Q" holds iff every
monomial coefficient lies there; check_condition2 decides exactly that,
monomial by monomial, and cross-validates against direct evaluation at
seeded sample points.

Certification combines condition (2) with condition (1) in one of two
modes: "involutive" runs the Cartan test on A, "two_acyclic" requires the
vanishing of H^{q,2} in a certified window.

An adapted basis reorganizes g as (A_1..A_k, B_1..B_h, C_1..C_s') with the
B's spanning the total image of the family and the A-flag generic; this is
the coframe order the associated differential system is written in.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from . import lie as _lie
from .errors import (
    DimensionMismatch,
    GenericityUnstable,
    InputError,
    NotComplementary,
    NotRegular,
)
from .linalg import (
    Matrix,
    Subspace,
    Vec,
    derive_seed,
    seeded_random_matrix,
    vec,
    vec_add,
    vec_scale,
    vec_sub,
    zero_vec,
)
from .spencer import (
    SpencerCochain,
    TorsionClass,
    TwoAcyclicityVerdict,
    delta11_image,
    is_2acyclic,
    torsion_class,
)
from .tableau import (
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    ENTRY_BOUND,
    Characters,
    CartanTestResult,
    Tableau,
    cartan_test,
    kernel_restricted,
)


# ---------------------------------------------------------------------------
# splittings


class SplitLieAlgebra:
    """A Lie algebra with a chosen vector-space splitting g = a (+) b."""

    def __init__(self, g: _lie.LieAlgebra, a_vecs: Sequence, b_vecs: Sequence):
        a_vecs = tuple(vec(v) for v in a_vecs)
        b_vecs = tuple(vec(v) for v in b_vecs)
        if any(len(v) != g.dim for v in a_vecs + b_vecs):
            raise DimensionMismatch("basis vectors must have the algebra's dimension")
        if len(a_vecs) + len(b_vecs) != g.dim:
            raise NotComplementary(
                f"dim a + dim b = {len(a_vecs)} + {len(b_vecs)} != dim g = {g.dim}")
        stacked = Matrix.from_rows(list(a_vecs) + list(b_vecs), cols=g.dim)
        try:
            # x = E^T c for the stacked basis E, so coordinates are (E^T)^{-1} x
            self._to_coords = stacked.transpose().inverse()
        except ValueError:
            raise NotComplementary("a and b together do not span g")
        self.g = g
        self.a_vecs = a_vecs
        self.b_vecs = b_vecs
        self._proj_cache: dict[str, Matrix] = {}

    @property
    def n(self) -> int:
        return len(self.a_vecs)

    @property
    def s(self) -> int:
        return len(self.b_vecs)

    def coords(self, x: Sequence) -> tuple[Vec, Vec]:
        c = self._to_coords.mul_vec(vec(x))
        return c[:self.n], c[self.n:]

    def coords_a(self, x: Sequence) -> Vec:
        return self.coords(x)[0]

    def coords_b(self, x: Sequence) -> Vec:
        return self.coords(x)[1]

    def embed_a(self, ca: Sequence) -> Vec:
        out = zero_vec(self.g.dim)
        for c, v in zip(vec(ca), self.a_vecs):
            if c:
                out = vec_add(out, vec_scale(c, v))
        return out

    def embed_b(self, cb: Sequence) -> Vec:
        out = zero_vec(self.g.dim)
        for c, v in zip(vec(cb), self.b_vecs):
            if c:
                out = vec_add(out, vec_scale(c, v))
        return out

    def proj_a(self, x: Sequence) -> Vec:
        return self.embed_a(self.coords_a(x))

    def proj_b(self, x: Sequence) -> Vec:
        return self.embed_b(self.coords_b(x))

    def _proj_matrix(self, which: str) -> Matrix:
        cached = self._proj_cache.get(which)
        if cached is None:
            fn = self.proj_a if which == "a" else self.proj_b
            cols = [fn(tuple(Fraction(1 if k == j else 0) for k in range(self.g.dim)))
                    for j in range(self.g.dim)]
            cached = Matrix.from_cols(cols)
            self._proj_cache[which] = cached
        return cached

    @property
    def proj_a_matrix(self) -> Matrix:
        return self._proj_matrix("a")

    @property
    def proj_b_matrix(self) -> Matrix:
        return self._proj_matrix("b")


def make_split(g: _lie.LieAlgebra, a_basis: Sequence, b_basis: Sequence) -> SplitLieAlgebra:
    return SplitLieAlgebra(g, a_basis, b_basis)


# ---------------------------------------------------------------------------
# the main object


class LieTableau:
    """A tableau in Hom(a,b) over a split Lie algebra, possibly affine.

    `generators` of the underlying Tableau must be a basis; `offset` shifts
    the whole family (offset + span of generators).  `cartan` carries the
    pair data when the instance came from the Cartan construction.
    """

    def __init__(self, split: SplitLieAlgebra, tableau: Tableau,
                 offset: Optional[Matrix] = None, mode: str = "involutive",
                 cartan: Optional[_lie.CartanPairData] = None):
        if mode not in ("involutive", "two_acyclic"):
            raise InputError(f"mode must be 'involutive' or 'two_acyclic', got {mode!r}")
        if tableau.n != split.n or tableau.s != split.s:
            raise DimensionMismatch(
                f"tableau shape ({tableau.s},{tableau.n}) does not match the "
                f"splitting (dim b = {split.s}, dim a = {split.n})")
        if len(tableau.generators) != tableau.dim:
            raise InputError("generators must be linearly independent (they name coordinates)")
        if offset is None:
            offset = Matrix.zeros(split.s, split.n)
        if offset.shape != (split.s, split.n):
            raise DimensionMismatch("offset must be an s x n matrix")
        self.split = split
        self.tableau = tableau
        self.offset = offset
        self.mode = mode
        self.cartan = cartan

    @property
    def is_affine(self) -> bool:
        return not self.offset.is_zero()

    @property
    def m(self) -> int:
        """Number of coordinates on the family."""
        return len(self.tableau.generators)

    def element(self, q_coords: Sequence) -> Matrix:
        q_coords = vec(q_coords)
        if len(q_coords) != self.m:
            raise DimensionMismatch(f"expected {self.m} coordinates, got {len(q_coords)}")
        out = self.offset
        for c, gmat in zip(q_coords, self.tableau.generators):
            if c:
                out = out.add(gmat.scale(c))
        return out

    def to_json(self) -> dict:
        obj = {
            "lie": self.split.g.to_json(),
            "a_basis": Matrix.from_rows(list(self.split.a_vecs),
                                        cols=self.split.g.dim).to_json(),
            "b_basis": Matrix.from_rows(list(self.split.b_vecs),
                                        cols=self.split.g.dim).to_json(),
            "generators": [g.to_json() for g in self.tableau.generators],
            "mode": self.mode,
        }
        if self.is_affine:
            obj["offset"] = self.offset.to_json()
        return obj

    @classmethod
    def from_json(cls, obj) -> "LieTableau":
        try:
            g = _lie.LieAlgebra.from_json(obj["lie"])
            a_rows = obj["a_basis"]
            b_rows = obj["b_basis"]
            gens = obj["generators"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"LieTableau JSON needs lie/a_basis/b_basis/generators: {exc}")
        mode = obj.get("mode", "involutive")
        split = SplitLieAlgebra(g, Matrix.from_json(a_rows, cols=g.dim).data,
                                Matrix.from_json(b_rows, cols=g.dim).data)
        mats = [Matrix.from_json(gm, rows=split.s, cols=split.n) for gm in gens]
        offset = None
        if "offset" in obj:
            offset = Matrix.from_json(obj["offset"], rows=split.s, cols=split.n)
        return cls(split, Tableau(split.n, split.s, mats), offset=offset, mode=mode)


def make_lie_tableau(g: _lie.LieAlgebra, a_basis: Sequence, b_basis: Sequence,
                     generators: Sequence[Matrix], offset: Optional[Matrix] = None,
                     mode: str = "involutive") -> LieTableau:
    split = make_split(g, a_basis, b_basis)
    return LieTableau(split, Tableau(split.n, split.s, generators),
                      offset=offset, mode=mode)


# ---------------------------------------------------------------------------
# torsion


def tau_eval(LT: LieTableau, q_coords: Sequence) -> SpencerCochain:
    """tau at one family element, as a (0,2) cochain over the split's b."""
    split = LT.split
    Qm = LT.element(q_coords)
    lifted = [vec_add(split.a_vecs[i], split.embed_b(Qm.col(i)))
              for i in range(split.n)]
    zero_expo = (0,) * split.n
    coords = {}
    for i in range(split.n):
        for j in range(i + 1, split.n):
            br = split.g.bracket(lifted[i], lifted[j])
            ba, bb = split.coords(br)
            val = vec_sub(bb, Qm.mul_vec(ba))
            for b_idx, x in enumerate(val):
                if x:
                    coords[(b_idx, zero_expo, (i, j))] = x
    return SpencerCochain(split.n, split.s, 0, 2, coords)


# sparse polynomials in the family coordinates: exponent tuple -> coefficient
_Poly = dict


def _padd(p: _Poly, q: _Poly) -> _Poly:
    out = dict(p)
    for k, v in q.items():
        nv = out.get(k, Fraction(0)) + v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def _pscale(c: Fraction, p: _Poly) -> _Poly:
    return {k: c * v for k, v in p.items()} if c else {}


def _pmul(p: _Poly, q: _Poly) -> _Poly:
    out: _Poly = {}
    for ka, va in p.items():
        for kb, vb in q.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            nv = out.get(k, Fraction(0)) + va * vb
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
    return out


def _sum_polys(polys) -> _Poly:
    out: _Poly = {}
    for p in polys:
        out = _padd(out, p)
    return out


@dataclass(frozen=True)
class TauPolynomial:
    """tau expanded in family coordinates: monomial -> coefficient cochain.

    Degree runs up to three.  constant/linear/quadratic/cubic views slice
    the same monomial table; evaluate() reproduces tau_eval exactly.
    """

    n: int
    s: int
    m: int
    monomials: Mapping[tuple, SpencerCochain]

    @property
    def constant(self) -> SpencerCochain:
        key = (0,) * self.m
        return self.monomials.get(key, SpencerCochain(self.n, self.s, 0, 2, {}))

    @property
    def linear(self) -> tuple[SpencerCochain, ...]:
        out = []
        for eps in range(self.m):
            key = tuple(1 if k == eps else 0 for k in range(self.m))
            out.append(self.monomials.get(key, SpencerCochain(self.n, self.s, 0, 2, {})))
        return tuple(out)

    @property
    def quadratic(self) -> dict:
        return {k: v for k, v in self.monomials.items() if sum(k) == 2}

    @property
    def cubic(self) -> dict:
        return {k: v for k, v in self.monomials.items() if sum(k) == 3}

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.monomials), default=0)

    def evaluate(self, q_coords: Sequence) -> SpencerCochain:
        q_coords = vec(q_coords)
        if len(q_coords) != self.m:
            raise DimensionMismatch(f"expected {self.m} coordinates")
        out = SpencerCochain(self.n, self.s, 0, 2, {})
        for expo, cochain in self.monomials.items():
            val = Fraction(1)
            for q, e in zip(q_coords, expo):
                val *= q ** e
            if val:
                out = out.add(cochain.scale(val))
        return out


def tau_polynomial(LT: LieTableau, check_points: int = 20,
                   seed: int = DEFAULT_SEED) -> TauPolynomial:
    """Exact monomial expansion of tau over the family coordinates."""
    split, g = LT.split, LT.split.g
    n, s, m = split.n, split.s, LT.m
    zero_expo = (0,) * m
    gens = LT.tableau.generators

    # lifted frame vectors as polynomial g-vectors, degree <= 1
    lifted = []
    for i in range(n):
        comp = []
        base = vec_add(split.a_vecs[i], split.embed_b(LT.offset.col(i)))
        for w in range(g.dim):
            poly: _Poly = {}
            if base[w]:
                poly[zero_expo] = base[w]
            for eps in range(m):
                x = split.embed_b(gens[eps].col(i))[w]
                if x:
                    key = tuple(1 if k == eps else 0 for k in range(m))
                    poly = _padd(poly, {key: x})
            comp.append(poly)
        lifted.append(comp)

    to_coords = split._to_coords
    mono: dict[tuple, dict] = {}
    for i in range(n):
        for j in range(i + 1, n):
            # bracket of polynomial vectors
            br = [dict() for _ in range(g.dim)]
            for u in range(g.dim):
                pu = lifted[i][u]
                if not pu:
                    continue
                for v in range(g.dim):
                    pv = lifted[j][v]
                    if not pv:
                        continue
                    cuv = g.c[u][v]
                    prod = None
                    for w in range(g.dim):
                        if cuv[w]:
                            if prod is None:
                                prod = _pmul(pu, pv)
                            br[w] = _padd(br[w], _pscale(cuv[w], prod))
            full = [_sum_polys([_pscale(to_coords.entry(r, w), br[w])
                                for w in range(g.dim)])
                    for r in range(g.dim)]
            br_a, br_b = full[:n], full[n:]
            # Q applied to the a-component: offset part plus one q-degree each
            q_of_a = []
            for row in range(s):
                acc = _sum_polys([_pscale(LT.offset.entry(row, col), br_a[col])
                                  for col in range(n)])
                for eps in range(m):
                    shift = tuple(1 if k == eps else 0 for k in range(m))
                    for col in range(n):
                        x = gens[eps].entry(row, col)
                        if x:
                            acc = _padd(acc, {tuple(a + b for a, b in zip(k, shift)): x * v
                                              for k, v in br_a[col].items()})
                q_of_a.append(acc)
            for b_idx in range(s):
                poly = _padd(br_b[b_idx], _pscale(Fraction(-1), q_of_a[b_idx]))
                for expo, val in poly.items():
                    mono.setdefault(expo, {})[(b_idx, (0,) * n, (i, j))] = val

    monomials = {expo: SpencerCochain(n, s, 0, 2, coords)
                 for expo, coords in mono.items() if coords}
    tp = TauPolynomial(n, s, m, monomials)
    if tp.degree > 3:
        raise RuntimeError("tau expansion exceeded degree three; bug")
    for t in range(check_points):
        pt = seeded_random_matrix(1, m, derive_seed("tau-check", seed, t),
                                  ENTRY_BOUND).row(0) if m else ()
        if tp.evaluate(pt) != tau_eval(LT, pt):
            raise RuntimeError("tau polynomial disagrees with direct evaluation; bug")
    return tp


# ---------------------------------------------------------------------------
# condition (2) and certification


@dataclass(frozen=True)
class Condition2Report:
    """Monomial-wise decision of the absorbability of tau.

    Each failing monomial is witnessed by its nonzero class in the quotient
    of b (x) Lambda^2(a*) by the delta-image of A (x) a*.
    """

    holds: bool
    witnesses: tuple
    points_checked: int


def check_condition2(LT: LieTableau, seed: int = DEFAULT_SEED,
                     points: int = 50) -> Condition2Report:
    """Does tau(Q) lie in Im delta^{1,1} for every Q in the family?

    tau is polynomial in the family coordinates and Im delta^{1,1} is a
    linear subspace, so the quantifier over all Q reduces to finitely many
    membership tests, one per monomial coefficient.  The reduction is
    cross-validated by direct evaluation at seeded sample points.
    """
    tp = tau_polynomial(LT, seed=seed)
    A = LT.tableau
    witnesses = []
    for expo in sorted(tp.monomials):
        tc = torsion_class(tp.monomials[expo], A)
        if not tc.is_zero:
            witnesses.append((expo, tc))
    holds = not witnesses
    image = delta11_image(A)
    for t in range(points):
        pt = seeded_random_matrix(1, LT.m, derive_seed("cond2", seed, t),
                                  ENTRY_BOUND).row(0) if LT.m else ()
        inside = image.contains(tau_eval(LT, pt).flatten())
        if holds and not inside:
            raise RuntimeError("monomial reduction contradicts pointwise check; bug")
    return Condition2Report(holds, tuple(witnesses), points)


@dataclass(frozen=True)
class CertificationReport:
    ok: bool
    mode: str
    condition1_ok: bool
    condition2: Condition2Report
    characters: Characters
    dim: int
    dim_prolongation: int
    cartan: Optional[CartanTestResult]
    two_acyclic: Optional[TwoAcyclicityVerdict]
    trials: int
    seed: int


def certify(LT: LieTableau, trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED,
            q_max: int = 4) -> CertificationReport:
    """Condition (1) per the instance's mode plus condition (2)."""
    A = LT.tableau
    chars = A.characters(trials, seed)
    ct = None
    verdict = None
    if LT.mode == "involutive":
        ct = cartan_test(A, trials, seed)
        cond1 = ct.involutive
    else:
        verdict = is_2acyclic(A, q_max=q_max, trials=trials, seed=seed)
        cond1 = verdict.status == "certified"
    cond2 = check_condition2(LT, seed=seed)
    return CertificationReport(
        ok=cond1 and cond2.holds,
        mode=LT.mode,
        condition1_ok=cond1,
        condition2=cond2,
        characters=chars,
        dim=A.dim,
        dim_prolongation=A.prolongation_dim(1),
        cartan=ct,
        two_acyclic=verdict,
        trials=trials,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# adapted bases


@dataclass(frozen=True)
class AdaptedBasis:
    """Basis (A_1..A_k, B_1..B_h, C_1..C_s') of g organized around the family.

    The B's span the sum of the images of all family elements, the C's
    complete b, and the A-flag is generic (prefix codimensions reproduce
    the character sums).  Vectors are stored both in split coordinates
    (a_flag over a, b_part/c_part over b) and as rows of change_of_basis
    in the ambient g coordinates.
    """

    a_vecs: tuple[Vec, ...]
    b_vecs: tuple[Vec, ...]
    c_vecs: tuple[Vec, ...]
    a_flag: Matrix
    b_part: Matrix
    c_part: Matrix
    change_of_basis: Matrix

    @property
    def h(self) -> int:
        return len(self.b_vecs)

    @property
    def s_prime(self) -> int:
        return len(self.c_vecs)


def _flag_is_generic(A: Tableau, flag: Matrix, chars: Characters) -> bool:
    total = 0
    for j in range(1, A.n + 1):
        total += chars.s_list[j - 1]
        span_j = Subspace.from_vectors(A.n, [flag.row(r) for r in range(j)])
        if span_j.dim != j:
            return False
        if A.dim - kernel_restricted(A, span_j).dim != total:
            return False
    return True


def adapted_basis(LT: LieTableau, trials: int = DEFAULT_TRIALS,
                  seed: int = DEFAULT_SEED) -> AdaptedBasis:
    split, A = LT.split, LT.tableau
    cols = [gmat.col(i) for gmat in A.generators for i in range(A.n)]
    if LT.is_affine:
        cols += [LT.offset.col(i) for i in range(A.n)]
    image = Subspace.from_vectors(A.s, cols)
    completion = image.complement()
    chars = A.characters(trials, seed)
    flag = None
    candidates = [Matrix.identity(A.n)] + [
        seeded_random_matrix(A.n, A.n, derive_seed("adapted-flag", seed, t),
                             ENTRY_BOUND, require_invertible=True)
        for t in range(trials)
    ]
    for cand in candidates:
        if _flag_is_generic(A, cand, chars):
            flag = cand
            break
    if flag is None:
        raise GenericityUnstable(
            "no sampled flag reproduces the character filtration; "
            "retry with more trials or another seed")
    a_vecs = tuple(split.embed_a(flag.row(r)) for r in range(A.n))
    b_vecs = tuple(split.embed_b(v) for v in image.basis)
    c_vecs = tuple(split.embed_b(v) for v in completion.basis)
    change = Matrix.from_rows(list(a_vecs) + list(b_vecs) + list(c_vecs),
                              cols=split.g.dim)
    if change.rank() != split.g.dim:
        raise RuntimeError("adapted basis failed to span g; bug")
    return AdaptedBasis(
        a_vecs=a_vecs,
        b_vecs=b_vecs,
        c_vecs=c_vecs,
        a_flag=flag,
        b_part=Matrix.from_rows(list(image.basis), cols=A.s),
        c_part=Matrix.from_rows(list(completion.basis), cols=A.s),
        change_of_basis=change,
    )


# ---------------------------------------------------------------------------
# the Cartan construction


def cartan_tableau_build(g: _lie.LieAlgebra, cd: _lie.CartanDecomposition,
                         a: Subspace, A_reg: Sequence) -> LieTableau:
    """LieTableau of a Cartan pair: m embedded in Hom(a,b) by X -> -ad_X.

    The splitting complement is ordered (b, m, centralizer), so generator
    matrices are nonzero exactly in the leading dim-b rows.
    """
    data = _lie.cartan_pair_data(g, cd, a, A_reg)
    if not _lie.is_regular(g, cd, a, A_reg):
        raise NotRegular("the chosen element of a is not regular")
    b_vecs = list(data.b.basis) + list(data.m.basis) + list(data.g0_centralizer.basis)
    split = SplitLieAlgebra(g, list(data.a.basis), b_vecs)
    gens = []
    for X in data.m.basis:
        cols = [split.coords_b(g.bracket(Ai, X)) for Ai in data.a.basis]
        gens.append(Matrix.from_cols(cols))
    T = Tableau(split.n, split.s, gens)
    if T.dim != data.m.dim:
        raise RuntimeError("embedding of m into Hom(a,b) dropped rank; bug")
    return LieTableau(split, T, mode="involutive", cartan=data)


# ---------------------------------------------------------------------------
# seeded instances for randomized validation


def random_lie_tableau(seed: int, force_affine: bool = False) -> LieTableau:
    """Deterministic small instance: pooled algebra, random splitting, random tableau."""
    pool = (_lie.so3, _lie.sl2, _lie.heisenberg3, lambda: _lie.abelian(4),
            lambda: _lie.abelian(3))
    g = pool[derive_seed("lt-pool", seed) % len(pool)]()
    change = seeded_random_matrix(g.dim, g.dim, derive_seed("lt-basis", seed),
                                  ENTRY_BOUND, require_invertible=True)
    n = 1 + derive_seed("lt-n", seed) % (g.dim - 1)
    s = g.dim - n
    split = SplitLieAlgebra(g, [change.row(r) for r in range(n)],
                            [change.row(r) for r in range(n, g.dim)])
    want = 1 + derive_seed("lt-dim", seed) % max(1, min(3, n * s))
    gens: list[Matrix] = []
    attempt = 0
    while len(gens) < want and attempt < 40:
        cand = seeded_random_matrix(s, n, derive_seed("lt-gen", seed, attempt), 3)
        attempt += 1
        flat = [x for row in cand.data for x in row]
        trial = Subspace.from_vectors(
            s * n, [[x for row in m.data for x in row] for m in gens] + [flat])
        if trial.dim == len(gens) + 1:
            gens.append(cand)
    offset = None
    if force_affine or derive_seed("lt-affine", seed) % 3 == 0:
        offset = seeded_random_matrix(s, n, derive_seed("lt-offset", seed), 3)
    return LieTableau(split, Tableau(n, s, gens), offset=offset)
