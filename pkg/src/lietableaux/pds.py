"""The Pfaffian system on Y = G x R^m attached to a certified tableau family.

Everything is left-invariant, so no differential-form engine is needed: the
Maurer-Cartan equation d om^w = -sum_{u<v} c^w_{uv} om^u ^ om^v (dual to the
bracket, d om(e_u, e_v) = -om([e_u, e_v])) plus the fiber differentials dp^e
generate all structure equations symbolically.  Working in an adapted basis
(A_1..A_k, B_1..B_h, C_1..C_s') the generated ideal is

    eta^l = beta^l - P^l_i(p) alpha^i   (l = 1..h),   gamma^1..gamma^{s'},

with P^l_i(p) the affine coefficient of the family element at p against B_l,
and the independence condition alpha^1 ^ ... ^ alpha^k != 0.  Expanding
d(eta), d(gamma) and substituting beta^l -> eta^l + P^l_i alpha^i puts each
generator differential into the normal form

    d theta^a == A^a_{ei} dp^e ^ alpha^i + 1/2 c^a_{ij}(p) alpha^i ^ alpha^j

modulo the ideal; the A^a_{ei} come out p-independent (asserted, not
assumed) and the c^a_{ij} are polynomials of degree <= 2 in p.  Reducing
each monomial coefficient of c modulo the boundary image classifies the
torsion; absorbability for all p is a finite set of membership tests.

Integral elements at p are the solutions of

    A^a_{ej} p^e_i - A^a_{ei} p^e_j + c^a_{ij}(p) = 0

in the fiber unknowns p^e_i; when the torsion class vanishes the solution
space is nonempty with homogeneous part of dimension dim A^(1).

The prolongation tower is reported algebraically: level h lives on
G x (A + A^(1) + ... + A^(h)) and the first involutive level is found by
the Cartan test on rewrapped prolongations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from . import lie_tableau as _lt
from .errors import DimensionMismatch, InputError, NotCartan, NotInvolutive
from .lie_tableau import _padd, _pmul, _pscale, _sum_polys
from .linalg import (
    Matrix,
    Subspace,
    Vec,
    derive_seed,
    format_rational,
    seeded_random_matrix,
    solve_affine,
    vec,
)
from .spencer import SpencerCochain, torsion_class
from .tableau import (
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    ENTRY_BOUND,
    Tableau,
    cartan_test_at_level,
    flatten_hom,
    involutivity_order,
)


@dataclass(frozen=True)
class PfaffianSystemSpec:
    """Generators of (I, omega) on Y = G x R^m in an adapted basis.

    eta_coeffs[l][e][i] is the coefficient of alpha^i in the B_l-component
    of the e-th family generator (the tensor Q^l_{ei}); eta_offset holds the
    translation part for affine families.  structure_constants_adapted[u][v]
    is the coordinate vector of [E_u, E_v] in the adapted basis, ordered
    (alpha-duals, B's, C's).
    """

    lie_tableau: _lt.LieTableau
    adapted: _lt.AdaptedBasis
    eta_coeffs: tuple
    eta_offset: Matrix
    gamma_count: int
    structure_constants_adapted: tuple
    independence_rank: int

    @property
    def h(self) -> int:
        return self.adapted.h

    @property
    def s0(self) -> int:
        return self.adapted.h + self.adapted.s_prime

    @property
    def m(self) -> int:
        return self.lie_tableau.m

    def eta_matrix(self, eps: int) -> Matrix:
        rows = [[self.eta_coeffs[l][eps][i] for i in range(self.independence_rank)]
                for l in range(self.h)]
        return Matrix.from_rows(rows, cols=self.independence_rank)

    def source_adapted_tableau(self) -> Tableau:
        """The family directions re-coordinatized: B-rows stacked over zero C-rows."""
        k, sp = self.independence_rank, self.gamma_count
        gens = [self.eta_matrix(e).vstack(Matrix.zeros(sp, k)) for e in range(self.m)]
        return Tableau(k, self.s0, gens)

    def to_json(self) -> dict:
        return {
            "independence_rank": self.independence_rank,
            "eta_count": self.h,
            "gamma_count": self.gamma_count,
            "eta_coeffs": [[[format_rational(x) for x in row] for row in gen]
                           for gen in self.eta_coeffs],
            "eta_offset": [[format_rational(x) for x in row]
                           for row in self.eta_offset.data],
            "structure_constants_adapted": [
                [u, v, [[w, format_rational(c)] for w, c in enumerate(cv) if c]]
                for u, cvs in enumerate(self.structure_constants_adapted)
                for v, cv in enumerate(cvs)
                if u < v and any(cv)
            ],
        }


def build_pds(LT: _lt.LieTableau, trials: int = DEFAULT_TRIALS,
              seed: int = DEFAULT_SEED, force: bool = False) -> PfaffianSystemSpec:
    """Adapted-basis presentation of the Pfaffian system generated by the family.

    Certification runs first unless force is set; a family failing either
    condition does not generate an involutive system, so the refusal is the
    honest default (so the broken fixtures must be force-built).
    """
    if not force:
        rep = _lt.certify(LT, trials=trials, seed=seed)
        if not rep.ok:
            raise NotInvolutive(
                "family failed certification "
                f"(condition1={rep.condition1_ok}, condition2={rep.condition2.holds}); "
                "pass force=True to build the system anyway")
    ab = _lt.adapted_basis(LT, trials=trials, seed=seed)
    k, s = LT.split.n, LT.split.s
    h, sp = ab.h, ab.s_prime
    # old b-coords of new (B,C) basis are the rows of S; columns convert back
    S = ab.b_part.vstack(ab.c_part)
    to_new_b = S.transpose().inverse()
    a_new_to_old = ab.a_flag.transpose()

    def recoord(G: Matrix) -> Matrix:
        out = to_new_b.mul(G.mul(a_new_to_old))
        for r in range(h, h + sp):
            if any(out.entry(r, c) != 0 for c in range(k)):
                raise RuntimeError("family image escapes the B-span; adapted basis bug")
        return Matrix.from_rows([out.row(r) for r in range(h)], cols=k)

    etas = tuple(
        tuple(tuple(M.row(r)) for r in range(h))
        for M in (recoord(G) for G in LT.tableau.generators)
    )
    # reorder to [l][eps][i]
    eta_tensor = tuple(
        tuple(etas[e][l] for e in range(LT.m)) for l in range(h)
    )
    offset = recoord(LT.offset)

    CoB = ab.change_of_basis
    to_adapted = CoB.transpose().inverse()
    g = LT.split.g
    table = tuple(
        tuple(to_adapted.mul_vec(g.bracket(CoB.row(u), CoB.row(v)))
              for v in range(g.dim))
        for u in range(g.dim)
    )
    return PfaffianSystemSpec(LT, ab, eta_tensor, offset, sp, table, k)


# ---------------------------------------------------------------------------
# structure equations

# coframe labels on Y; rank order fixes the sign normalization of wedge keys
_KIND_RANK = {"eta": 0, "ga": 1, "dp": 2, "al": 3}


def _label_key(lab):
    return (_KIND_RANK[lab[0]], lab[1])


def _wedge_into(form: dict, lab1, poly1, lab2, poly2, sign) -> None:
    if lab1 == lab2:
        return
    if _label_key(lab1) > _label_key(lab2):
        lab1, lab2 = lab2, lab1
        sign = -sign
    term = _pscale(Fraction(sign), _pmul(poly1, poly2))
    if not term:
        return
    key = (lab1, lab2)
    merged = _padd(form.get(key, {}), term)
    if merged:
        form[key] = merged
    else:
        form.pop(key, None)


@dataclass(frozen=True)
class _StructureData:
    forms: tuple            # per theta-generator: {(lab,lab): poly in p}
    coeff_tensor: tuple     # A^a_{ei}, constant by linearity (asserted)
    torsion: "TorsionPolynomial"
    linear: bool


@dataclass(frozen=True)
class TorsionPolynomial:
    """c^a_{ij}(p): sparse map (a, (i,j) with i<j, exponent tuple) -> rational."""

    m: int
    k: int
    s0: int
    coefficients: Mapping

    @property
    def vanishes_identically(self) -> bool:
        return not self.coefficients

    def evaluate(self, p: Sequence) -> dict:
        p = vec(p)
        if len(p) != self.m:
            raise DimensionMismatch(f"expected {self.m} fiber coordinates, got {len(p)}")
        out: dict = {}
        for (a, pair, expo), cval in self.coefficients.items():
            term = cval
            for x, e in zip(p, expo):
                term *= x ** e
            if term:
                nv = out.get((a, pair), Fraction(0)) + term
                if nv:
                    out[(a, pair)] = nv
                else:
                    out.pop((a, pair), None)
        return out

    def monomial_cochains(self) -> dict:
        """Exponent tuple -> (0,2)-cochain over the s0 generator directions."""
        grouped: dict = {}
        zero_sym = (0,) * self.k
        for (a, pair, expo), cval in self.coefficients.items():
            grouped.setdefault(expo, {})[(a, zero_sym, pair)] = cval
        return {expo: SpencerCochain(self.k, self.s0, 0, 2, entries)
                for expo, entries in sorted(grouped.items())}

    def to_json(self) -> list:
        return [[a, list(pair), list(expo), format_rational(cval)]
                for (a, pair, expo), cval in sorted(self.coefficients.items())]


def _structure_data(PS: PfaffianSystemSpec) -> _StructureData:
    k, h, sp, m = PS.independence_rank, PS.h, PS.gamma_count, PS.m
    N = k + h + sp
    zero_expo = (0,) * m
    unit = lambda e: tuple(1 if i == e else 0 for i in range(m))

    # P^l_i(p) as polynomials; beta^l substitutes to eta^l + P^l_i alpha^i
    P = [[{} for _ in range(k)] for _ in range(h)]
    for l in range(h):
        for i in range(k):
            poly: dict = {}
            if PS.eta_offset.entry(l, i):
                poly[zero_expo] = PS.eta_offset.entry(l, i)
            for e in range(m):
                cval = PS.eta_coeffs[l][e][i]
                if cval:
                    poly = _padd(poly, {unit(e): cval})
            P[l][i] = poly

    one = {zero_expo: Fraction(1)}
    subst = []
    for w in range(N):
        if w < k:
            subst.append([(("al", w), one)])
        elif w < k + h:
            l = w - k
            terms = [(("eta", l), one)]
            terms += [(("al", i), P[l][i]) for i in range(k) if P[l][i]]
            subst.append(terms)
        else:
            subst.append([(("ga", w - k - h), one)])

    c = PS.structure_constants_adapted

    def mc_form(w: int, weight: dict) -> dict:
        # weight * d om^w = -weight * sum_{u<v} c^w_{uv} om^u ^ om^v, substituted
        out: dict = {}
        for u in range(N):
            for v in range(u + 1, N):
                cw = c[u][v][w]
                if not cw:
                    continue
                for lab1, p1 in subst[u]:
                    for lab2, p2 in subst[v]:
                        _wedge_into(out, lab1, _pmul(weight, _pscale(-cw, p1)),
                                    lab2, p2, 1)
        return out

    forms = []
    for l in range(h):
        form = mc_form(k + l, one)
        for i in range(k):
            if P[l][i]:
                form = _merge(form, mc_form(i, _pscale(Fraction(-1), P[l][i])))
        for e in range(m):
            for i in range(k):
                cval = PS.eta_coeffs[l][e][i]
                if cval:
                    _wedge_into(form, ("dp", e), {zero_expo: Fraction(-cval)},
                                ("al", i), one, 1)
        forms.append(form)
    for u in range(sp):
        forms.append(mc_form(k + h + u, one))

    linear = True
    coeff_tensor = []
    torsion_entries: dict = {}
    for a, form in enumerate(forms):
        A_a = [[Fraction(0)] * k for _ in range(m)]
        for (lab1, lab2), poly in form.items():
            kinds = (lab1[0], lab2[0])
            if kinds == ("dp", "dp"):
                linear = False
            elif kinds == ("dp", "al"):
                if set(poly) - {zero_expo}:
                    raise RuntimeError(
                        "pi-^-omega coefficient depends on p; construction bug")
                A_a[lab1[1]][lab2[1]] = poly.get(zero_expo, Fraction(0))
            elif kinds == ("al", "al"):
                for expo, cval in poly.items():
                    if sum(expo) > 2:
                        raise RuntimeError("torsion degree exceeds two; construction bug")
                    torsion_entries[(a, (lab1[1], lab2[1]), expo)] = cval
        coeff_tensor.append(tuple(tuple(r) for r in A_a))
    tp = TorsionPolynomial(m, k, h + sp, torsion_entries)
    return _StructureData(tuple(forms), tuple(coeff_tensor), tp, linear)


def _merge(f: dict, g: dict) -> dict:
    out = dict(f)
    for key, poly in g.items():
        merged = _padd(out.get(key, {}), poly)
        if merged:
            out[key] = merged
        else:
            out.pop(key, None)
    return out


def structure_torsion(PS: PfaffianSystemSpec) -> TorsionPolynomial:
    """Polynomial torsion coefficients c^a_{ij}(p) of the expanded system."""
    return _structure_data(PS).torsion


def pds_tableau(PS: PfaffianSystemSpec) -> Tableau:
    """Tableau read off the dp ^ alpha coefficients of the structure equations."""
    sd = _structure_data(PS)
    gens = [Matrix.from_rows([[sd.coeff_tensor[a][e][i] for i in range(PS.independence_rank)]
                              for a in range(PS.s0)])
            for e in range(PS.m)]
    return Tableau(PS.independence_rank, PS.s0, gens)


@dataclass(frozen=True)
class TorsionClassReport:
    vanishes_identically: bool
    failing_monomials: tuple


def torsion_class_polynomial(PS: PfaffianSystemSpec) -> TorsionClassReport:
    """Reduce each monomial torsion coefficient modulo the boundary image.

    The class of c(p) is linear in the coefficients, so vanishing for all p
    is equivalent to every monomial reducing to zero.
    """
    sd = _structure_data(PS)
    A = pds_tableau(PS)
    failing = []
    for expo, cochain in sd.torsion.monomial_cochains().items():
        tc = torsion_class(cochain, A)
        if not tc.is_zero:
            failing.append((expo, tc))
    return TorsionClassReport(not failing, tuple(failing))


# ---------------------------------------------------------------------------
# integral elements

def integral_elements_at(PS: PfaffianSystemSpec, p: Sequence
                         ) -> Optional[tuple[Vec, Subspace]]:
    """Solve A^a_{ej} x^e_i - A^a_{ei} x^e_j + c^a_{ij}(p) = 0 for x^e_i.

    Returns (particular, homogeneous) or None when the system is
    inconsistent, i.e. the torsion class at p does not vanish.  Unknown
    x^e_i sits at flat index e*k + i.
    """
    p = vec(p)
    if len(p) != PS.m:
        raise DimensionMismatch(f"expected {PS.m} fiber coordinates, got {len(p)}")
    sd = _structure_data(PS)
    k, m = PS.independence_rank, PS.m
    cvals = sd.torsion.evaluate(p)
    rows, rhs = [], []
    for a in range(PS.s0):
        for i in range(k):
            for j in range(i + 1, k):
                row = [Fraction(0)] * (m * k)
                for e in range(m):
                    row[e * k + i] += sd.coeff_tensor[a][e][j]
                    row[e * k + j] -= sd.coeff_tensor[a][e][i]
                rows.append(row)
                rhs.append(-cvals.get((a, (i, j)), Fraction(0)))
    return solve_affine(Matrix.from_rows(rows, cols=m * k), rhs)


# ---------------------------------------------------------------------------
# involution verification

@dataclass(frozen=True)
class InvolutionReport:
    """Four verdicts: the generated system is linear, its torsion is
    absorbable for all p, its tableau read back from the structure equations
    spans the family directions, and its Cartan characters match."""

    linear: bool
    torsion_class_zero: bool
    failing_monomials: tuple
    integral_points_ok: bool
    points_checked: int
    tableau_matches: bool
    characters_match: bool
    pds_characters: tuple
    source_characters: tuple
    s0: int
    ok: bool


def verify_involution(PS: PfaffianSystemSpec, sample_points: int = 20,
                      trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED
                      ) -> InvolutionReport:
    sd = _structure_data(PS)
    cls = torsion_class_polynomial(PS)

    read_back = pds_tableau(PS)
    source = PS.source_adapted_tableau()
    span_read = read_back.basis_matrices()
    span_src = source.basis_matrices()
    X = Subspace.from_vectors(PS.s0 * PS.independence_rank,
                              [flatten_hom(M) for M in span_read])
    Y = Subspace.from_vectors(PS.s0 * PS.independence_rank,
                              [flatten_hom(M) for M in span_src])
    tableau_matches = X.dim == Y.dim and X.contains_subspace(Y)

    d1 = PS.lie_tableau.tableau.prolongation_dim(1)
    points_ok = True
    for t in range(sample_points):
        pt = (seeded_random_matrix(1, PS.m, derive_seed("pds-verify", seed, t),
                                   ENTRY_BOUND).row(0) if PS.m else ())
        sol = integral_elements_at(PS, pt)
        if sol is None or sol[1].dim != d1:
            points_ok = False
            break

    pds_chars = read_back.characters(trials, seed)
    src_chars = PS.lie_tableau.tableau.characters(trials, seed)
    chars_match = pds_chars.s_list == src_chars.s_list

    ok = (sd.linear and cls.vanishes_identically and points_ok
          and tableau_matches and chars_match)
    return InvolutionReport(sd.linear, cls.vanishes_identically,
                            cls.failing_monomials, points_ok, sample_points,
                            tableau_matches, chars_match,
                            tuple(pds_chars.s_list), tuple(src_chars.s_list),
                            PS.s0, ok)


# ---------------------------------------------------------------------------
# prolongation tower

@dataclass(frozen=True)
class TowerLevel:
    h: int
    space_dim: int
    configuration_dim: int
    involutive: bool
    characters: Optional[tuple]


@dataclass(frozen=True)
class ProlongationTower:
    levels: tuple[TowerLevel, ...]
    least_involutive: Optional[int]

    def to_json(self) -> dict:
        return {
            "levels": [{"h": L.h, "space_dim": L.space_dim,
                        "configuration_dim": L.configuration_dim,
                        "involutive": L.involutive,
                        "characters": list(L.characters) if L.characters else None}
                       for L in self.levels],
            "least_involutive": self.least_involutive,
        }


def prolongation_tower(LT: _lt.LieTableau, h_max: int = 3,
                       trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED,
                       force: bool = False) -> ProlongationTower:
    """Dims of the prolonged systems: level h lives on G x (A + ... + A^(h)).

    Certification gates the construction (the tower description needs
    2-acyclicity at least); force skips the gate.
    """
    if not force:
        rep = _lt.certify(LT, trials=trials, seed=seed)
        if not rep.ok:
            raise NotInvolutive(
                "family failed certification; the tower description does not apply "
                "(pass force=True to tabulate dimensions anyway)")
    A = LT.tableau
    levels = []
    config = LT.split.g.dim
    for hh in range(h_max + 1):
        d = A.prolongation_dim(hh)
        config += d
        test = cartan_test_at_level(A, hh, trials=trials, seed=seed)
        levels.append(TowerLevel(hh, d, config, test.involutive,
                                 tuple(test.characters.s_list) if test.involutive else None))
    least = involutivity_order(A, h_max, trials=trials, seed=seed)
    return ProlongationTower(tuple(levels), least)


# ---------------------------------------------------------------------------
# the first-order PDE form of a Cartan-pair system

@dataclass(frozen=True)
class Gg0System:
    """B^a_{alpha,i} d_j F^alpha - B^a_{alpha,j} d_i F^alpha + (bilinear slot)
    = Phi^a_{ij}(F), the quadratic right-hand side.

    For systems built from a Cartan pair the first-order bilinear slot is
    identically zero and Phi is the quadratic part of the torsion; both are
    exported so the shape covers the general quadratic form.
    """

    unknowns: int
    domain_dim: int
    target_dim: int
    pairs: tuple
    first_order: Mapping       # (a, alpha, i) -> rational
    first_order_bilinear: Mapping  # (a, alpha, beta, i) -> rational; zero here
    quadratic_rhs: Mapping     # (a, (i,j), exponent tuple) -> rational

    def to_json(self) -> dict:
        return {
            "unknowns": self.unknowns,
            "domain_dim": self.domain_dim,
            "target_dim": self.target_dim,
            "pairs": [list(pr) for pr in self.pairs],
            "first_order": [[a, al, i, format_rational(cv)]
                            for (a, al, i), cv in sorted(self.first_order.items())],
            "first_order_bilinear": [
                [a, al, be, i, format_rational(cv)]
                for (a, al, be, i), cv in sorted(self.first_order_bilinear.items())],
            "quadratic_rhs": [[a, list(pair), list(expo), format_rational(cv)]
                              for (a, pair, expo), cv in sorted(self.quadratic_rhs.items())],
        }


def gg0_coefficients(LT: _lt.LieTableau) -> Gg0System:
    """PDE-form export of the system attached to a Cartan pair.

    Requires the Cartan provenance: the torsion of a Cartan-pair family is
    purely quadratic (the frame brackets land outside a, and a is abelian),
    which is what makes the right-hand side a quadratic form in F alone.
    """
    if LT.cartan is None:
        raise NotCartan("gg0 export needs a family built from a Cartan pair")
    k, s, m = LT.split.n, LT.split.s, LT.m
    first_order: dict = {}
    for alpha, G in enumerate(LT.tableau.generators):
        for a in range(s):
            for i in range(k):
                if G.entry(a, i):
                    first_order[(a, alpha, i)] = G.entry(a, i)
    tp = _lt.tau_polynomial(LT)
    quadratic: dict = {}
    for expo, cochain in sorted(tp.monomials.items()):
        if sum(expo) != 2:
            raise RuntimeError(
                f"Cartan-pair torsion has a degree-{sum(expo)} term; bug")
        for (b_idx, _sym, pair), cval in cochain.coords.items():
            quadratic[(b_idx, pair, expo)] = cval
    pairs = tuple((i, j) for i in range(k) for j in range(i + 1, k))
    return Gg0System(m, k, s, pairs, first_order, {}, quadratic)
