"""Pfaffian-system synthesis: structure equations, torsion, tower, PDE export."""

from fractions import Fraction

import pytest

from lietableaux import catalog as C
from lietableaux import lie_tableau as LT
from lietableaux import pds as P
from lietableaux.errors import DimensionMismatch, NotCartan, NotInvolutive
from lietableaux.lie import abelian
from lietableaux.linalg import Matrix, derive_seed, seeded_random_matrix, unit_vec
from lietableaux.tableau import Tableau


def pds_of(name, **kw):
    return P.build_pds(C.get(name).lie_tableau, **kw)


def tau_in_adapted_coords(lt, ps, p):
    """tau(p) re-expressed against the adapted bases on both sides."""
    ab = ps.adapted
    S = ab.b_part.vstack(ab.c_part)
    to_new_b = S.transpose().inverse()
    F = ab.a_flag
    k, n, s = ps.independence_rank, lt.split.n, lt.split.s
    tau = LT.tau_eval(lt, p)
    out = {}
    for i in range(k):
        for j in range(i + 1, k):
            val = [Fraction(0)] * s
            for aa in range(n):
                for bb in range(n):
                    if aa == bb:
                        continue
                    pair = (aa, bb) if aa < bb else (bb, aa)
                    sgn = 1 if aa < bb else -1
                    for (bi, _z, pr), cv in tau.coords.items():
                        if pr == pair:
                            val[bi] += F.entry(i, aa) * F.entry(j, bb) * sgn * cv
            new = to_new_b.mul_vec(val)
            for a in range(ps.s0):
                if new[a]:
                    out[(a, (i, j))] = new[a]
    return out


class TestBuild:
    def test_cr_shape(self):
        ps = pds_of("abelian_cr")
        assert (ps.h, ps.gamma_count, ps.independence_rank, ps.m) == (2, 0, 2, 2)
        assert ps.eta_offset.is_zero()
        # abelian: every adapted structure constant vanishes
        assert all(not any(cv) for row in ps.structure_constants_adapted for cv in row)

    def test_zero_tableau_is_pure_frobenius(self):
        ps = pds_of("zero")
        assert (ps.h, ps.gamma_count, ps.m) == (0, 2, 0)
        assert P.structure_torsion(ps).vanishes_identically

    def test_willmore_generator_counts(self):
        ps = pds_of("so41_willmore")
        assert ps.h == 4 and ps.gamma_count == 4
        assert ps.s0 == 8

    def test_uncertified_refused(self):
        with pytest.raises(NotInvolutive):
            pds_of("so3_broken")
        ps = pds_of("so3_broken", force=True)
        assert ps.h == 0 and ps.gamma_count == 1

    def test_affine_offset_recorded(self):
        ps = P.build_pds(C.entry_so41_family(1, Fraction(2, 3), Fraction(1, 5)).lie_tableau)
        assert not ps.eta_offset.is_zero()

    def test_source_adapted_tableau_dim(self):
        ps = pds_of("so41_mobius")
        assert ps.source_adapted_tableau().dim == 5

    def test_json_keys(self):
        obj = pds_of("abelian_cr").to_json()
        assert obj["eta_count"] == 2 and obj["gamma_count"] == 0
        assert obj["structure_constants_adapted"] == []


class TestStructureTorsion:
    def test_abelian_vanishes(self):
        for name in ("abelian_cr", "full(2,2)", "zero"):
            assert P.structure_torsion(pds_of(name)).vanishes_identically

    def test_broken_constant(self):
        tp = P.structure_torsion(pds_of("so3_broken", force=True))
        assert dict(tp.coefficients) == {(0, (0, 1), ()): Fraction(-1)}

    def test_mobius_nonzero_but_absorbable(self):
        ps = pds_of("so41_mobius")
        tp = P.structure_torsion(ps)
        assert not tp.vanishes_identically
        assert P.torsion_class_polynomial(ps).vanishes_identically

    def test_degree_bound(self):
        for name in ("so41_mobius", "so41_willmore", "sl3_so3_cartan"):
            tp = P.structure_torsion(pds_of(name))
            assert all(sum(expo) <= 2 for (_a, _pr, expo) in tp.coefficients)

    def test_evaluate_wrong_length(self):
        tp = P.structure_torsion(pds_of("abelian_cr"))
        with pytest.raises(DimensionMismatch):
            tp.evaluate((1, 2, 3))

    @pytest.mark.parametrize("name", ["abelian_cr", "so41_mobius", "sl3_so3_cartan",
                                      "so41_family(1,2/3,1/5)"])
    def test_matches_family_torsion(self, name):
        # the structure-equation route and the bracket-of-lifted-frames route
        # compute the same object up to sign: c(p) = -tau(p) in adapted coords
        lt = C.get(name).lie_tableau
        ps = P.build_pds(lt)
        tp = P.structure_torsion(ps)
        for t in range(6):
            p = seeded_random_matrix(1, lt.m, derive_seed("pds-x", 7, t), 5).row(0)
            c_at = tp.evaluate(p)
            tau_at = tau_in_adapted_coords(lt, ps, p)
            keys = set(c_at) | set(tau_at)
            for key in keys:
                assert c_at.get(key, 0) == -tau_at.get(key, 0), (name, key)

    def test_monomial_cochains_shapes(self):
        tp = P.structure_torsion(pds_of("so41_mobius"))
        for expo, cochain in tp.monomial_cochains().items():
            assert (cochain.q, cochain.p) == (0, 2)
            assert cochain.s == 8


class TestTorsionClassPolynomial:
    @pytest.mark.parametrize("name", ["zero", "full(2,2)", "abelian_cr", "so41_mobius",
                                      "so41_willmore", "sl2_cartan", "sl3_so3_cartan"])
    def test_agrees_with_family_check(self, name):
        lt = C.get(name).lie_tableau
        rep = P.torsion_class_polynomial(P.build_pds(lt, force=True))
        assert rep.vanishes_identically == LT.check_condition2(lt).holds

    def test_broken_fails_at_constant(self):
        rep = P.torsion_class_polynomial(pds_of("so3_broken", force=True))
        assert not rep.vanishes_identically
        (expo, tc), = rep.failing_monomials
        assert expo == () and not tc.is_zero

    def test_random_families_agree(self):
        hits = 0
        for seed in range(12):
            lt = LT.random_lie_tableau(seed)
            rep = P.torsion_class_polynomial(P.build_pds(lt, force=True))
            holds = LT.check_condition2(lt).holds
            assert rep.vanishes_identically == holds, seed
            hits += holds
        assert 0 < hits  # the sample must exercise both branches to mean anything


class TestIntegralElements:
    def test_cr_dimension(self):
        ps = pds_of("abelian_cr")
        for p in ((0, 0), (1, 2), (Fraction(-1, 3), 5)):
            part, hom = P.integral_elements_at(ps, p)
            assert hom.dim == 2

    def test_broken_inconsistent(self):
        assert P.integral_elements_at(pds_of("so3_broken", force=True), ()) is None

    @pytest.mark.parametrize("name,expect", [("so41_willmore", 4), ("so41_mobius", 6)])
    def test_conformal_dims(self, name, expect):
        ps = pds_of(name)
        lt = C.get(name).lie_tableau
        assert lt.tableau.prolongation_dim(1) == expect
        for t in range(5):
            p = seeded_random_matrix(1, ps.m, derive_seed("ie", 3, t), 7).row(0)
            part, hom = P.integral_elements_at(ps, p)
            assert hom.dim == expect

    def test_solution_satisfies_equations(self):
        ps = pds_of("so41_willmore")
        sd = P._structure_data(ps)
        p = (1, -2, Fraction(1, 2), 3)
        part, hom = P.integral_elements_at(ps, p)
        cvals = sd.torsion.evaluate(p)
        k = ps.independence_rank
        for a in range(ps.s0):
            for i in range(k):
                for j in range(i + 1, k):
                    acc = cvals.get((a, (i, j)), Fraction(0))
                    for e in range(ps.m):
                        acc += sd.coeff_tensor[a][e][j] * part[e * k + i]
                        acc -= sd.coeff_tensor[a][e][i] * part[e * k + j]
                    assert acc == 0

    def test_wrong_length(self):
        with pytest.raises(DimensionMismatch):
            P.integral_elements_at(pds_of("abelian_cr"), (1,))


class TestVerifyInvolution:
    @pytest.mark.parametrize("name", ["zero", "full(2,2)", "abelian_cr", "so41_mobius",
                                      "so41_willmore", "sl2_cartan", "sl3_so3_cartan"])
    def test_certified_entries_pass(self, name):
        rep = P.verify_involution(pds_of(name), sample_points=8)
        assert rep.ok, rep

    def test_willmore_report_values(self):
        rep = P.verify_involution(pds_of("so41_willmore"), sample_points=10)
        assert rep.pds_characters == (4, 0)
        assert rep.source_characters == (4, 0)
        assert rep.s0 == 8

    def test_broken_fails_where_expected(self):
        rep = P.verify_involution(pds_of("so3_broken", force=True), sample_points=3)
        assert not rep.ok
        assert rep.linear and rep.tableau_matches and rep.characters_match
        assert not rep.torsion_class_zero and not rep.integral_points_ok

    def test_family_member(self):
        rep = P.verify_involution(
            P.build_pds(C.entry_so41_family(3, -1, 1).lie_tableau), sample_points=6)
        assert rep.ok and rep.pds_characters == (4, 0)


# frozen fixture: single generator, dim A = 1, dim A^(1) = 0, so the Cartan
# bound s_1 = 1 fails at level 0 while every H^(q,2) vanishes
TOWER_GEN = Matrix.from_rows([[-4, 5, -5], [-5, 3, -5], [-2, -2, 0]])


def two_acyclic_fixture():
    g = abelian(6)
    return LT.make_lie_tableau(g, [unit_vec(6, i) for i in range(3)],
                               [unit_vec(6, i) for i in range(3, 6)],
                               [TOWER_GEN], mode="two_acyclic")


class TestTower:
    def test_cr_configuration_dims(self):
        tw = P.prolongation_tower(C.get("abelian_cr").lie_tableau, h_max=2)
        assert [(L.h, L.space_dim, L.configuration_dim) for L in tw.levels] == \
            [(0, 2, 6), (1, 2, 8), (2, 2, 10)]
        assert tw.least_involutive == 0
        assert tw.levels[0].characters == (2, 0)

    def test_mobius_first_level(self):
        tw = P.prolongation_tower(C.get("so41_mobius").lie_tableau, h_max=1)
        assert tw.levels[0].configuration_dim == 15  # 10 + 5
        assert tw.levels[1].configuration_dim == 21  # + dim A^(1) = 6
        assert tw.least_involutive == 0

    def test_noninvolutive_two_acyclic(self):
        lt = two_acyclic_fixture()
        rep = LT.certify(lt)
        assert rep.ok and rep.two_acyclic.status == "certified"
        tw = P.prolongation_tower(lt, h_max=2)
        assert tw.least_involutive == 1
        assert not tw.levels[0].involutive and tw.levels[1].involutive
        assert [L.space_dim for L in tw.levels] == [1, 0, 0]
        assert [L.configuration_dim for L in tw.levels] == [7, 7, 7]

    def test_formula(self):
        lt = C.get("so41_willmore").lie_tableau
        tw = P.prolongation_tower(lt, h_max=2)
        acc = lt.split.g.dim
        for L in tw.levels:
            acc += L.space_dim
            assert L.configuration_dim == acc

    def test_uncertified_refused(self):
        with pytest.raises(NotInvolutive):
            P.prolongation_tower(C.get("so3_broken").lie_tableau, h_max=1)
        tw = P.prolongation_tower(C.get("so3_broken").lie_tableau, h_max=1, force=True)
        assert tw.least_involutive == 0  # the zero tableau is vacuously involutive


class TestGg0:
    def test_sl3_coefficients(self):
        sys = P.gg0_coefficients(C.get("sl3_so3_cartan").lie_tableau)
        assert sys.unknowns == 3 and sys.domain_dim == 2 and sys.target_dim == 6
        assert sys.pairs == ((0, 1),)
        assert dict(sys.first_order) == {
            (0, 0, 0): 2, (0, 0, 1): -1,
            (1, 1, 0): 1, (1, 1, 1): 1,
            (2, 2, 0): -1, (2, 2, 1): 2,
        }
        assert sys.first_order_bilinear == {}

    def test_sl3_identities_at_random_jets(self):
        lt = C.get("sl3_so3_cartan").lie_tableau
        sys = P.gg0_coefficients(lt)
        g = lt.split.g
        m_basis = lt.cartan.m.basis
        a_vecs = lt.split.a_vecs
        k, s, m = sys.domain_dim, sys.target_dim, sys.unknowns
        for t in range(10):
            J = seeded_random_matrix(m, k, derive_seed("gg0-jet", 5, t), 6)
            F0 = seeded_random_matrix(1, m, derive_seed("gg0-pt", 5, t), 6).row(0)
            dF = [tuple(sum(J.entry(al, i) * m_basis[al][w] for al in range(m))
                        for w in range(g.dim)) for i in range(k)]
            F_vec = tuple(sum(F0[al] * m_basis[al][w] for al in range(m))
                          for w in range(g.dim))
            for (i, j) in sys.pairs:
                direct = g.bracket(a_vecs[i], dF[j])
                direct = tuple(x - y for x, y in
                               zip(direct, g.bracket(a_vecs[j], dF[i])))
                lhs_b = lt.split.coords_b(direct)
                for a in range(s):
                    acc = Fraction(0)
                    for al in range(m):
                        acc += sys.first_order.get((a, al, i), Fraction(0)) * J.entry(al, j)
                        acc -= sys.first_order.get((a, al, j), Fraction(0)) * J.entry(al, i)
                    assert acc == lhs_b[a]
                rhs_vec = g.bracket(g.bracket(a_vecs[i], F_vec),
                                    g.bracket(a_vecs[j], F_vec))
                rhs_b = lt.split.coords_b(rhs_vec)
                for a in range(s):
                    acc = Fraction(0)
                    for (aa, pair, expo), cv in sys.quadratic_rhs.items():
                        if aa != a or pair != (i, j):
                            continue
                        term = cv
                        for x, e in zip(F0, expo):
                            term *= x ** e
                        acc += term
                    assert acc == rhs_b[a]

    def test_sl2_degenerate(self):
        sys = P.gg0_coefficients(C.get("sl2_cartan").lie_tableau)
        assert sys.pairs == () and dict(sys.quadratic_rhs) == {}
        assert sys.unknowns == 1

    def test_not_cartan(self):
        with pytest.raises(NotCartan):
            P.gg0_coefficients(C.get("abelian_cr").lie_tableau)

    def test_json(self):
        obj = P.gg0_coefficients(C.get("sl3_so3_cartan").lie_tableau).to_json()
        assert obj["pairs"] == [[0, 1]]
        assert all(len(row) == 4 for row in obj["first_order"])
        assert obj["first_order"][0] == [0, 0, 0, "2"]
        assert obj["first_order_bilinear"] == []
