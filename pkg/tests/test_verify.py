from fractions import Fraction

import pytest

from critmaps import verify
from critmaps.exactpoly import Poly, UsageError
from critmaps.mapfamily import MapFamily, SubspaceSpec, build_map, restrict
from critmaps.verify import (G1_at_pm, check_critical_factorization, check_equivariance,
                             check_equivariance_words, check_first_row_vanish, check_g1pm,
                             check_g2_spec_sum, check_hyperplane_invariance,
                             check_holomorphy_certificates, check_jacobian_rank_pm, check_lemma_snk,
                             check_spec_sum, check_uniqueness, g1pm_closed, g1pm_sum,
                             g2_spec_sum_lhs, g2_spec_sum_rhs, mutate_coefficient, run_check,
                             snk_rhs, spec_sum_lhs, spec_sum_rhs)
from critmaps.group import transposition_T
from critmaps.exactpoly import elem_sym, substitute_linear

u1, u2 = Poly.variables(2)


class TestEquivariance:
    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_passes(self, n):
        assert check_equivariance(n).passed

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_random_words(self, n):
        rep = check_equivariance_words(n, count=20, seed=7)
        assert rep.passed

    @pytest.mark.parametrize("n", [3, 5])
    def test_mutation_fails(self, n):
        rep = check_equivariance(n, mutate_coefficient(build_map(n)))
        assert not rep.passed and rep.witness


class TestSnk:
    def test_base_case(self):
        T = transposition_T(3).rows()
        assert substitute_linear(elem_sym(3, 1), T) == snk_rhs(3, 1)

    def test_k0(self):
        assert snk_rhs(5, 0) == 1

    @pytest.mark.parametrize("n", range(3, 9))
    def test_all_k(self, n):
        assert check_lemma_snk(n).passed

    def test_wrong_rhs_fails(self, monkeypatch):
        monkeypatch.setattr(verify, "snk_rhs", lambda n, k, reverse=False: elem_sym(n, k) if k < n else Poly.zero(n - 1))
        assert not check_lemma_snk(4).passed


class TestSums:
    def test_spec_sum_small(self):
        assert spec_sum_lhs(0) == spec_sum_rhs(0) == Fraction(1, 6)
        assert spec_sum_lhs(1) == Fraction(1, 12)

    def test_spec_sum_range(self):
        assert check_spec_sum(50).passed

    def test_g2_m0(self):
        want = (u2 - u1) ** 3 * Fraction(1, 3)
        assert g2_spec_sum_lhs(0) == want == g2_spec_sum_rhs(0)

    def test_g2_range(self):
        assert check_g2_spec_sum(20).passed

    def test_g1pm_hand_values(self):
        assert g1pm_sum(4, 1) == g1pm_closed(4, 1) == Fraction(1, 10)
        assert g1pm_sum(4, 2) == g1pm_closed(4, 2) == Fraction(-1, 15)
        assert G1_at_pm(4, 1) == Fraction(1, 10)
        assert G1_at_pm(4, 2) == Fraction(-1, 15)

    @pytest.mark.parametrize("n", range(3, 11))
    def test_g1pm(self, n):
        assert check_g1pm(n).passed

    def test_negative_controls(self, monkeypatch):
        monkeypatch.setattr(verify, "spec_sum_rhs", lambda m: Fraction(m + 2, 1))
        assert not check_spec_sum(3).passed
        monkeypatch.setattr(verify, "g2_spec_sum_rhs", lambda m: u1 ** (m + 3))
        assert not check_g2_spec_sum(2).passed
        monkeypatch.setattr(verify, "g1pm_closed", lambda n, m: Fraction(1))
        assert not check_g1pm(4).passed

    def test_negative_range(self):
        with pytest.raises(UsageError):
            check_spec_sum(-1)


class TestCriticalSet:
    def test_n3_constant(self):
        rep = check_critical_factorization(3)
        assert rep.passed
        assert rep.details["constant"] == "-24"
        assert rep.details["constant_unscaled"] == "-2/3"

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_degree(self, n):
        rep = check_critical_factorization(n)
        assert rep.passed and rep.details["det_degree"] == (n - 1) * n

    def test_mutation_fails(self):
        assert not check_critical_factorization(4, mutate_coefficient(build_map(4))).passed

    def test_refuses_large_n(self):
        with pytest.raises(UsageError):
            check_critical_factorization(7)

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_hyperplane_invariance(self, n):
        assert check_hyperplane_invariance(n).passed

    def test_hyperplane_negative_control(self):
        m = build_map(4)
        bad = m.with_component(2, m.components[1] + Poly.var(3, 1) ** 5)
        assert not check_hyperplane_invariance(4, bad).passed


class TestHolomorphy:
    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_passes(self, n):
        assert check_holomorphy_certificates(n).passed

    def test_n5_subspace_det(self):
        from critmaps.linalg import det_poly
        from critmaps.mapfamily import jacobian
        r = restrict(build_map(5), SubspaceSpec.of(zeroed=[4], merged=[(2, 3)]))
        assert not det_poly(jacobian(r)).is_zero()

    def test_n4_value_at_p1(self):
        m = build_map(4)
        assert m([1, 0, 0]) == [m.scale * Fraction(1, 10), 0, 0]

    def test_vanishing_lift_fails(self):
        m = build_map(4)
        bad = MapFamily(4, tuple(c * (Poly.var(3, 1) - Poly.var(3, 2)) for c in m.components), m.scale)
        rep = check_holomorphy_certificates(4, bad)
        assert not rep.passed and "vanishes" in rep.witness

    @pytest.mark.parametrize("n", [3, 4, 5, 6, 8])
    def test_rank_pm(self, n):
        assert check_jacobian_rank_pm(n).passed

    def test_rank_mutation(self):
        m = build_map(4)
        bad = m.with_component(1, m.components[0] + Poly.var(3, 1) ** 3 * Poly.var(3, 2) * Poly.var(3, 3))
        assert not check_jacobian_rank_pm(4, bad).passed

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_first_row(self, n):
        assert check_first_row_vanish(n).passed

    def test_first_row_negative(self):
        m = build_map(4)
        a = Poly.var(3, 1)
        bad = m.with_component(1, a**2 * (m.components[0] / a**3))
        assert not check_first_row_vanish(4, bad).passed


class TestUniqueness:
    @pytest.mark.parametrize("n,unknowns", [(3, 2), (4, 4)])
    def test_unknown_counts(self, n, unknowns):
        rep = check_uniqueness(n)
        assert rep.passed and rep.details["unknowns"] == unknowns

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_unique_ray(self, n):
        rep = check_uniqueness(n)
        assert rep.passed
        assert rep.details["kernel_dim"] == 1
        assert Fraction(rep.details["alpha"]) != 0

    def test_wrong_target_fails(self, monkeypatch):
        monkeypatch.setattr(verify, "build_map", lambda n: mutate_coefficient(build_map(n)))
        assert not check_uniqueness(4).passed

    def test_refuses_large_n(self):
        with pytest.raises(UsageError):
            check_uniqueness(6)


def test_report_json_schema():
    rep = run_check("g1pm", 4)
    js = rep.to_json()
    assert set(js) <= {"check", "n", "verdict", "witness", "details", "elapsed_ms"}
    assert js["check"] == "g1pm" and js["verdict"] == "pass"


def test_unknown_check():
    with pytest.raises(UsageError):
        run_check("nope", 4)
