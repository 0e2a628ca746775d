from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from critmaps.exactpoly import (NotDivisible, Poly, UsageError, divexact, divides, elem_sym,
                                evaluate_exact, linear_form, multiplicity, partial_derivative,
                                poly_ring, substitute_linear)
from critmaps.group import transposition_T
from critmaps.linalg import matmul
from critmaps.mapfamily import G_factor, build_map, jacobian
from critmaps.linalg import det_poly

from conftest import int_matrices, poly_triples, polys, rationals

u1, u2 = Poly.variables(2)


class TestRing:
    def test_additive_identity(self):
        assert poly_ring(u1 + u2, Poly.zero(2), "add") == u1 + u2

    def test_difference_of_squares(self):
        assert poly_ring(u1 - u2, u1 + u2, "mul") == u1**2 - u2**2

    def test_hand_expansion(self):
        got = poly_ring(u1 + u2, u1 * u2, "mul")
        assert got == Poly(2, {(2, 1): 1, (1, 2): 1})

    def test_sub(self):
        assert poly_ring(u1, u1, "sub").is_zero()

    def test_mismatched_nvars(self):
        with pytest.raises(UsageError):
            poly_ring(u1, Poly.var(3, 1), "add")

    def test_unknown_op(self):
        with pytest.raises(UsageError):
            poly_ring(u1, u2, "div")

    def test_zero_coefficients_dropped(self):
        p = Poly(2, {(1, 0): 0, (0, 1): Fraction(2, 4)})
        assert p.terms == {(0, 1): Fraction(1, 2)}

    def test_integral_fractions_become_ints(self):
        p = Poly(1, {(1,): Fraction(4, 2)})
        assert type(p.terms[(1,)]) is int

    def test_float_rejected(self):
        with pytest.raises(TypeError):
            Poly(1, {(1,): 0.5})

    def test_bad_exponent_length(self):
        with pytest.raises(UsageError):
            Poly(2, {(1,): 1})

    def test_compares_with_scalars(self):
        assert Poly.const(3, 5) == 5
        assert Poly.zero(2) == 0

    @given(poly_triples())
    def test_ring_axioms(self, abc):
        a, b, c = abc
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
        assert (a - a).is_zero()
        assert a * b == b * a

    @given(poly_triples())
    def test_hash_matches_equality(self, abc):
        a, b, _ = abc
        assert hash(a + b) == hash(b + a)


class TestText:
    def test_grlex_order(self):
        p = u1**4 * -1 + u1**3 * u2 * 2
        assert p.to_str() == "-1 * u1^4 + 2 * u1^3 * u2"
        assert (u1**2 + u2 + u1 * u2 * 3 + 1).to_str() == "1 * u1^2 + 3 * u1 * u2 + 1 * u2 + 1"

    def test_json_round_trip(self):
        p = u1**3 * Fraction(-2, 3) + u2 * 7 + 1
        assert Poly.from_json(2, p.to_json()) == p

    @given(polys())
    def test_json_round_trip_random(self, p):
        assert Poly.from_json(p.nvars, p.to_json()) == p

    def test_zero_text(self):
        assert Poly.zero(2).to_str() == "0"


class TestElemSym:
    def test_k0(self):
        assert elem_sym(3, 0) == 1

    def test_n3_k1(self):
        assert elem_sym(3, 1) == u1 + u2

    def test_n4_k2(self):
        a, b, c = Poly.variables(3)
        assert elem_sym(4, 2) == a * b + a * c + b * c

    @pytest.mark.parametrize("n", range(3, 8))
    def test_term_counts(self, n):
        for k in range(n):
            e = elem_sym(n, k)
            assert len(e) == comb(n - 1, k)
            assert set(e.terms.values()) == {1}

    @pytest.mark.parametrize("k", [-1, 3])
    def test_out_of_range(self, k):
        with pytest.raises(UsageError):
            elem_sym(3, k)

    @pytest.mark.parametrize("n", range(3, 8))
    def test_generating_identity(self, n):
        # prod (t + u_k) = sum_k e_k t^(n-1-k) with t as an extra variable
        d = n - 1
        t = Poly.var(d + 1, d + 1)
        lhs = Poly.const(d + 1, 1)
        for k in range(1, d + 1):
            lhs = lhs * (t + Poly.var(d + 1, k))
        rhs = Poly.zero(d + 1)
        for k in range(n):
            rhs = rhs + elem_sym(n, k).embed(d + 1, list(range(1, d + 1))) * t ** (d - k)
        assert lhs == rhs


class TestSubstitution:
    def test_S31_under_T(self):
        T = transposition_T(3).rows()
        assert substitute_linear(elem_sym(3, 1), T) == elem_sym(3, 1) - u1 * 3

    def test_S32_under_T(self):
        T = transposition_T(3).rows()
        want = elem_sym(3, 2) - u1 * elem_sym(3, 1) * 2 + u1**2 * 3
        assert substitute_linear(elem_sym(3, 2), T) == want

    @given(polys(nvars=3))
    def test_identity(self, p):
        assert substitute_linear(p, [[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == p

    @given(polys(nvars=3, max_deg=4, max_terms=4), int_matrices(3), int_matrices(3))
    def test_composition(self, p, M, N):
        # q(u) = p(M u), then q(N u) = p(M N u)
        assert substitute_linear(substitute_linear(p, M), N) == substitute_linear(p, matmul(M, N))

    def test_dimension_mismatch(self):
        with pytest.raises(UsageError):
            substitute_linear(u1, [[1]])


class TestDerivative:
    def test_power(self):
        assert partial_derivative(u1**3, 1) == u1**2 * 3

    def test_S42(self):
        a, b, c = Poly.variables(3)
        assert partial_derivative(elem_sym(4, 2), 1) == b + c

    def test_constant(self):
        assert partial_derivative(Poly.const(2, 7), 2).is_zero()

    @pytest.mark.parametrize("j", [0, 3])
    def test_index_range(self, j):
        with pytest.raises(UsageError):
            partial_derivative(u1, j)

    @given(poly_triples())
    def test_leibniz(self, abc):
        a, b, _ = abc
        assert (a * b).diff(1) == a.diff(1) * b + a * b.diff(1)


class TestDivexact:
    def test_simple(self):
        assert divexact(u1**2 * u2 - u1 * u2**2, u1 * u2) == u1 - u2

    def test_not_divisible(self):
        with pytest.raises(NotDivisible):
            divexact(u1**2 + u2**2, u1)

    def test_zero_divisor(self):
        with pytest.raises(ZeroDivisionError):
            divexact(u1, Poly.zero(2))

    def test_n3_determinant(self):
        m = build_map(3, scale=1)
        D = det_poly(jacobian(m))
        q = divexact(D, (u1 * u2 * (u1 - u2)) ** 2)
        assert q == Fraction(-2, 3)

    @given(polys(nvars=3, max_deg=4), polys(nvars=3, max_deg=3))
    def test_round_trip(self, p, q):
        if q.is_zero():
            return
        assert divexact(p * q, q) == p

    def test_divides_and_multiplicity(self):
        p = u1**3 * (u1 - u2) ** 2
        assert divides(u1 - u2, p)
        assert not divides(u2, p)
        assert multiplicity(p, u1) == 3
        assert multiplicity(p, u1 - u2) == 2


class TestEvaluate:
    def test_S42_at_p2(self):
        assert evaluate_exact(elem_sym(4, 2), [1, 1, 0]) == 1

    def test_S41_at_p1(self):
        assert evaluate_exact(elem_sym(4, 1), [1, 0, 0]) == 1

    def test_G1_n4_at_p1(self):
        assert evaluate_exact(G_factor(4), [1, 0, 0]) == Fraction(1, 10)

    def test_length_mismatch(self):
        with pytest.raises(UsageError):
            evaluate_exact(u1, [1])

    @given(poly_triples(), st.lists(rationals, min_size=5, max_size=5))
    def test_respects_products(self, abc, pt):
        a, b, _ = abc
        x = pt[: a.nvars]
        assert evaluate_exact(a * b, x) == evaluate_exact(a, x) * evaluate_exact(b, x)
        assert evaluate_exact(a + b, x) == evaluate_exact(a, x) + evaluate_exact(b, x)

    def test_linear_form(self):
        assert linear_form(3, {1: 1, 3: -1}) == Poly.var(3, 1) - Poly.var(3, 3)
