"""Scalar backends and the two evaluation kernels."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mpf, workprec

from solvmaps.numerics import (
    BackendMismatchError,
    DigitBudgetExceededError,
    ExactScalar,
    FloatScalar,
    digit_budget,
    exact,
    floating,
    geometric_sum,
    get_digit_budget,
    parse_scalar,
    pow_tower,
)

from support import exact_scalars, nonzero_exact_scalars


class TestExactArithmetic:
    def test_field_operations_are_exact(self):
        a = exact(Fraction(1, 3), Fraction(2, 7))
        b = exact(Fraction(-5, 2), Fraction(1, 6))
        assert (a + b) - b == a
        assert (a * b) / b == a
        assert a + (-a) == exact(0)

    def test_complex_multiplication(self):
        # (1+2i)(3+4i) = 3+4i+6i-8 = -5+10i
        assert exact(1, 2) * exact(3, 4) == exact(-5, 10)

    def test_division_by_zero_rejected(self):
        with pytest.raises(ZeroDivisionError):
            exact(1) / exact(0)

    def test_integer_powers(self):
        a = exact(Fraction(2, 3), 1)
        assert a ** 0 == exact(1)
        assert a ** 1 == a
        assert a ** 5 == a * a * a * a * a
        assert a ** -2 == exact(1) / (a * a)

    def test_zero_to_the_zero_is_one(self):
        assert exact(0) ** 0 == exact(1)

    def test_negative_power_of_zero_rejected(self):
        with pytest.raises(ZeroDivisionError):
            exact(0) ** -1

    def test_int_coercion(self):
        assert exact(Fraction(1, 2)) * 2 == exact(1)
        assert 1 + exact(Fraction(1, 2)) == exact(Fraction(3, 2))
        assert exact(3) / 2 == exact(Fraction(3, 2))

    def test_immutable(self):
        a = exact(1)
        with pytest.raises(AttributeError):
            a.re = Fraction(2)

    @given(exact_scalars, exact_scalars, exact_scalars)
    def test_ring_axioms(self, a, b, c):
        assert a * (b + c) == a * b + a * c
        assert (a * b) * c == a * (b * c)
        assert a + b == b + a

    @given(nonzero_exact_scalars)
    def test_multiplicative_inverse(self, a):
        assert a * (exact(1) / a) == exact(1)


class TestBackendMixing:
    def test_exact_plus_float_rejected(self):
        with pytest.raises(BackendMismatchError):
            exact(1) + floating(1)

    def test_float_times_exact_rejected(self):
        with pytest.raises(BackendMismatchError):
            floating(1) * exact(1)

    def test_conversion_is_explicit_and_total(self):
        huge = exact(Fraction(3 ** 5000, 7 ** 4000))
        f = huge.to_float(53)
        assert f.backend == "float"
        assert f.prec == 53

    def test_no_float_to_exact_conversion(self):
        assert not hasattr(FloatScalar, "to_exact")

    def test_mixed_backend_equality_is_false(self):
        assert not (exact(1) == floating(1))


class TestFloatBackend:
    def test_precision_of_results_is_min_of_operands(self):
        a = floating(1, prec=100)
        b = floating(2, prec=60)
        assert (a * b).prec == 60

    def test_high_precision_actually_used(self):
        from mpmath import sqrt as mp_sqrt

        a = floating(2, prec=200)
        with workprec(200):
            root = FloatScalar(mp_sqrt(a.value), 200)
        # 53-bit arithmetic could not reproduce 2 to 50 significant digits.
        err = abs((root * root - a).value)
        assert err < mpf(10) ** -55

    def test_division_by_zero_rejected(self):
        with pytest.raises(ZeroDivisionError):
            floating(1) / floating(0)

    def test_float_coercion(self):
        assert floating(1) + 0.5 == floating(1.5)


class TestSerialization:
    def test_exact_canonical_form(self):
        assert str(exact(Fraction(3, 4), Fraction(-2, 5))) == "3/4-2/5i"
        assert str(exact(2)) == "2/1+0/1i"
        assert str(exact(0, Fraction(1, 3))) == "0/1+1/3i"

    def test_exact_lowest_terms_sign_on_numerator(self):
        s = exact(Fraction(4, -8), Fraction(6, 4))
        assert str(s) == "-1/2+3/2i"

    @given(exact_scalars)
    def test_exact_round_trip(self, s):
        assert parse_scalar(str(s), "exact") == s

    def test_relaxed_exact_parsing(self):
        assert parse_scalar("3", "exact") == exact(3)
        assert parse_scalar("-3/4", "exact") == exact(Fraction(-3, 4))
        assert parse_scalar("0.25", "exact") == exact(Fraction(1, 4))
        assert parse_scalar("2e3", "exact") == exact(2000)
        assert parse_scalar("5/2i", "exact") == exact(0, Fraction(5, 2))
        assert parse_scalar("-2i", "exact") == exact(0, -2)
        assert parse_scalar("1+2i", "exact") == exact(1, 2)
        assert parse_scalar("1.5e-1-1/3i", "exact") == exact(Fraction(3, 20), Fraction(-1, 3))

    def test_parse_rejects_garbage(self):
        for bad in ("", "i+1", "1+2", "1,2i", "2j", "1//2"):
            with pytest.raises(ValueError):
                parse_scalar(bad, "exact")

    def test_float_round_trip(self):
        for prec in (53, 113, 200):
            s = floating(Fraction(1, 3), Fraction(-2, 7), prec=prec)
            again = parse_scalar(str(s), "float", prec)
            assert again == s

    def test_float_parse_accepts_exact_form(self):
        s = parse_scalar("1/2+3/4i", "float", 53)
        assert s == floating(0.5, 0.75)

    def test_unknown_backend(self):
        with pytest.raises(ValueError):
            parse_scalar("1", "decimal")


class TestDigitBudget:
    def test_budget_trips_with_clean_error(self):
        with digit_budget(100):
            with pytest.raises(DigitBudgetExceededError):
                pow_tower(exact(10), 9)  # 10**512 has 513 digits

    def test_budget_restored_after_context(self):
        before = get_digit_budget()
        with digit_budget(100):
            assert get_digit_budget() == 100
        assert get_digit_budget() == before

    def test_within_budget_untouched(self):
        with digit_budget(1000):
            assert pow_tower(exact(10), 3) == exact(10 ** 8)

    def test_float_backend_has_no_budget(self):
        with digit_budget(50):
            result = pow_tower(floating(10), 12)
        assert abs(result) > 0


class TestPowTower:
    def test_identity_base(self):
        assert pow_tower(exact(1), 17) == exact(1)

    def test_zero_height_returns_base(self):
        x = exact(Fraction(5, 7), 3)
        assert pow_tower(x, 0) == x

    def test_small_tower_against_repeated_multiplication(self):
        # oracle: 2**(2**3) by 8 explicit multiplications
        expected = exact(1)
        for _ in range(8):
            expected = expected * exact(2)
        assert expected == exact(256)
        assert pow_tower(exact(2), 3) == exact(256)

    def test_negative_height_rejected(self):
        with pytest.raises(ValueError):
            pow_tower(exact(2), -1)

    @given(exact_scalars, st.integers(0, 6))
    @settings(max_examples=60)
    def test_matches_naive_product(self, b, ell):
        naive = exact(1)
        for _ in range(2 ** ell):
            naive = naive * b
        assert pow_tower(b, ell) == naive


class TestGeometricSum:
    def test_ratio_one_degenerate(self):
        assert geometric_sum(exact(1), 5) == exact(5)

    def test_empty_sum(self):
        r = exact(Fraction(9, 2), -1)
        assert geometric_sum(r, 0) == exact(0)

    def test_small_sum_against_term_by_term(self):
        # oracle: 1 + 2 + 4
        assert exact(1) + exact(2) + exact(4) == exact(7)
        assert geometric_sum(exact(2), 3) == exact(7)

    @given(nonzero_exact_scalars, st.integers(0, 30))
    @settings(max_examples=60)
    def test_closed_form_identity(self, r, ell):
        if r == exact(1):
            r = r + 1
        assert geometric_sum(r, ell) * (r - 1) + 1 == r ** ell

    @given(exact_scalars, st.integers(0, 30))
    @settings(max_examples=60)
    def test_recurrence_including_ratio_one(self, r, ell):
        assert geometric_sum(r, ell + 1) == geometric_sum(r, ell) * r + 1

    def test_recurrence_at_exact_ratio_one(self):
        one = exact(1)
        for ell in range(6):
            assert geometric_sum(one, ell + 1) == geometric_sum(one, ell) * one + 1

    def test_float_ratio_one_window(self):
        # within 8 ulps of 1: treated as the degenerate limit
        r = FloatScalar(1 + mpf(2) ** -51, 53)
        assert geometric_sum(r, 7) == floating(7)
        # clearly away from 1: the ratio form
        r2 = floating(2)
        assert geometric_sum(r2, 3) == floating(7)


class TestFloatAgreesWithExact:
    @given(exact_scalars, st.integers(0, 6))
    @settings(max_examples=40)
    def test_pow_tower_relative_error(self, b, ell):
        exact_result = pow_tower(b, ell)
        reference = exact_result.to_float(53)
        if abs(reference) > 1e10:
            return
        float_result = pow_tower(b.to_float(53), ell)
        _assert_rel_error_below(float_result, reference, 1e-12)

    @given(exact_scalars, st.integers(0, 30))
    @settings(max_examples=40)
    def test_geometric_sum_relative_error(self, r, ell):
        exact_result = geometric_sum(r, ell)
        reference = exact_result.to_float(53)
        if abs(reference) > 1e10:
            return
        float_result = geometric_sum(r.to_float(53), ell)
        _assert_rel_error_below(float_result, reference, 1e-12)


def _assert_rel_error_below(value, reference, bound):
    with workprec(120):
        if reference.value == 0:
            assert abs(value.value) <= bound
        else:
            assert abs((value.value - reference.value) / reference.value) <= bound
