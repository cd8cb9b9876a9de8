import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fourterm.polycore import ONE, ZERO, Z, Poly
from fourterm.rootfind import RootConfig, find_roots, initial_guesses, polish_root, scaled_residuals
from fourterm.tablegen import WORKED_EXAMPLE, build_H_table, build_table


def sorted_roots(z):
    return np.array(sorted(np.asarray(z), key=lambda w: (round(w.real, 8), w.imag)))


class TestFindRoots:
    def test_real_quadratic(self):
        rs = find_roots(Poly([6, -6, 1]))
        np.testing.assert_allclose(np.sort(rs.roots.real), [3 - math.sqrt(3), 3 + math.sqrt(3)], rtol=1e-14)
        assert np.abs(rs.roots.imag).max() < 1e-14

    def test_linear(self):
        rs = find_roots(Poly([-2, 1]))
        assert rs.roots.size == 1
        assert abs(rs.roots[0] - 2) < 1e-15

    def test_worked_example_p11(self):
        rs = find_roots(Poly([4, -5, 2]))
        expected = np.array([(5 - 1j * math.sqrt(7)) / 4, (5 + 1j * math.sqrt(7)) / 4])
        np.testing.assert_allclose(sorted_roots(rs.roots), expected, atol=1e-14)
        np.testing.assert_allclose(np.abs(rs.roots) ** 2, 2, rtol=1e-14)

    def test_zero_polynomial_rejected(self):
        with pytest.raises(ValueError):
            find_roots(ZERO)

    def test_constant_has_no_roots(self):
        rs = find_roots(Poly([3]))
        assert len(rs) == 0 and rs.all_converged

    def test_zero_roots_split_off(self):
        p = Poly([0, 0, 0, -1, 1])  # z^3 (z - 1)
        rs = find_roots(p)
        assert len(rs) == 4
        assert np.count_nonzero(rs.roots == 0) == 3
        assert rs.all_converged

    def test_pure_monomial(self):
        rs = find_roots(Z**5)
        assert np.all(rs.roots == 0) and len(rs) == 5

    def test_deterministic(self):
        p = Poly(np.arange(1, 12, dtype=float))
        a = find_roots(p, RootConfig(seed=7))
        b = find_roots(p, RootConfig(seed=7))
        np.testing.assert_array_equal(a.roots, b.roots)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            RootConfig(tol=0)
        with pytest.raises(ValueError):
            RootConfig(max_iters=0)

    def test_known_roots_of_unity(self):
        p = Z**12 - ONE
        rs = find_roots(p)
        assert rs.all_converged
        np.testing.assert_allclose(np.abs(rs.roots), 1, atol=1e-13)
        np.testing.assert_allclose(rs.roots**12, 1, atol=1e-12)

    @given(st.lists(st.builds(complex, st.floats(-3, 3), st.floats(-3, 3)), min_size=1, max_size=10))
    def test_count_and_residuals(self, roots):
        p = Poly.from_roots(roots)
        rs = find_roots(p)
        assert len(rs) == p.degree
        assert rs.converged.dtype == bool
        # converged means the certificate holds
        assert np.all(rs.residuals[rs.converged] <= 1e-10)

    @given(st.lists(st.floats(-5, 5), min_size=1, max_size=8, unique=True))
    def test_recovers_well_separated_roots(self, xs):
        xs = np.array(xs)
        if xs.size > 1 and np.min(np.diff(np.sort(xs))) < 0.1:
            return
        rs = find_roots(Poly.from_roots(xs))
        np.testing.assert_allclose(np.sort(rs.roots.real), np.sort(xs), atol=1e-8)

    def test_table_entry_with_recurrence_evaluator(self):
        T = build_table(WORKED_EXAMPLE, 50, 30)
        rs = find_roots(T[50, 30], evaluator=T.evaluator(50, 30))
        assert len(rs) == T[50, 30].degree
        assert rs.all_converged

    def test_far_field_uses_coefficients(self):
        # the leading coefficient is ~1e-73 of the largest; the recurrence alone
        # strands a few iterates far outside the curve
        from fourterm.locus import LocusFunction, Membership, on_curve
        T = build_table(WORKED_EXAMPLE, 150, 100)
        rs = find_roots(T[150, 100], evaluator=T.evaluator(150, 100))
        assert rs.all_converged
        lf = LocusFunction(WORKED_EXAMPLE)
        assert all(on_curve(lf, z, 1e-6) is Membership.ON for z in rs.roots)

    def test_large_diagonal_entry_is_real(self):
        H = build_H_table(60, 60)
        rs = find_roots(H[60, 60], evaluator=H.evaluator(60, 60))
        assert rs.all_converged
        assert np.max(np.abs(rs.roots.imag)) < 1e-9


class TestInitialGuesses:
    def test_radii_follow_coefficient_scales(self):
        # roots near 1e-3 and 1e3
        p = Poly.from_roots([1e-3, 2e-3, 1e3, 2e3])
        z0 = initial_guesses(p.coeffs)
        r = np.sort(np.abs(z0))
        assert r[1] < 1e-1 and r[2] > 1e1

    def test_count(self):
        z0 = initial_guesses(np.array([1, 0, 0, 2, 1], dtype=complex))
        assert z0.size == 4


class TestResiduals:
    def test_exact_root_zero_residual(self):
        assert scaled_residuals(Poly([-2, 1]), np.array([2.0]))[0] == 0

    def test_componentwise(self):
        # far from the zeros the backward error is of order one
        p = Poly([1e-10, 1.0, 1e10])
        assert scaled_residuals(p, np.array([1e6]))[0] > 0.5

    def test_large_argument_no_overflow(self):
        r = scaled_residuals(Poly(np.ones(200)), np.array([1e6]))
        assert np.isfinite(r[0])


class TestPolish:
    def test_newton_sqrt2(self):
        assert abs(polish_root(Poly([-2, 0, 1]), 1.4) - math.sqrt(2)) < 1e-14

    def test_triple_root(self):
        p = Poly([-1, 3, -3, 1])
        assert abs(polish_root(p, 1.1) - 1) < 1e-4

    def test_fixed_point(self):
        assert abs(polish_root(Poly([-2, 1]), 2.0) - 2.0) < 1e-15
