import itertools
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dickestark.algebra import (
    SERIES_THRESHOLD,
    SINE_RESIDUAL_THRESHOLD,
    Couplings,
    EnsembleSpec,
    c_factor,
    c_function,
    f_modulation,
    format_m,
    inversion,
    ladder_coefficient,
    ladder_coefficients,
    lowering,
    nonwiener_a0,
    nonwiener_a_minus,
    nonwiener_a_plus,
    nonwiener_as,
    operator_function,
    raising,
    stark_phases,
)
from dickestark.errors import DomainError

mp.mp.dps = 40


def _brute_force_g(n_atoms):
    """<r,m|R+R-|r,m> from symmetric Dicke vectors built in the 2^N product space."""
    dim = 2**n_atoms
    lower = np.zeros((dim, dim))
    for state in range(dim):
        for atom in range(n_atoms):
            if state >> atom & 1:
                lower[state ^ (1 << atom), state] = 1.0
    out = []
    for excitations in range(n_atoms + 1):
        vec = np.zeros(dim)
        for atoms in itertools.combinations(range(n_atoms), excitations):
            vec[sum(1 << a for a in atoms)] = 1.0
        vec /= np.linalg.norm(vec)
        out.append(float(np.linalg.norm(lower @ vec) ** 2))
    return np.array(out)


class TestEnsembleSpec:
    def test_even_and_odd(self):
        assert EnsembleSpec(8).r == 4 and EnsembleSpec(8).dim == 9
        spec = EnsembleSpec(3)
        assert spec.r == 1.5
        assert list(spec.m_values) == [-1.5, -0.5, 0.5, 1.5]
        assert spec.index_of(0.5) == 2

    @pytest.mark.parametrize("bad", [0, -1, 2.5, True, "4"])
    def test_rejects_bad_counts(self, bad):
        with pytest.raises(DomainError):
            EnsembleSpec(bad)

    def test_index_out_of_ladder(self):
        with pytest.raises(DomainError):
            EnsembleSpec(4).index_of(3)
        with pytest.raises(DomainError):
            EnsembleSpec(4).index_of(0.5)

    def test_labels(self):
        assert format_m(-1.5) == "-3/2"
        assert format_m(2.0) == "2"
        assert EnsembleSpec(1).label(0) == "-1/2"


class TestCouplings:
    def test_validation(self):
        with pytest.raises(DomainError):
            Couplings(-0.1)
        with pytest.raises(DomainError):
            Couplings(0.1, q=0)
        with pytest.raises(DomainError):
            Couplings(float("nan"))

    def test_validity_advisory_is_a_flag(self):
        assert Couplings(0.1, math.pi / 8, 0).outside_validity
        assert not Couplings(0.1, 1e-4, 0).outside_validity

    def test_field_scaling(self):
        c = Couplings(0.1, 0.2, 0.3).scaled(1.44)
        assert c.chi == pytest.approx(0.12, rel=1e-15)
        assert (c.eta_plus, c.eta_minus) == (0.2, 0.3)


class TestLadderCoefficient:
    def test_examples(self):
        spec = EnsembleSpec(8)
        assert ladder_coefficient(spec, 4) == 8
        assert ladder_coefficient(spec, -3) == 8
        assert ladder_coefficient(spec, 1) == 20

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 6, 8])
    def test_brute_force_matrix_elements(self, n):
        np.testing.assert_allclose(ladder_coefficients(EnsembleSpec(n)), _brute_force_g(n), atol=1e-12)

    def test_matches_operator_product(self):
        spec = EnsembleSpec(7)
        np.testing.assert_allclose(np.diag(raising(spec) @ lowering(spec)), ladder_coefficients(spec), atol=1e-12)

    def test_ground_level(self):
        spec = EnsembleSpec(4)
        with pytest.raises(DomainError):
            ladder_coefficient(spec, -2)
        assert ladder_coefficient(spec, -2, strict=False) == 0

    @given(st.integers(1, 400))
    def test_invariants(self, n):
        spec = EnsembleSpec(n)
        g = ladder_coefficients(spec)[1:]
        m = spec.m_values[1:]
        assert np.all(g >= 0)
        assert g[-1] == n and g[0] == n
        np.testing.assert_array_equal(g, g[::-1])
        assert abs(m[np.argmax(g)] - 0.5) <= 1.0


class TestOperators:
    def test_commutator(self):
        spec = EnsembleSpec(5)
        rp, rm, r3 = raising(spec), lowering(spec), inversion(spec)
        np.testing.assert_allclose(rp @ rm - rm @ rp, 2 * r3, atol=1e-12)

    def test_single_atom(self):
        np.testing.assert_array_equal(raising(EnsembleSpec(1)), [[0, 0], [1, 0]])


class TestScalarFunctions:
    def test_c_examples(self):
        spec = EnsembleSpec(8)
        oracle = float((1 - mp.cos(mp.pi / 2)) / (mp.pi / 2) ** 2)
        for m in spec.m_values:
            assert c_factor(spec, Couplings(0.1, math.pi / 8), m) == pytest.approx(oracle, abs=1e-15)
        assert c_factor(spec, Couplings(0.1), 0) == 0.5
        assert c_factor(spec, Couplings(0.1, math.pi / 2), 2) < 1e-30

    def test_f_examples(self):
        assert f_modulation(8, math.pi / 8) == pytest.approx(float(8 / mp.pi**2), abs=1e-15)
        assert f_modulation(8, 0.0) == 1.0
        assert f_modulation(32, math.pi / 8) < 1e-30

    def test_f_zero_by_scan(self):
        ns = np.arange(1, 101)
        f = np.array([f_modulation(int(n), math.pi / 8) for n in ns])
        assert list(ns[f < 1e-12]) == [32, 64, 96]

    def test_f_rejects_non_positive(self):
        with pytest.raises(DomainError):
            f_modulation(0, 0.1)

    def test_product_identity_at_1_3(self):
        x = mp.mpf("1.3")
        oracle = float(2 * (1 - mp.cos(x)) / x**2)
        assert complex(nonwiener_a_plus(1.3) * nonwiener_a_minus(1.3)).real == pytest.approx(oracle, abs=1e-15)
        assert nonwiener_a0(1.3) == pytest.approx(oracle, abs=1e-15)

    @pytest.mark.parametrize("x", [1e-9, 3e-5, 0.02, 0.7, 2.0, 6.0, 25.0])
    def test_against_high_precision(self, x):
        xm = mp.mpf(x)
        assert nonwiener_a0(x) == pytest.approx(float(2 * (1 - mp.cos(xm)) / xm**2), rel=1e-14)
        assert nonwiener_as(x) == pytest.approx(float(2 * (xm - mp.sin(xm)) / xm**2), rel=1e-13)
        ap = complex(nonwiener_a_plus(x))
        assert ap.real == pytest.approx(float((mp.cos(xm) - 1) / xm), rel=1e-13, abs=1e-300)
        assert ap.imag == pytest.approx(float(mp.sin(xm) / xm), rel=1e-14)

    def test_limits(self):
        assert nonwiener_a0(0.0) == 1.0
        assert nonwiener_as(0.0) == 0.0
        assert complex(nonwiener_a_plus(0.0)) == 1j
        assert complex(nonwiener_a_minus(0.0)) == -1j

    @pytest.mark.parametrize("fn", [c_function, nonwiener_a0, nonwiener_a_plus, nonwiener_a_minus])
    def test_branch_agreement_cosine_family(self, fn):
        below = np.nextafter(SERIES_THRESHOLD, 0)
        xm = mp.mpf(SERIES_THRESHOLD)
        assert abs(complex(fn(below)) - complex(fn(SERIES_THRESHOLD))) <= 1e-12
        if fn is c_function:
            assert float(fn(SERIES_THRESHOLD)) == pytest.approx(float((1 - mp.cos(xm)) / xm**2), rel=1e-15)

    def test_branch_agreement_sine_residual(self):
        for t in (SERIES_THRESHOLD, SINE_RESIDUAL_THRESHOLD):
            below = np.nextafter(t, 0)
            assert abs(nonwiener_as(below) - nonwiener_as(t)) <= 1e-12

    @given(st.floats(-1e3, 1e3, allow_nan=False))
    def test_c_bounds_and_parity(self, x):
        c = float(c_function(x))
        assert 0.0 <= c <= 0.5
        assert c == float(c_function(-x))

    @settings(max_examples=300)
    @given(st.integers(1, 10_000), st.floats(-math.pi, math.pi, allow_nan=False))
    def test_f_is_twice_c(self, n, delta):
        assert abs(f_modulation(n, delta) - 2 * float(c_function(n * delta / 2))) <= 1e-14

    def test_product_identity_random(self):
        x = np.random.default_rng(0).uniform(-20, 20, 1000)
        assert np.max(np.abs(nonwiener_a_plus(x) * nonwiener_a_minus(x) - nonwiener_a0(x))) <= 1e-12


class TestOperatorFunction:
    def test_wiener_limits(self):
        spec = EnsembleSpec(4)
        c = Couplings(0.1)
        np.testing.assert_array_equal(operator_function(spec, c, "a0"), np.eye(5))
        np.testing.assert_allclose(operator_function(spec, c, "a_plus"), 1j * np.eye(5), atol=0)

    def test_lambda_argument_is_stark_phase(self):
        spec = EnsembleSpec(3)
        c = Couplings(0.1, 0.3, -0.2)
        np.testing.assert_allclose(np.diag(operator_function(spec, c, "A_lambda_arg")), stark_phases(spec, c))

    def test_plus_sign_convention(self):
        spec = EnsembleSpec(4)
        x = stark_phases(spec, Couplings(0.1, 0.5, 0.2))
        np.testing.assert_allclose(x, 0.5 * 2 + 0.2 * spec.m_values)

    def test_unknown_selector(self):
        with pytest.raises(ValueError):
            operator_function(EnsembleSpec(2), Couplings(0.1), "a_zero")
