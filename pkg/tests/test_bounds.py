import math
from fractions import Fraction
from math import comb

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from exlab import bounds
from exlab.bounds import BoundNotApplicable
from exlab.protocols import pjo_state_table, excluded_probabilities


def sympy_a_k(n, m, k):
    # independent route: sin/cos of the angle itself instead of tan(theta/2)
    th = 2 * sympy.atan(sympy.Integer(2) ** sympy.Rational(1, m) - 1)
    c, s = sympy.cos(th / 2) ** 2, sympy.sin(th / 2) ** 2
    return sympy.N(sum(comb(n, i) * c ** (n - i) * s**i for i in range(k + 1)), 40)


class TestAk:
    def test_full_sum_is_one(self):
        for n, m in [(5, 2), (9, 4), (12, 1)]:
            assert float(bounds.a_k(n, m, n)) == pytest.approx(1, abs=1e-40)

    def test_k0(self):
        c2, _ = bounds.half_angle_squares(3)
        assert bounds.a_k(6, 3, 0) == pytest.approx(c2**6)

    @pytest.mark.parametrize("n,m,k", [(4, 2, 2), (10, 3, 4), (16, 8, 4)])
    def test_against_sympy(self, n, m, k):
        with mpmath.workdps(50):
            assert abs(bounds.a_k(n, m, k) - mpmath.mpf(str(sympy_a_k(n, m, k)))) < mpmath.mpf(10) ** -35

    def test_n4_m2_k2_with_pi_over_8(self):
        with mpmath.workdps(50):
            c, s = mpmath.cos(mpmath.pi / 8) ** 2, mpmath.sin(mpmath.pi / 8) ** 2
            want = sum(comb(4, i) * c ** (4 - i) * s**i for i in range(3))
            assert abs(bounds.a_k(4, 2, 2) - want) < mpmath.mpf(10) ** -45

    def test_bad_k(self):
        with pytest.raises(ValueError):
            bounds.a_k(4, 2, 5)


class TestCompressionError:
    def test_k_equals_n(self):
        assert bounds.compression_error_bound(7, 3, 7) == 0
        assert bounds.compression_error_exact(7, 3, 7) == 0

    def test_decreasing_in_k(self):
        vals = [bounds.compression_error_bound(10, 4, k) for k in range(11)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("n,m", [(5, 2), (7, 3), (8, 8), (6, 1)])
    def test_exact_against_simulation(self, n, m):
        y = tuple(range(2, m + 2)) if m + 1 <= n else tuple(range(1, m + 1))
        for k in range(n + 1):
            sim = excluded_probabilities(pjo_state_table(n, m, k), y, m)
            assert np.allclose(sim, float(bounds.compression_error_exact(n, m, k)), atol=1e-12)
            assert sim.max() <= bounds.compression_error_bound(n, m, k) + 1e-12


class TestTailBound:
    def test_holds(self):
        assert bounds.compression_tail(16, 8, 4) < bounds.analytic_tail_bound(16, 8, 4)

    def test_vacuous(self):
        with pytest.raises(BoundNotApplicable) as info:
            bounds.analytic_tail_bound(16, 2, 1)
        assert info.value.value > 1

    def test_precondition(self):
        with pytest.raises(ValueError):
            bounds.analytic_tail_bound(16, 1, 3)
        with pytest.raises(ValueError):
            bounds.analytic_tail_bound(16, 3, 0)

    def test_eta_choice_beats_rectangle_threshold(self):
        n = 10**8
        m = round(n**0.6)
        k = bounds.tail_bound_k(m, 0.2)
        bound = bounds.analytic_tail_bound(n, m, k)
        with mpmath.workdps(30):
            assert mpmath.log(bound) < -2 * m * mpmath.log(n + 1)

    def test_tail_k(self):
        assert bounds.tail_bound_k(4, 0.5) == 8


class TestCompressedQubits:
    def test_examples(self):
        assert bounds.compressed_qubits(9, 9) == (9.0, 9)
        assert bounds.compressed_qubits(9, 0) == (0.0, 0)
        size = bounds.compressed_qubits(16, 4)
        assert size.log2 == pytest.approx(math.log2(2517), abs=1e-12)
        assert size.log2 == pytest.approx(11.297, abs=1e-3)
        assert size.qubits == 12


class TestMajority:
    def test_formula_values(self):
        assert bounds.majority_error_formula(4, 2) == Fraction(1, 8)
        assert bounds.majority_error_formula(4, 3) == 0

    @pytest.mark.parametrize("n", [1, 3, 5, 7, 9, 11])
    def test_odd_n_agree(self, n):
        for m in range(1, n // 2 + 1):
            res = bounds.majority_error_exact(n, m)
            assert res.formula == res.enumerated
            assert res.discrepancy == 0

    def test_even_n_enumeration(self):
        # tie strings are counted once by enumeration; see the ledger for the formula's value
        assert bounds.majority_error_enumerated(4, 2) == Fraction(1, 16)

    def test_large_n(self):
        res = bounds.majority_error_exact(100, 10)
        assert res.enumerated is None
        assert res.formula < Fraction(1, 2**11)


class TestInformation:
    def test_ic_bound(self):
        assert bounds.classical_ic_lower_bound(9, 1) == 9
        assert bounds.classical_ic_lower_bound(4, 2) == pytest.approx(4 - math.log2(5))
        assert bounds.classical_ic_lower_bound(4, 2) == pytest.approx(1.678, abs=1e-3)

    def test_info_cost_m1(self):
        assert bounds.pjo_info_cost_bound(7, 1) == pytest.approx(14)

    def test_info_cost_decreasing_in_m(self):
        vals = [bounds.pjo_info_cost_bound(30, m) for m in range(1, 31)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_binary_entropy(self):
        assert bounds.binary_entropy(0.5) == 1
        assert bounds.binary_entropy(0) == 0
        assert bounds.binary_entropy(0.11) == pytest.approx(0.4999162, abs=1e-6)


class TestRectangle:
    def test_examples(self):
        assert bounds.rectangle_construction_error(4, 2) == (Fraction(1, 11), Fraction(1, 11))
        assert bounds.rectangle_construction_error(6, 6).formula == Fraction(1, 64)

    def test_threshold(self):
        for n in range(1, 20):
            for m in range(n + 1):
                res = bounds.rectangle_construction_error(n, m, enumerate_cap=0)
                assert res.formula >= bounds.rectangle_threshold(n, m)


class TestPerturbation:
    def test_values(self):
        assert bounds.perturbation_bounds(4, 2**-10) == (20 / 1024, 40 / 1024)

    def test_boundary(self):
        with pytest.raises(ValueError):
            bounds.perturbation_bounds(4, 0.059)
        bounds.perturbation_bounds(4, 0.0589)


class TestHoeffding:
    def test_example(self):
        assert bounds.hoeffding_repetitions(0.5, math.exp(-2)) == 4

    def test_halving_tau(self):
        for gap in (0.05, 0.2, 0.5):
            for tau in (0.3, 0.01, 1e-6):
                grow = bounds.hoeffding_repetitions(gap, tau / 2) - bounds.hoeffding_repetitions(gap, tau)
                assert 0 <= grow <= math.ceil(math.log(2) / (2 * gap**2))

    @pytest.mark.parametrize("gap,tau", [(0, 0.1), (0.1, 0), (0.1, 1), (1.5, 0.1)])
    def test_invalid(self, gap, tau):
        with pytest.raises(ValueError):
            bounds.hoeffding_repetitions(gap, tau)


class TestMessageBits:
    def test_examples(self):
        assert bounds.classical_message_bits(2, 2**-3) == 32
        assert bounds.classical_message_bits(5, 2**-8) - bounds.classical_message_bits(5, 2**-7) == 2**6


class TestEvaluate:
    def test_not_applicable_reported(self):
        (rep,) = bounds.evaluate("analytic_tail_bound", 16, 2, 1)
        assert not rep.applicable and rep.value > 1

    def test_needs_k(self):
        with pytest.raises(ValueError):
            bounds.evaluate("a_k", 4, 2)

    def test_unknown(self):
        with pytest.raises(ValueError):
            bounds.evaluate("nope", 4, 2)

    @pytest.mark.parametrize("name", [f for f in bounds.FORMULAS if f not in ("perturbation_bounds", "hoeffding_repetitions")])
    def test_all_formulas(self, name):
        reports = bounds.evaluate(name, 8, 3, 2)
        assert reports and all(math.isfinite(r.value) for r in reports)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 40).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n), st.integers(0, n))))
def test_tail_plus_ak_is_one(args):
    n, m, k = args
    assert abs(bounds.a_k(n, m, k) + bounds.compression_tail(n, m, k) - 1) < 1e-40
