import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from exlab import bounds
from exlab.encoding import encoded_length, quantize_amplitudes
from exlab.game import all_strings, all_subsets, restrict
from exlab.linalg import basis_state, born_probability, partial_trace
from exlab.protocols import (
    AccuracyViolation,
    AmplifiedSimulation,
    ClassicalSimulation,
    CompressedPJOStrategy,
    MajorityStrategy,
    Message,
    PJOStrategy,
    RandomGuessStrategy,
    accuracy_for_error,
    accuracy_for_zero_error,
    bits_to_int,
    build_strategy,
    classical_sim_decode,
    compressed_pjo_state,
    dyadic_floor,
    excluded_probabilities,
    int_to_bits,
    majority_decode,
    majority_encode,
    pjo_measure,
    pjo_state,
    pjo_state_table,
    plurality,
    plurality_error_probability,
    resample_amplify,
    theta,
    threshold_answer,
    zeta,
)

S2 = 1 / math.sqrt(2)


class TestTheta:
    def test_m1(self):
        assert theta(1) == pytest.approx(math.pi / 2, abs=1e-15)

    def test_m2(self):
        assert theta(2) == pytest.approx(math.pi / 4, abs=1e-15)

    @pytest.mark.parametrize("m", [3, 4, 7, 20])
    def test_high_precision(self, m):
        with mpmath.workdps(40):
            want = 2 * mpmath.atan(mpmath.mpf(2) ** (mpmath.mpf(1) / m) - 1)
        assert theta(m) == pytest.approx(float(want), abs=1e-15)

    def test_m4_value(self):
        assert theta(4) == pytest.approx(0.3739931524730452, abs=1e-15)

    def test_invalid(self):
        with pytest.raises(ValueError):
            theta(0)


class TestStates:
    def test_single_qubit(self):
        assert np.allclose(pjo_state("0", 1), [S2, S2])
        assert np.allclose(pjo_state("1", 1), [S2, -S2])

    def test_m1_flat_magnitudes(self):
        for x in ("0110", "111"):
            assert np.allclose(np.abs(pjo_state(x, 1)), 2 ** (-len(x) / 2))

    def test_compressed_extremes(self):
        x = "10110"
        assert np.allclose(compressed_pjo_state(x, 3, 5), pjo_state(x, 3))
        assert np.allclose(compressed_pjo_state(x, 3, 0), basis_state(0, 5))

    def test_compressed_support(self):
        psi = compressed_pjo_state("1101", 2, 1)
        support = np.flatnonzero(np.abs(psi) > 0)
        assert all(bin(i).count("1") <= 1 for i in support)
        assert np.linalg.norm(psi) == pytest.approx(1)

    def test_table_rows(self):
        table = pjo_state_table(4, 2, 2)
        for x in ("0000", "1011"):
            assert np.allclose(table[int(x, 2)], compressed_pjo_state(x, 2, 2))


class TestZeta:
    def test_m1(self):
        assert np.allclose(zeta("0"), [S2, -S2])
        assert np.allclose(zeta("1"), [S2, S2])

    def test_orthonormal_and_excludes(self):
        m = 3
        rows = np.array([zeta(int_to_bits(z, m)) for z in range(8)])
        assert np.allclose(rows @ rows.T, np.eye(8))
        for z in range(8):
            x = int_to_bits(z, m)
            assert abs(np.dot(rows[z], pjo_state(x, m))) < 1e-12


class TestMeasure:
    def test_excluded_outcome_has_zero_probability(self):
        for x in all_strings(5):
            for y in all_subsets(5, 3):
                assert pjo_measure(pjo_state(x, 3), y, 3)[bits_to_int(restrict(x, y))] <= 1e-10

    def test_distribution_sums_to_one(self):
        p = pjo_measure(pjo_state("110100", 2), (2, 5), 2)
        assert p.sum() == pytest.approx(1)
        assert np.all(p >= 0)

    def test_basis_state(self):
        assert np.allclose(pjo_measure(basis_state(0, 1), (1,), 1), [0.5, 0.5])

    def test_matches_partial_trace(self):
        psi = pjo_state("1001", 2)
        rho = partial_trace(psi, (1, 3))
        want = [born_probability(rho, zeta(int_to_bits(z, 2))) for z in range(4)]
        assert np.allclose(pjo_measure(psi, (1, 3), 2), want)

    def test_wrong_m(self):
        with pytest.raises(ValueError):
            pjo_measure(pjo_state("1001", 2), (1, 3), 3)

    def test_batched(self):
        n, m, y = 5, 2, (2, 4)
        states = pjo_state_table(n, m, 1)
        batched = excluded_probabilities(states, y, m)
        for x in ("00000", "01010", "11111"):
            want = pjo_measure(compressed_pjo_state(x, m, 1), y, m)[bits_to_int(restrict(x, y))]
            assert batched[int(x, 2)] == pytest.approx(want, abs=1e-15)


class TestAccuracy:
    def test_examples(self):
        assert accuracy_for_zero_error(2, 2) == 2**-9
        assert accuracy_for_zero_error(1, 1) == 2**-7

    def test_monotone(self):
        vals = [accuracy_for_zero_error(1, s) for s in range(1, 12)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_below_target(self):
        for m in range(1, 6):
            for q in range(1, 10):
                eps = accuracy_for_zero_error(m, q)
                assert eps <= 2.0 ** -(m + q) / 20 < 2 * eps

    def test_with_gamma(self):
        assert accuracy_for_error(2, 3, 0) == accuracy_for_zero_error(2, 3)
        assert accuracy_for_error(2, 3, Fraction(1, 8)) == 2.0**-dyadic_floor(Fraction(1, 8 * 160))
        with pytest.raises(ValueError):
            accuracy_for_error(2, 3, Fraction(1, 4))


class TestClassicalSimulation:
    def test_never_loses(self):
        n, m = 5, 2
        eps = accuracy_for_zero_error(m, n)
        for x in all_strings(n):
            enc = quantize_amplitudes(pjo_state(x, m), eps)
            assert enc.cost == encoded_length(n, 12)  # 1/2560 floors to 2^-12
            for y in all_subsets(n, m):
                assert classical_sim_decode(enc, y, m) != restrict(x, y)

    def test_threshold(self):
        assert threshold_answer(np.array([0.1, 0.3, 0.3, 0.3]), 2) == "01"
        with pytest.raises(AccuracyViolation):
            threshold_answer(np.array([0.2, 0.2]), 1)

    def test_strategy_object(self):
        s = ClassicalSimulation(PJOStrategy(4, 2))
        assert s.cost == encoded_length(4, s.r)
        assert s.params() == {"r": s.r}
        for x in ("0000", "0110"):
            msg = s.encode(x)
            assert msg.cost == s.cost
            for y in all_subsets(4, 2):
                assert s.decode(msg, y) != restrict(x, y)


class TestPlurality:
    def test_argmax_smallest_on_tie(self):
        assert plurality([1, 3, 3]) == 1

    @pytest.mark.parametrize("t", [1, 2, 3, 5, 6])
    def test_against_multinomial_enumeration(self, t):
        p = np.array([0.1, 0.35, 0.2, 0.35])
        for target in range(4):
            want = 0.0
            for counts in itertools.product(range(t + 1), repeat=4):
                if sum(counts) != t or plurality(counts) != target:
                    continue
                coef = math.factorial(t) / math.prod(math.factorial(c) for c in counts)
                want += coef * math.prod(pi**c for pi, c in zip(p, counts))
            assert plurality_error_probability(p, target, t) == pytest.approx(want, abs=1e-12)

    def test_resample_frequency(self):
        m = 2
        enc = quantize_amplitudes(pjo_state("0000", m), 2**-10)
        rng = np.random.default_rng(5)
        wins = sum(resample_amplify(enc, (1, 2), m, 3, rng) == "00" for _ in range(3000))
        assert wins == 0


class TestMajority:
    @pytest.mark.parametrize("x,bit", [("0001", "0"), ("1110", "1"), ("0011", "0"), ("1", "1")])
    def test_encode(self, x, bit):
        assert majority_encode(x) == bit

    def test_decode(self):
        assert majority_decode("0", 3) == "111"
        assert majority_decode("1", 3) == "000"
        with pytest.raises(ValueError):
            majority_decode("2", 3)

    def test_error_profile_matches_enumeration(self):
        s = MajorityStrategy(6, 2)
        errors = []
        for x in all_strings(6):
            errors += s.error_profile(x, list(all_subsets(6, 2)))
        assert sum(errors) / len(errors) == bounds.majority_error_enumerated(6, 2)


class TestRandomGuess:
    def test_empirical(self):
        rng = np.random.default_rng(3)
        s = RandomGuessStrategy(3, 1)
        losses = sum(s.play("101", (2,), rng) == "0" for _ in range(100_000))
        assert losses / 100_000 == pytest.approx(0.5, abs=0.01)
        assert s.cost == 0
        assert s.error_probability("101", (2,)) == Fraction(1, 2)


class TestStrategies:
    def test_pjo_exact_zero(self):
        s = PJOStrategy(4, 2)
        assert s.cost == 4
        assert max(s.error_profile("1101", list(all_subsets(4, 2)))) <= 1e-10

    def test_pjo_sampling_never_loses(self):
        s, rng = PJOStrategy(5, 3), np.random.default_rng(0)
        for x in ("00000", "11011"):
            for y in all_subsets(5, 3):
                assert s.play(x, y, rng) != restrict(x, y)

    def test_compressed_payload(self):
        n, m, k = 6, 3, 2
        s = CompressedPJOStrategy(n, m, k)
        msg = s.encode("011010")
        assert msg.cost == s.cost == bounds.compressed_qubits(n, k).qubits == 5
        assert np.allclose(s.register_state(msg.payload), compressed_pjo_state("011010", m, k))
        err = s.error_profile("011010", [(1, 2, 3)])[0]
        assert err == pytest.approx(float(bounds.compression_error_exact(n, m, k)), abs=1e-12)

    def test_message_cost_checked(self):
        with pytest.raises(ValueError):
            Message("classical", "01", 3)
        with pytest.raises(ValueError):
            Message("quantum", basis_state(0, 2), 3)

    def test_build(self):
        assert build_strategy("compressed_pjo", 6, 3, eta=0.2).k == math.ceil(3**1.2)
        assert build_strategy("classical_sim", 4, 2, r=12).r == 12
        amp = build_strategy("amplified", 6, 3, k=2, t=5)
        assert isinstance(amp, AmplifiedSimulation)
        assert float(amp.gamma) >= float(bounds.compression_error_exact(6, 3, 2))
        assert amp.params() == {"k": 2, "r": amp.r, "t": 5}

    @pytest.mark.parametrize("kw", [
        dict(name="compressed_pjo"),
        dict(name="classical_sim", k=2),
        dict(name="amplified"),
        dict(name="amplified", t=3, gamma=Fraction(1, 8)),
        dict(name="nope"),
    ])
    def test_build_rejects(self, kw):
        with pytest.raises(ValueError):
            build_strategy(n=6, m=3, **kw)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7).flatmap(lambda n: st.tuples(
    st.just(n), st.integers(1, n), st.integers(0, 2**n - 1), st.integers(0, 2**32 - 1))))
def test_pjo_zero_error_property(args):
    n, m, xi, seed = args
    x = int_to_bits(xi, n)
    rng = np.random.default_rng(seed)
    y = tuple(sorted(int(i) + 1 for i in rng.choice(n, size=m, replace=False)))
    assert pjo_measure(pjo_state(x, m), y, m)[bits_to_int(restrict(x, y))] <= 1e-10
