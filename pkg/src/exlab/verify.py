"""
Verification suites behind ``exlab verify``.

Each suite returns a list of :class:`Check` results. A check carries the
measured quantity as well as the pass/fail verdict so callers can report
margins, not just booleans.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import mpmath
import numpy as np

from exlab import bounds
from exlab.encoding import decode_and_normalize, encoded_length, quantize_amplitudes
from exlab.game import all_strings, all_subsets, complement_bits, is_win, restrict
from exlab.harness import m_from_rule
from exlab.kernels import zeta_matrix
from exlab.linalg import (
    born_probability,
    partial_trace,
    trace_distance_pure,
    von_neumann_entropy,
)
from exlab.protocols import (
    AmplifiedSimulation,
    CompressedPJOStrategy,
    accuracy_for_zero_error,
    bits_to_int,
    classical_sim_probabilities,
    excluded_probabilities,
    pjo_state,
    pjo_state_table,
    plurality_error_probability,
    threshold_answer,
)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    value: object = None


def _ms(n, m):
    return range(1, n + 1) if m is None else ([m] if m <= n else [])


# -- zero-error PJO ---------------------------------------------------------------


def pjo_excluded_max(n_max: int = 10, m: int | None = None) -> tuple:
    """Largest probability the PJO measurement gives the excluded string."""
    worst, pairs = 0.0, 0
    for n in range(1, n_max + 1):
        for mm in _ms(n, m):
            states = pjo_state_table(n, mm)
            for y in all_subsets(n, mm):
                probs = excluded_probabilities(states, y, mm)
                worst = max(worst, float(probs.max()))
                pairs += probs.size
    return worst, pairs


def suite_zero_error(n_max=10, m=None):
    worst, pairs = pjo_excluded_max(n_max, m)
    return [Check("pjo_zero_error", worst <= 1e-10,
                  f"max excluded probability {worst:.3e} over {pairs} pairs (n <= {n_max})", worst)]


# -- classical simulation -----------------------------------------------------------


@dataclass
class SimulationStats:
    pairs: int = 0
    losses: int = 0
    no_answer: int = 0
    max_excluded_ratio: float = 0.0
    min_best_ratio: float = math.inf
    length_mismatches: int = 0


def classical_sim_stats(n_max: int = 8, m: int | None = None) -> SimulationStats:
    """Run the quantized-amplitude simulation of PJO on every input pair.

    Ratios are probabilities scaled by ``2^m``: the excluded string must stay
    below 1 and the best answer must reach 1.
    """
    st = SimulationStats()
    for n in range(1, n_max + 1):
        for mm in _ms(n, m):
            eps = accuracy_for_zero_error(mm, n)
            r = -int(math.log2(eps))
            ys = list(all_subsets(n, mm))
            for x in all_strings(n):
                enc = quantize_amplitudes(pjo_state(x, mm), eps)
                st.length_mismatches += enc.cost != encoded_length(n, r)
                st.length_mismatches += enc.cost != bounds.classical_message_bits(n, eps)
                for y in ys:
                    probs = classical_sim_probabilities(enc, y, mm)
                    target = bits_to_int(restrict(x, y))
                    scale = 2.0**mm
                    st.pairs += 1
                    st.max_excluded_ratio = max(st.max_excluded_ratio, probs[target] * scale)
                    st.min_best_ratio = min(st.min_best_ratio, probs.max() * scale)
                    hits = np.flatnonzero(probs >= 2.0**-mm)
                    if hits.size == 0:
                        st.no_answer += 1
                        continue
                    st.losses += int(threshold_answer(probs, mm) == restrict(x, y))
    return st


def suite_classical_sim(n_max=8, m=None):
    st = classical_sim_stats(n_max, m)
    return [
        Check("classical_sim_never_loses", st.losses == 0 and st.no_answer == 0,
              f"{st.losses} losses, {st.no_answer} unanswered over {st.pairs} pairs", st.losses),
        Check("classical_sim_excluded_below_threshold", st.max_excluded_ratio < 1,
              f"max 2^m p'(excluded) = {st.max_excluded_ratio:.3e}", st.max_excluded_ratio),
        Check("classical_sim_answer_exists", st.min_best_ratio >= 1,
              f"min 2^m max_z p'_z = {st.min_best_ratio:.6f}", st.min_best_ratio),
        Check("classical_sim_message_length", st.length_mismatches == 0,
              f"{st.length_mismatches} payloads differ from 2^(t+1)(r+1)"),
    ]


# -- perturbation bounds --------------------------------------------------------------


def random_state(l: int, rng) -> np.ndarray:
    v = rng.normal(size=l) + 1j * rng.normal(size=l)
    return v / np.linalg.norm(v)


def perturbation_trials(trials: int = 10_000, seed: int = 0, max_qubits: int = 6):
    """Worst ratios of observed shift to the trace-distance and probability bounds.

    States are Haar-random; ``epsilon`` is a random power of two satisfying the
    bounds' precondition; the projector is a random rank-1 projector.
    """
    rng = np.random.default_rng(seed)
    worst_d = worst_p = 0.0
    for _ in range(trials):
        t = int(rng.integers(0, max_qubits + 1))
        l = 1 << t
        limit = 1.0 / (6.0 * math.sqrt(2 * l))
        r_min = max(1, math.floor(-math.log2(limit)) + 1)
        r = int(rng.integers(r_min, 21))
        eps = 2.0**-r
        psi = random_state(l, rng)
        approx = decode_and_normalize(quantize_amplitudes(psi, eps))
        d_bound, p_bound = bounds.perturbation_bounds(l, eps)
        d = trace_distance_pure(psi, approx)
        v = random_state(l, rng)
        shift = abs(abs(np.vdot(v, psi)) ** 2 - abs(np.vdot(v, approx)) ** 2)
        worst_d = max(worst_d, d / d_bound)
        worst_p = max(worst_p, shift / p_bound)
    return worst_d, worst_p


def suite_perturbation(trials=10_000, seed=0):
    d, p = perturbation_trials(trials, seed)
    return [
        Check("trace_distance_below_10_sqrt_l_eps", d < 1, f"max ratio {d:.4f} over {trials} trials", d),
        Check("probability_shift_below_20_sqrt_l_eps", p < 1, f"max ratio {p:.4f} over {trials} trials", p),
    ]


# -- compression -------------------------------------------------------------------


@dataclass
class CompressionStats:
    cases: int = 0
    bound_violations: int = 0
    closed_form_mismatch: float = 0.0
    max_full_error: float = 0.0
    x_dependence: float = 0.0


def compression_stats(n_max: int = 10, m: int | None = None) -> CompressionStats:
    """Simulated compression error against the trace-distance bound and closed form."""
    st = CompressionStats()
    for n in range(1, n_max + 1):
        for mm in _ms(n, m):
            ys = list(all_subsets(n, mm))
            for k in range(n + 1):
                states = pjo_state_table(n, mm, k)
                bound = bounds.compression_error_bound(n, mm, k)
                exact = float(bounds.compression_error_exact(n, mm, k))
                for y in ys:
                    errs = excluded_probabilities(states, y, mm)
                    st.cases += errs.size
                    st.bound_violations += int(np.count_nonzero(errs > bound + 1e-12))
                    st.closed_form_mismatch = max(st.closed_form_mismatch, float(np.abs(errs - exact).max()))
                    st.x_dependence = max(st.x_dependence, float(errs.max() - errs.min()))
                    if k == n:
                        st.max_full_error = max(st.max_full_error, float(errs.max()))
    return st


def tail_bound_violations(n_max: int = 64) -> tuple:
    """Compare ``1 - A_k`` with the analytic tail bound wherever it is non-vacuous."""
    checked = violations = 0
    for n in range(2, n_max + 1):
        for m in range(2, n + 1):
            for k in range(1, n + 1):
                try:
                    bound = bounds.analytic_tail_bound(n, m, k)
                except bounds.BoundNotApplicable:
                    continue
                checked += 1
                violations += not bounds.compression_tail(n, m, k) < bound
    return checked, violations


def qubit_count_error(n_max: int = 10) -> float:
    worst = 0.0
    for n in range(1, n_max + 1):
        for k in range(n + 1):
            total = sum(comb(n, i) for i in range(k + 1))
            with mpmath.workdps(30):
                exact = mpmath.log(total, 2)
            worst = max(worst, abs(bounds.compressed_qubits(n, k).log2 - float(exact)))
    return worst


def suite_compression(n_max=10, m=None):
    st = compression_stats(n_max, m)
    checked, bad = tail_bound_violations(min(64, max(n_max, 16)))
    qerr = qubit_count_error(n_max)
    return [
        Check("compression_error_below_trace_distance", st.bound_violations == 0,
              f"{st.bound_violations} violations over {st.cases} cases"),
        Check("compression_error_matches_closed_form", st.closed_form_mismatch <= 1e-9,
              f"max |simulated - closed form| = {st.closed_form_mismatch:.3e}", st.closed_form_mismatch),
        Check("compression_k_equals_n_is_exact", st.max_full_error <= 1e-10,
              f"max error at k = n: {st.max_full_error:.3e}", st.max_full_error),
        Check("analytic_tail_bound_holds", bad == 0, f"{bad} violations in {checked} non-vacuous cases"),
        Check("compressed_qubit_count", qerr <= 1e-12, f"max log2 error {qerr:.3e}", qerr),
    ]


# -- majority and rectangle ---------------------------------------------------------


def suite_majority(n_max=13):
    checks = []
    odd_bad, even_report = [], []
    for n in range(1, n_max + 1):
        for m in range(1, n // 2 + 1):
            res = bounds.majority_error_exact(n, m)
            if n % 2 and res.formula != res.enumerated:
                odd_bad.append((n, m))
            if n % 2 == 0:
                even_report.append(f"n={n},m={m}: {res.discrepancy}")
    checks.append(Check("majority_formula_matches_enumeration_odd_n", not odd_bad,
                        f"mismatches at {odd_bad}" if odd_bad else f"all odd n <= {n_max} agree"))
    checks.append(Check("majority_even_n_discrepancy_reported", True,
                        "; ".join(even_report[:6]) + (" ..." if len(even_report) > 6 else "")))
    big = bounds.majority_error_formula(100, 10)
    checks.append(Check("majority_n100_m10_below_2^-11", big < Fraction(1, 2**11),
                        f"eps_t = {float(big):.6e}", big))
    return checks


def suite_rectangle(n_max=12):
    bad, below = [], []
    for n in range(1, n_max + 1):
        for m in range(0, n + 1):
            res = bounds.rectangle_construction_error(n, m)
            if res.formula != res.enumerated:
                bad.append((n, m))
            if res.formula < bounds.rectangle_threshold(n, m):
                below.append((n, m))
    return [
        Check("rectangle_formula_matches_enumeration", not bad, f"mismatches {bad}" if bad else "exact"),
        Check("rectangle_error_at_least_(n+1)^-m", not below, f"violations {below}" if below else "holds"),
    ]


# -- information cost ----------------------------------------------------------------


def ensemble_entropy(n: int, m: int) -> float:
    states = pjo_state_table(n, m)
    rho = states.T @ states.conj() / states.shape[0]
    return von_neumann_entropy(rho)


def info_cost_grid():
    return [2**e for e in range(4, 21, 2)]


def suite_info_cost(n_max=10):
    worst = 0.0
    for n in range(1, n_max + 1):
        for m in range(1, n + 1):
            worst = max(worst, abs(bounds.pjo_info_cost_bound(n, m) - 2 * ensemble_entropy(n, m)))
    values = [bounds.pjo_info_cost_bound(n, m_from_rule("sqrt_nlogn", n)) for n in info_cost_grid()]
    decreasing = all(b < a for a, b in zip(values, values[1:]))
    return [
        Check("info_cost_formula_matches_ensemble_entropy", worst <= 1e-8, f"max deviation {worst:.3e}", worst),
        Check("info_cost_decreasing_along_sqrt_nlogn", decreasing,
              ", ".join(f"{v:.4f}" for v in values), values),
    ]


def suite_ic_bound(alphas=(0.1, 0.25, 0.4)):
    grid = [2**e for e in range(4, 13)]
    ratios = {a: [bounds.classical_ic_lower_bound(n, math.floor(a * n)) / n for n in grid] for a in alphas}
    low = min(min(v) for v in ratios.values())
    return [
        Check("ic_bound_m1_is_n", all(bounds.classical_ic_lower_bound(n, 1) == n for n in range(1, 40))),
        Check("ic_bound_4_2", abs(bounds.classical_ic_lower_bound(4, 2) - (4 - math.log2(5))) < 1e-12),
        Check("ic_bound_linear_in_n", low > 0, f"min ratio to n over the grid {low:.4f}", low),
    ]


# -- amplification -------------------------------------------------------------------


def amplification_instance(n=6, m=3, k=1, tau=0.05):
    """Amplified simulation of a compressed PJO message with its Hoeffding repetition count.

    Uses the input pair with the smallest per-round gap, so the count is the
    most demanding one for this instance.
    """
    inner = CompressedPJOStrategy(n, m, k)
    gamma = Fraction(math.nextafter(float(bounds.compression_error_exact(n, m, k)), 1.0))
    probe = AmplifiedSimulation(inner, gamma, 1)
    best = None
    for x in all_strings(n):
        msg = probe.encode(x)
        for y in all_subsets(n, m):
            p = probe.probabilities(msg, y)
            target = bits_to_int(restrict(x, y))
            gap = (p.max() - p[target]) / 2
            if best is None or gap < best[0]:
                best = (gap, x, y, p)
    gap, x, y, p = best
    t = bounds.hoeffding_repetitions(gap, tau)
    return AmplifiedSimulation(inner, gamma, t), x, y, gap, p


def amplification_run(reps=1000, seed=0, tau=0.05, **kw):
    strategy, x, y, gap, p = amplification_instance(tau=tau, **kw)
    rng = np.random.default_rng(seed)
    msg = strategy.encode(x)
    target = restrict(x, y)
    losses = sum(strategy.decode(msg, y, rng) == target for _ in range(reps))
    exact = plurality_error_probability(p, bits_to_int(target), strategy.t)
    return {"t": strategy.t, "gap": gap, "losses": losses, "reps": reps,
            "empirical": losses / reps, "exact": exact, "tau": tau,
            "per_round": float(p[bits_to_int(target)])}


def suite_amplification(reps=1000, seed=0, tau=0.05):
    res = amplification_run(reps, seed, tau)
    return [
        Check("amplified_error_below_2tau", res["empirical"] < 2 * tau,
              f"t={res['t']} gap={res['gap']:.4f}: {res['losses']}/{reps} losses", res["empirical"]),
        Check("amplified_exact_error_below_tau", res["exact"] < tau,
              f"exact plurality error {res['exact']:.3e}", res["exact"]),
    ]


# -- small structural checks ----------------------------------------------------------


def suite_game(m_max=6):
    ok = True
    for m in range(1, m_max + 1):
        n = m + 1
        for x in all_strings(n):
            for y in all_subsets(n, m):
                wins = sum(is_win(x, y, z) for z in all_strings(m))
                ok &= wins == 2**m - 1
                ok &= is_win(x, y, complement_bits(restrict(x, y)))
    return [Check("exactly_one_losing_answer", bool(ok))]


def suite_linalg(m_max=8):
    worst = 0.0
    for m in range(1, m_max + 1):
        z = zeta_matrix(m)
        worst = max(worst, float(np.abs(z @ z.T - np.eye(1 << m)).max()))
    rng = np.random.default_rng(0)
    psi = random_state(1 << 6, rng)
    rho = partial_trace(psi, (2, 4, 5))
    evals = np.linalg.eigvalsh(rho)
    trace_ok = abs(np.trace(rho).real - 1) <= 1e-10 and evals.min() >= -1e-10
    x = "101100"
    full = partial_trace(pjo_state(x, 3), (1, 3, 6))
    excl = born_probability(full, zeta_matrix(3)[bits_to_int(restrict(x, (1, 3, 6)))])
    return [
        Check("zeta_orthonormal", worst <= 1e-10, f"max deviation {worst:.2e}", worst),
        Check("partial_trace_valid", bool(trace_ok)),
        Check("born_rule_excluded_zero", excl <= 1e-10, f"{excl:.2e}", excl),
    ]


SUITES = {
    "linalg": lambda n=None, m=None: suite_linalg(),
    "game": lambda n=None, m=None: suite_game(),
    "zero-error": lambda n=None, m=None: suite_zero_error(n or 10, m),
    "classical-sim": lambda n=None, m=None: suite_classical_sim(n or 8, m),
    "perturbation": lambda n=None, m=None: suite_perturbation(),
    "compression": lambda n=None, m=None: suite_compression(n or 10, m),
    "majority": lambda n=None, m=None: suite_majority(n or 13),
    "rectangle": lambda n=None, m=None: suite_rectangle(n or 12),
    "info-cost": lambda n=None, m=None: suite_info_cost(n or 10),
    "ic-bound": lambda n=None, m=None: suite_ic_bound(),
    "amplification": lambda n=None, m=None: suite_amplification(),
}


def run_suite(name: str, n: int | None = None, m: int | None = None) -> list:
    if name == "all":
        out = []
        for key in SUITES:
            out += run_suite(key, n, m)
        return out
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from all, {', '.join(SUITES)}")
    return [Check(f"{name}/{c.name}", c.passed, c.detail, c.value) for c in SUITES[name](n, m)]
