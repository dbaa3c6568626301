"""
Closed-form error and cost calculators for exclusion-game strategies.

Purely combinatorial quantities are exact ``Fraction``/``int`` values.
Anything involving the PJO angle is evaluated with mpmath at
:data:`DPS` significant digits and projected to ``float`` for reports.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import NamedTuple

import mpmath
import numpy as np

from exlab.encoding import dyadic_exponent, encoded_length
from exlab.kernels import count_answer_hits, popcount

DPS = 50
MAJORITY_ENUMERATION_CAP = 14
RECTANGLE_ENUMERATION_CAP = 12


class BoundNotApplicable(ValueError):
    """The requested bound is vacuous (at least 1) for these parameters."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


@dataclass
class BoundReport:
    name: str
    value: float
    exact: Fraction | None = None
    inputs: dict = field(default_factory=dict)
    applicable: bool = True


class MajorityError(NamedTuple):
    formula: Fraction
    enumerated: Fraction | None

    @property
    def discrepancy(self):
        if self.enumerated is None:
            return None
        return self.formula - self.enumerated


class RectangleError(NamedTuple):
    formula: Fraction
    enumerated: Fraction | None


class CompressedSize(NamedTuple):
    log2: float
    qubits: int


def _check_nk(n, k):
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")


def half_angle_squares(m: int):
    """``(cos^2, sin^2)`` of half the PJO angle as mpf, via ``tan = 2^(1/m) - 1``."""
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    with mpmath.workdps(DPS):
        u2 = (mpmath.mpf(2) ** (mpmath.mpf(1) / m) - 1) ** 2
        return 1 / (1 + u2), u2 / (1 + u2)


def a_k(n: int, m: int, k: int):
    """Squared norm of the PJO state projected onto Hamming weight <= k."""
    _check_nk(n, k)
    c2, s2 = half_angle_squares(m)
    with mpmath.workdps(DPS):
        return mpmath.fsum(comb(n, i) * c2 ** (n - i) * s2**i for i in range(k + 1))


def compression_tail(n: int, m: int, k: int):
    """``1 - A_k`` summed directly over the discarded weights (no cancellation)."""
    _check_nk(n, k)
    c2, s2 = half_angle_squares(m)
    with mpmath.workdps(DPS):
        return mpmath.fsum(
            comb(n, i) * c2 ** (n - i) * s2**i for i in range(k + 1, n + 1)
        )


def compression_error_bound(n: int, m: int, k: int) -> float:
    """Trace distance ``sqrt(1 - A_k)`` between full and compressed PJO states."""
    with mpmath.workdps(DPS):
        return float(mpmath.sqrt(compression_tail(n, m, k)))


def compression_error_exact(n: int, m: int, k: int):
    """Error probability of the weight-<=k compressed PJO strategy.

    Closed form over Hamming weights of the measured block (``i``) and the
    traced-out block (``w``); independent of the input pair by symmetry.
    """
    _check_nk(n, k)
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got n={n}, m={m}")
    if k == n:
        return mpmath.mpf(0)
    c2, s2 = half_angle_squares(m)
    with mpmath.workdps(DPS):
        c, s = mpmath.sqrt(c2), mpmath.sqrt(s2)
        norm = mpmath.sqrt(a_k(n, m, k))

        def amp(weight):
            if weight > k:
                return mpmath.mpf(0)
            return c ** (n - weight) * s**weight / norm

        total = mpmath.mpf(0)
        for w in range(n - m + 1):
            inner = 2 * amp(w) - mpmath.fsum(comb(m, i) * amp(i + w) for i in range(m + 1))
            total += comb(n - m, w) * inner**2
        return total / 2**m


def analytic_tail_bound(n: int, m: int, k: int):
    """``(n+1) (n e / (m^2 k))^k``, an upper bound on ``1 - A_k`` for m >= 2.

    Raises :class:`BoundNotApplicable` when the value is at least 1.
    """
    if m < 2 or k < 1:
        raise ValueError(f"tail bound needs m >= 2 and k >= 1, got m={m}, k={k}")
    with mpmath.workdps(DPS):
        value = (n + 1) * (n * mpmath.e / (mpmath.mpf(m) ** 2 * k)) ** k
    if value >= 1:
        raise BoundNotApplicable(
            f"tail bound is vacuous for n={n}, m={m}, k={k} (value {float(value):.3g})",
            value,
        )
    return value


def tail_bound_k(m: int, eta: float) -> int:
    return math.ceil(m ** (1 + eta))


def compressed_qubits(n: int, k: int) -> CompressedSize:
    _check_nk(n, k)
    total = sum(comb(n, i) for i in range(k + 1))
    return CompressedSize(math.log2(total), (total - 1).bit_length())


def majority_error_formula(n: int, m: int) -> Fraction:
    num = sum(comb(n, i) * comb(i, m) for i in range(m, n // 2 + 1))
    return Fraction(num, 2 ** (n - 1) * comb(n, m))


def subset_masks(n: int, m: int) -> np.ndarray:
    masks = [sum(1 << (n - i) for i in y) for y in combinations(range(1, n + 1), m)]
    return np.asarray(masks, dtype=np.int64)


def majority_error_enumerated(n: int, m: int) -> Fraction:
    """Loss fraction of the one-bit majority strategy over every ``(x, y)``."""
    xs = np.arange(1 << n, dtype=np.int64)
    # majority of zeros (ties included) -> Bob answers all ones
    answer_ones = popcount(xs) * 2 <= n
    hits = count_answer_hits(xs, answer_ones, subset_masks(n, m))
    return Fraction(int(hits), (1 << n) * comb(n, m))


def majority_error_exact(n: int, m: int, enumerate_cap: int = MAJORITY_ENUMERATION_CAP) -> MajorityError:
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got n={n}, m={m}")
    formula = majority_error_formula(n, m)
    enumerated = majority_error_enumerated(n, m) if n <= enumerate_cap else None
    return MajorityError(formula, enumerated)


def classical_ic_lower_bound(n: int, m: int) -> float:
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got n={n}, m={m}")
    return n - math.log2(sum(comb(n, i) for i in range(m)))


def rectangle_construction_error(n: int, m: int, enumerate_cap: int = RECTANGLE_ENUMERATION_CAP) -> RectangleError:
    """Error fraction of the all-zeros answer on ``S = {x : weight(x) >= n - m}``."""
    if not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got n={n}, m={m}")
    formula = Fraction(1, sum(comb(n, i) for i in range(m + 1)))
    enumerated = None
    if n <= enumerate_cap:
        xs = np.arange(1 << n, dtype=np.int64)
        xs = xs[popcount(xs) >= n - m]
        hits = count_answer_hits(xs, np.zeros(xs.size, dtype=bool), subset_masks(n, m))
        enumerated = Fraction(int(hits), xs.size * comb(n, m))
    return RectangleError(formula, enumerated)


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -(p * math.log2(p) + (1 - p) * math.log1p(-p) / math.log(2))


def pjo_info_cost_bound(n: int, m: int) -> float:
    """Twice the entropy of the uniform PJO message ensemble, ``2 n h(sin^2)``."""
    _, s2 = half_angle_squares(m)
    return 2 * n * binary_entropy(float(s2))


def perturbation_bounds(l: int, epsilon: float) -> tuple:
    """``(10 sqrt(l) eps, 20 sqrt(l) eps)``: trace-distance and probability shifts."""
    if l < 1:
        raise ValueError(f"dimension must be positive, got {l}")
    limit = 1.0 / (6.0 * math.sqrt(2 * l))
    if not 0 < epsilon < limit:
        raise ValueError(f"need 0 < epsilon < {limit:.6g} for l={l}, got {epsilon}")
    root = math.sqrt(l)
    return 10 * root * epsilon, 20 * root * epsilon


def hoeffding_repetitions(gap: float, tau: float) -> int:
    """Repetitions so a plurality vote errs with probability below ``tau``.

    ``gap`` is half the distance between the best and the excluded outcome
    probabilities.
    """
    if not 0 < gap <= 1:
        raise ValueError(f"gap must lie in (0, 1], got {gap}")
    if not 0 < tau < 1:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")
    return max(1, math.ceil(math.log(1 / tau) / (2 * gap * gap)))


def classical_message_bits(t_qubits: int, epsilon: float) -> int:
    return encoded_length(t_qubits, dyadic_exponent(epsilon))


def rectangle_threshold(n: int, m: int) -> Fraction:
    return Fraction(1, (n + 1) ** m)


def _report(name, value, inputs, exact=None, applicable=True):
    return BoundReport(name, float(value), exact, inputs, applicable)


def evaluate(name: str, n: int, m: int, k: int | None = None, **extra) -> list:
    """Evaluate one named formula into a list of :class:`BoundReport`."""
    inputs = {"n": n, "m": m}
    if k is not None:
        inputs["k"] = k

    def need_k():
        if k is None:
            raise ValueError(f"formula {name!r} needs k")
        return k

    if name == "a_k":
        return [_report(name, a_k(n, m, need_k()), inputs)]
    if name == "compression_error_bound":
        return [_report(name, compression_error_bound(n, m, need_k()), inputs)]
    if name == "compression_error_exact":
        return [_report(name, compression_error_exact(n, m, need_k()), inputs)]
    if name == "analytic_tail_bound":
        try:
            return [_report(name, analytic_tail_bound(n, m, need_k()), inputs)]
        except BoundNotApplicable as exc:
            return [_report(name, exc.value, inputs, applicable=False)]
    if name == "compressed_qubits":
        size = compressed_qubits(n, need_k())
        return [
            _report("compressed_qubits_log2", size.log2, inputs),
            _report("compressed_qubits", size.qubits, inputs, exact=Fraction(size.qubits)),
        ]
    if name == "majority_error":
        res = majority_error_exact(n, m)
        out = [_report("majority_error_formula", res.formula, inputs, exact=res.formula)]
        if res.enumerated is not None:
            out.append(
                _report("majority_error_enumerated", res.enumerated, inputs, exact=res.enumerated)
            )
        return out
    if name == "classical_ic_lower_bound":
        return [_report(name, classical_ic_lower_bound(n, m), inputs)]
    if name == "rectangle_construction_error":
        res = rectangle_construction_error(n, m)
        out = [_report("rectangle_error_formula", res.formula, inputs, exact=res.formula)]
        if res.enumerated is not None:
            out.append(
                _report("rectangle_error_enumerated", res.enumerated, inputs, exact=res.enumerated)
            )
        thr = rectangle_threshold(n, m)
        out.append(_report("rectangle_threshold", thr, inputs, exact=thr))
        return out
    if name == "pjo_info_cost_bound":
        return [_report(name, pjo_info_cost_bound(n, m), inputs)]
    if name == "perturbation_bounds":
        l, eps = extra["l"], extra["epsilon"]
        d, p = perturbation_bounds(l, eps)
        inputs = {"l": l, "epsilon": eps}
        return [
            _report("trace_distance_bound", d, inputs),
            _report("probability_shift_bound", p, inputs),
        ]
    if name == "hoeffding_repetitions":
        gap, tau = extra["gap"], extra["tau"]
        t = hoeffding_repetitions(gap, tau)
        return [_report(name, t, {"gap": gap, "tau": tau}, exact=Fraction(t))]
    raise ValueError(f"unknown formula {name!r}; choose from {', '.join(FORMULAS)}")


FORMULAS = (
    "a_k",
    "compression_error_bound",
    "compression_error_exact",
    "analytic_tail_bound",
    "compressed_qubits",
    "majority_error",
    "classical_ic_lower_bound",
    "rectangle_construction_error",
    "pjo_info_cost_bound",
    "perturbation_bounds",
    "hoeffding_repetitions",
)
