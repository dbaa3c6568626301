"""
One-way exclusion-game strategies.

A strategy turns Alice's ``x`` into a :class:`Message` (with a cost in qubits
or bits) and turns a message plus Bob's subset ``y`` into an answer ``z``.
Besides sampled play every strategy can report its exact error probability
on a given input pair, which the exhaustive harness relies on.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from exlab import bounds
from exlab.encoding import (
    ClassicalEncoding,
    decode_and_normalize,
    dyadic_exponent,
    encoded_length,
    quantize_amplitudes,
)
from exlab.game import canonical_subset, check_bits, restrict
from exlab.kernels import (
    complement,
    popcount,
    subset_offsets,
    target_probabilities,
    zeta_matrix,
    zeta_probabilities,
)
from exlab.linalg import as_state, num_qubits


class AccuracyViolation(RuntimeError):
    """No answer reached the acceptance threshold; the encoding was too coarse."""


def bits_to_int(s: str) -> int:
    return int(s, 2) if s else 0


def int_to_bits(v: int, width: int) -> str:
    return format(int(v), f"0{width}b") if width else ""


# -- states and measurement ---------------------------------------------------


def theta(m: int) -> float:
    """PJO encoding angle ``2 atan(2^(1/m) - 1)``."""
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    return 2.0 * math.atan(2.0 ** (1.0 / m) - 1.0)


def _weights_and_signs(x: str):
    n = len(x)
    r = np.arange(1 << n, dtype=np.int64)
    weight = popcount(r)
    sign = 1 - 2 * (popcount(r & bits_to_int(x)) & 1)
    return weight, sign


def pjo_state(x: str, m: int) -> np.ndarray:
    """Product state with qubit ``i`` equal to ``cos(th/2)|0> + (-1)^x_i sin(th/2)|1>``."""
    check_bits(x)
    half = theta(m) / 2.0
    c, s = math.cos(half), math.sin(half)
    weight, sign = _weights_and_signs(x)
    n = len(x)
    amps = sign * (c ** (n - weight)) * (s**weight)
    return amps.astype(np.complex128)


def compressed_pjo_state(x: str, m: int, k: int) -> np.ndarray:
    """PJO state projected onto Hamming weight <= k and renormalized."""
    n = len(x)
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    full = pjo_state(x, m)
    weight, _ = _weights_and_signs(x)
    full[weight > k] = 0.0
    return full / np.linalg.norm(full)


def pjo_state_table(n: int, m: int, k: int | None = None) -> np.ndarray:
    """Row ``x`` (as an integer) holds ``pjo_state(x, m)``, or its weight-<=k compression."""
    r = np.arange(1 << n, dtype=np.int64)
    weight = popcount(r)
    half = theta(m) / 2.0
    mags = (math.cos(half) ** (n - weight)) * (math.sin(half) ** weight)
    if k is not None:
        mags = np.where(weight <= k, mags, 0.0)
        mags = mags / np.linalg.norm(mags)
    signs = 1 - 2 * (popcount(r[:, None] & r[None, :]) & 1)
    return (signs * mags[None, :]).astype(np.complex128)


def restriction_codes(xs, y, n: int) -> np.ndarray:
    """``restrict(x, y)`` as an integer for every integer-coded ``x``."""
    xs = np.asarray(xs, dtype=np.int64)
    out = np.zeros_like(xs)
    for q in y:
        out = (out << 1) | ((xs >> (n - q)) & 1)
    return out


def zeta(z: str) -> np.ndarray:
    """Conclusive-exclusion basis vector for the ``m``-bit string ``z``."""
    check_bits(z)
    return zeta_matrix(len(z))[bits_to_int(z)].astype(np.complex128)


@lru_cache(maxsize=4096)
def _offsets(n: int, y: tuple):
    return subset_offsets(n, y), subset_offsets(n, complement(n, y))


def excluded_probabilities(states: np.ndarray, y, m: int) -> np.ndarray:
    """Probability of outcome ``restrict(x, y)`` for every row ``x`` of ``states``."""
    n = num_qubits(states.shape[1])
    y = canonical_subset(y, n)
    if len(y) != m:
        raise ValueError(f"|y|={len(y)} but m={m}")
    yoff, eoff = _offsets(n, y)
    codes = restriction_codes(np.arange(states.shape[0]), y, n)
    zrows = np.ascontiguousarray(zeta_matrix(m)[codes])
    return target_probabilities(states, yoff, eoff, zrows)


def pjo_measure(state, y, m: int) -> np.ndarray:
    """Distribution of Bob's zeta-basis outcome on the qubits in ``y``.

    Entry ``z`` (an ``m``-bit integer, first qubit of ``y`` most significant)
    equals ``<zeta(z)| Tr_{not y} |state><state| |zeta(z)>``.
    """
    psi = as_state(state)
    n = num_qubits(psi.size)
    y = canonical_subset(y, n)
    if len(y) != m:
        raise ValueError(f"|y|={len(y)} but m={m}")
    yoff, eoff = _offsets(n, y)
    return zeta_probabilities(psi, yoff, eoff)


# -- classical simulation -------------------------------------------------------


def dyadic_floor(value: Fraction) -> int:
    """Smallest ``r`` with ``2**-r <= value`` (``value`` in (0, 1])."""
    value = Fraction(value)
    if not 0 < value <= 1:
        raise ValueError(f"value must lie in (0, 1], got {value}")
    r = max(0, value.denominator.bit_length() - value.numerator.bit_length() - 1)
    while Fraction(1, 1 << r) > value:
        r += 1
    return r


def accuracy_for_zero_error(m: int, q: int) -> float:
    """``2^-(m+q) / 20`` rounded down to a power of two."""
    if m < 1 or q < 1:
        raise ValueError(f"need m, q >= 1, got m={m}, q={q}")
    return 2.0 ** -dyadic_floor(Fraction(1, 20 * 2 ** (m + q)))


def accuracy_for_error(m: int, s: int, gamma) -> float:
    """``(2^-m - gamma) 2^-s / 20`` rounded down to a power of two."""
    slack = Fraction(1, 2**m) - Fraction(gamma)
    if slack <= 0:
        raise ValueError(f"gamma={gamma} leaves no room below 2^-{m}")
    return 2.0 ** -dyadic_floor(slack / (20 * 2**s))


def classical_sim_probabilities(enc: ClassicalEncoding, y, m: int) -> np.ndarray:
    """Born-rule outcome distribution computed from the decoded amplitudes."""
    return pjo_measure(decode_and_normalize(enc), y, m)


def threshold_answer(probs: np.ndarray, m: int) -> str:
    hits = np.flatnonzero(probs >= 2.0**-m)
    if hits.size == 0:
        raise AccuracyViolation(
            f"no outcome reached 2^-{m} (max {probs.max():.3e}); encoding too coarse"
        )
    return int_to_bits(hits[0], m)


def classical_sim_decode(enc: ClassicalEncoding, y, m: int) -> str:
    """Smallest ``z`` whose simulated probability is at least ``2^-m``."""
    return threshold_answer(classical_sim_probabilities(enc, y, m), m)


def plurality(counts) -> int:
    return int(np.argmax(counts))


def resample_amplify(enc: ClassicalEncoding, y, m: int, t: int, rng) -> str:
    """Plurality answer over ``t`` simulated measurements of the decoded state."""
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    probs = classical_sim_probabilities(enc, y, m)
    counts = rng.multinomial(t, probs / probs.sum())
    return int_to_bits(plurality(counts), m)


def _poisson_pmf(lam: float, upto: int) -> np.ndarray:
    if upto < 0:
        return np.zeros(0)
    if lam <= 0.0:
        out = np.zeros(upto + 1)
        out[0] = 1.0
        return out
    j = np.arange(upto + 1)
    lg = np.array([math.lgamma(v + 1.0) for v in j])
    return np.exp(j * math.log(lam) - lam - lg)


def plurality_error_probability(probs, target: int, t: int) -> float:
    """Exact chance that ``target`` wins a ``t``-draw plurality vote.

    Ties go to the smallest outcome index. Computed by conditioning
    independent Poisson counts on their total.
    """
    p = np.asarray(probs, dtype=float)
    p = np.clip(p, 0.0, None)
    p = p / p.sum()
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    norm = _poisson_pmf(float(t), t)[t]
    target_pmf = _poisson_pmf(t * p[target], t)
    total = 0.0
    for c in range(1, t + 1):
        if target_pmf[c] == 0.0:
            continue
        rest = np.zeros(t - c + 1)
        rest[0] = 1.0
        for z in range(p.size):
            if z == target:
                continue
            cap = c - 1 if z < target else c
            pmf = _poisson_pmf(t * p[z], min(cap, t - c))
            rest = np.convolve(rest, pmf)[: t - c + 1]
        total += target_pmf[c] * rest[t - c]
    return float(min(1.0, total / norm))


# -- one-bit and zero-communication strategies ----------------------------------


def majority_encode(x: str) -> str:
    """``'1'`` iff ``x`` has strictly more ones than zeros."""
    check_bits(x)
    return "1" if 2 * x.count("1") > len(x) else "0"


def majority_decode(bit: str, m: int) -> str:
    if bit not in ("0", "1"):
        raise ValueError(f"expected a single bit, got {bit!r}")
    return ("1" if bit == "0" else "0") * m


def random_guess(m: int, rng) -> str:
    return "".join("1" if b else "0" for b in rng.integers(0, 2, size=m))


# -- strategy objects -----------------------------------------------------------


@dataclass(frozen=True)
class Message:
    kind: str
    payload: object
    cost: int

    def __post_init__(self):
        if self.kind == "quantum":
            expected = num_qubits(np.asarray(self.payload).size)
        elif self.kind == "classical":
            expected = len(self.payload) if isinstance(self.payload, str) else self.payload.cost
        else:
            raise ValueError(f"unknown message kind {self.kind!r}")
        if self.cost != expected:
            raise ValueError(f"{self.kind} message cost {self.cost} != payload size {expected}")

    @classmethod
    def quantum(cls, state):
        state = as_state(state)
        return cls("quantum", state, num_qubits(state.size))

    @classmethod
    def classical(cls, payload):
        size = len(payload) if isinstance(payload, str) else payload.cost
        return cls("classical", payload, size)


class Strategy:
    """Base class for a one-way strategy on a fixed ``(n, m)`` game size."""

    name = "strategy"
    quantum = False

    def __init__(self, n: int, m: int):
        if not 1 <= m <= n:
            raise ValueError(f"need 1 <= m <= n, got n={n}, m={m}")
        self.n, self.m = n, m

    def params(self) -> dict:
        return {}

    @property
    def cost(self) -> int:
        raise NotImplementedError

    def encode(self, x: str) -> Message:
        raise NotImplementedError

    def decode(self, message: Message, y, rng=None) -> str:
        raise NotImplementedError

    def play(self, x: str, y, rng=None) -> str:
        return self.decode(self.encode(x), y, rng)

    def error_profile(self, x: str, ys) -> list:
        """Exact probability of answering ``restrict(x, y)``, for each ``y``."""
        message = self.encode(x)
        return [Fraction(int(self.decode(message, y) == restrict(x, y))) for y in ys]

    def error_probability(self, x: str, y):
        return self.error_profile(x, [y])[0]


class QuantumStrategy(Strategy):
    """Strategy whose message is a pure state measured in the zeta basis."""

    quantum = True

    def message_state(self, x: str) -> np.ndarray:
        raise NotImplementedError

    def register_state(self, payload) -> np.ndarray:
        """Map a received payload onto the ``n``-qubit register Bob measures."""
        return as_state(payload)

    def encode(self, x: str) -> Message:
        return Message.quantum(self.message_state(x))

    def outcome_distribution(self, payload, y) -> np.ndarray:
        return pjo_measure(self.register_state(payload), y, self.m)

    def decode(self, message: Message, y, rng=None) -> str:
        probs = np.clip(self.outcome_distribution(message.payload, y), 0.0, None)
        return int_to_bits(rng.choice(probs.size, p=probs / probs.sum()), self.m)

    def error_profile(self, x, ys):
        register = self.register_state(self.message_state(x))
        return [
            float(pjo_measure(register, y, self.m)[bits_to_int(restrict(x, y))]) for y in ys
        ]


class PJOStrategy(QuantumStrategy):
    name = "pjo"

    @property
    def cost(self) -> int:
        return self.n

    def message_state(self, x: str) -> np.ndarray:
        return pjo_state(x, self.m)


@lru_cache(maxsize=64)
def low_weight_indices(n: int, k: int) -> np.ndarray:
    r = np.arange(1 << n, dtype=np.int64)
    idx = r[popcount(r) <= k]
    idx.setflags(write=False)
    return idx


class CompressedPJOStrategy(QuantumStrategy):
    """PJO message squeezed into the span of basis strings of weight <= k.

    The payload lists those amplitudes in increasing basis order, zero-padded
    to a whole number of qubits; Bob re-embeds them before measuring.
    """

    name = "compressed_pjo"

    def __init__(self, n: int, m: int, k: int):
        super().__init__(n, m)
        if not 0 <= k <= n:
            raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
        self.k = k

    def params(self) -> dict:
        return {"k": self.k}

    @property
    def cost(self) -> int:
        return bounds.compressed_qubits(self.n, self.k).qubits

    def message_state(self, x: str) -> np.ndarray:
        full = compressed_pjo_state(x, self.m, self.k)
        idx = low_weight_indices(self.n, self.k)
        out = np.zeros(1 << self.cost, dtype=np.complex128)
        out[: idx.size] = full[idx]
        return out

    def register_state(self, payload) -> np.ndarray:
        payload = as_state(payload)
        idx = low_weight_indices(self.n, self.k)
        full = np.zeros(1 << self.n, dtype=np.complex128)
        full[idx] = payload[: idx.size]
        return full


class ClassicalSimulation(Strategy):
    """Quantized amplitudes of a quantum strategy's message, decoded by threshold.

    Bob outputs the smallest ``z`` whose simulated probability reaches
    ``2^-m``. The default accuracy guarantees the excluded string never does.
    """

    name = "classical_sim"

    def __init__(self, inner: QuantumStrategy, epsilon: float | None = None):
        super().__init__(inner.n, inner.m)
        self.inner = inner
        self.q = inner.cost
        self.epsilon = accuracy_for_zero_error(self.m, self.q) if epsilon is None else epsilon
        self.r = dyadic_exponent(self.epsilon)

    def params(self) -> dict:
        return {**self.inner.params(), "r": self.r}

    @property
    def cost(self) -> int:
        return encoded_length(self.q, self.r)

    def encode(self, x: str) -> Message:
        return Message.classical(quantize_amplitudes(self.inner.message_state(x), self.epsilon))

    def probabilities(self, message: Message, y) -> np.ndarray:
        return self.inner.outcome_distribution(decode_and_normalize(message.payload), y)

    def decode(self, message: Message, y, rng=None) -> str:
        return threshold_answer(self.probabilities(message, y), self.m)


class AmplifiedSimulation(ClassicalSimulation):
    """Quantized message of an error-``gamma`` strategy, decoded by ``t``-fold plurality."""

    name = "amplified"

    def __init__(self, inner: QuantumStrategy, gamma, t: int, epsilon: float | None = None):
        if t < 1:
            raise ValueError(f"t must be >= 1, got {t}")
        self.gamma = Fraction(gamma)
        self.t = t
        if epsilon is None:
            epsilon = accuracy_for_error(inner.m, inner.cost, self.gamma)
        super().__init__(inner, epsilon)

    def params(self) -> dict:
        return {**super().params(), "t": self.t}

    def decode(self, message: Message, y, rng=None) -> str:
        probs = self.probabilities(message, y)
        counts = rng.multinomial(self.t, probs / probs.sum())
        return int_to_bits(plurality(counts), self.m)

    def error_profile(self, x, ys):
        message = self.encode(x)
        return [
            plurality_error_probability(
                self.probabilities(message, y), bits_to_int(restrict(x, y)), self.t
            )
            for y in ys
        ]


class MajorityStrategy(Strategy):
    name = "majority"

    @property
    def cost(self) -> int:
        return 1

    def encode(self, x):
        return Message.classical(majority_encode(x))

    def decode(self, message, y, rng=None):
        return majority_decode(message.payload, self.m)


class RandomGuessStrategy(Strategy):
    name = "random_guess"

    @property
    def cost(self) -> int:
        return 0

    def encode(self, x):
        return Message.classical("")

    def decode(self, message, y, rng=None):
        return random_guess(self.m, rng)

    def error_profile(self, x, ys):
        return [Fraction(1, 2**self.m) for _ in ys]


STRATEGIES = ("pjo", "compressed_pjo", "classical_sim", "amplified", "majority", "random_guess")


def build_strategy(name: str, n: int, m: int, gamma=0, k=None, r=None, t=None, eta=None):
    """Construct a strategy by name, validating its parameters for ``(n, m)``.

    ``k`` (or ``eta``, giving ``k = ceil(m^(1+eta))``) selects the compressed
    PJO message; ``classical_sim`` and ``amplified`` quantize the PJO message,
    or the compressed one when ``k``/``eta`` is set.
    """
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got n={n}, m={m}")
    if k is None and eta is not None:
        k = min(n, bounds.tail_bound_k(m, eta))
    epsilon = None if r is None else 2.0**-int(r)

    def quantum_base():
        return PJOStrategy(n, m) if k is None else CompressedPJOStrategy(n, m, k)

    if name == "pjo":
        return PJOStrategy(n, m)
    if name == "compressed_pjo":
        if k is None:
            raise ValueError("compressed_pjo needs parameter k or eta")
        return CompressedPJOStrategy(n, m, k)
    if name == "classical_sim":
        if k is not None:
            raise ValueError("classical_sim simulates the zero-error PJO message; drop k/eta")
        return ClassicalSimulation(PJOStrategy(n, m), epsilon)
    if name == "amplified":
        if t is None:
            raise ValueError("amplified needs parameter t")
        base = quantum_base()
        gamma = Fraction(gamma)
        if isinstance(base, CompressedPJOStrategy):
            eps_k = float(bounds.compression_error_exact(n, m, base.k))
            gamma = max(gamma, Fraction(math.nextafter(eps_k, 1.0)))
        if gamma >= Fraction(1, 2**m):
            raise ValueError(f"gamma={gamma} is not below 2^-{m}; amplification cannot help")
        return AmplifiedSimulation(base, gamma, int(t), epsilon)
    if name == "majority":
        return MajorityStrategy(n, m)
    if name == "random_guess":
        return RandomGuessStrategy(n, m)
    raise ValueError(f"unknown strategy {name!r}; choose from {', '.join(STRATEGIES)}")
