"""
Bit-exact classical description of a pure state.

Every real and imaginary amplitude part is stored as one sign bit (1 means
negative) followed by ``r`` fraction bits, most significant first, truncated
toward zero. Blocks run ``b_1, c_1, b_2, c_2, ...`` where ``a_j = b_j + i c_j``.
:meth:`ClassicalEncoding.to_bytes` pads the bit stream with zeros up to a
byte boundary.
"""

import math
from dataclasses import dataclass

import numpy as np

from exlab.linalg import as_state, is_normalized, num_qubits

MAX_FRACTION_BITS = 52


def dyadic_exponent(epsilon: float) -> int:
    """Return ``r`` such that ``epsilon == 2**-r`` exactly, else raise."""
    mant, exp = math.frexp(float(epsilon))
    r = 1 - exp
    if mant != 0.5 or not 1 <= r <= MAX_FRACTION_BITS:
        raise ValueError(
            f"epsilon={epsilon!r} is not 2^-r for an integer 1 <= r <= "
            f"{MAX_FRACTION_BITS}; round it down to a power of two first"
        )
    return r


def encoded_length(t: int, r: int) -> int:
    return (1 << (t + 1)) * (r + 1)


@dataclass(frozen=True, eq=False)
class ClassicalEncoding:
    """Quantized amplitudes of a ``t``-qubit state at accuracy ``2**-r``."""

    t: int
    r: int
    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1 or bits.size != encoded_length(self.t, self.r):
            raise ValueError(
                f"payload has {bits.size} bits, expected "
                f"{encoded_length(self.t, self.r)} for t={self.t}, r={self.r}"
            )
        if np.any(bits > 1):
            raise ValueError("payload entries must be 0 or 1")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def epsilon(self) -> float:
        return 2.0 ** -self.r

    @property
    def cost(self) -> int:
        return int(self.bits.size)

    def __eq__(self, other):
        if not isinstance(other, ClassicalEncoding):
            return NotImplemented
        return (self.t, self.r) == (other.t, other.r) and np.array_equal(
            self.bits, other.bits
        )

    def __hash__(self):
        return hash((self.t, self.r, self.bits.tobytes()))

    def components(self) -> np.ndarray:
        """Decoded reals ``b~_1, c~_1, b~_2, ...`` in ``[-1, 1]``."""
        blocks = self.bits.reshape(-1, self.r + 1).astype(np.int64)
        weights = np.int64(1) << (self.r - 1 - np.arange(self.r, dtype=np.int64))
        mags = blocks[:, 1:] @ weights
        signs = 1 - 2 * blocks[:, 0]
        return signs * mags / float(1 << self.r)

    def amplitudes(self) -> np.ndarray:
        """Unnormalized complex amplitudes ``b~_j + i c~_j``."""
        parts = self.components()
        return parts[0::2] + 1j * parts[1::2]

    def to_bytes(self) -> bytes:
        return np.packbits(self.bits).tobytes()

    @classmethod
    def from_bytes(cls, data: bytes, t: int, r: int) -> "ClassicalEncoding":
        nbits = encoded_length(t, r)
        if len(data) != (nbits + 7) // 8:
            raise ValueError(f"expected {(nbits + 7) // 8} bytes, got {len(data)}")
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
        if np.any(bits[nbits:]):
            raise ValueError("non-zero padding bits")
        return cls(t, r, bits[:nbits])


def quantize_amplitudes(state, epsilon: float) -> ClassicalEncoding:
    """Sign plus ``r`` truncated fraction bits per amplitude part, ``epsilon = 2**-r``.

    Each decoded part is within ``epsilon`` of the original. A part of
    magnitude exactly 1 saturates at ``1 - 2**-r``.
    """
    psi = as_state(state)
    if not is_normalized(psi):
        raise ValueError("quantize_amplitudes expects a normalized state")
    r = dyadic_exponent(epsilon)
    t = num_qubits(psi.size)
    parts = np.empty(2 * psi.size)
    parts[0::2] = psi.real
    parts[1::2] = psi.imag
    top = (1 << r) - 1
    mags = np.minimum(np.floor(np.abs(parts) * float(1 << r)), top).astype(np.int64)
    blocks = np.empty((parts.size, r + 1), dtype=np.uint8)
    blocks[:, 0] = parts < 0
    shifts = r - 1 - np.arange(r, dtype=np.int64)
    blocks[:, 1:] = (mags[:, None] >> shifts[None, :]) & 1
    return ClassicalEncoding(t, r, blocks.ravel())


def decode_and_normalize(enc: ClassicalEncoding) -> np.ndarray:
    amps = enc.amplitudes()
    nu = float(np.linalg.norm(amps))
    if nu == 0.0:
        raise ValueError("all-zero payload cannot be normalized")
    return amps / nu
