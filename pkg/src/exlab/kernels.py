"""
Hot inner loops.

Each kernel exists twice: a numba loop (``*_jit``) and a vectorised numpy
version (``*_numpy``). The public name is bound to one of them at import time
according to :data:`exlab._jit.JIT_ENABLED`. Both variants take the same
arguments and return identical results up to floating-point rounding.

Basis convention: in an ``n``-qubit index, qubit ``q`` (1-based) is bit
``n - q``, i.e. qubit 1 is the most significant bit.
"""

from functools import lru_cache

import numpy as np

from exlab._jit import JIT_ENABLED, njit

__all__ = [
    "subset_offsets",
    "complement",
    "zeta_matrix",
    "zeta_probabilities",
    "zeta_probabilities_jit",
    "zeta_probabilities_numpy",
    "target_probabilities",
    "target_probabilities_jit",
    "target_probabilities_numpy",
    "count_answer_hits",
    "count_answer_hits_jit",
    "count_answer_hits_numpy",
    "popcount",
]


def popcount(a):
    return np.bitwise_count(np.asarray(a, dtype=np.int64)).astype(np.int64)


def subset_offsets(n: int, qubits) -> np.ndarray:
    """Full-register index offsets for every assignment of ``qubits``.

    ``offsets[u]`` places bit ``len(qubits)-1-j`` of ``u`` on qubit
    ``qubits[j]``; the first listed qubit is the most significant bit of ``u``.
    """
    q = np.asarray(qubits, dtype=np.int64)
    k = q.size
    u = np.arange(1 << k, dtype=np.int64)
    if k == 0:
        return np.zeros(1, dtype=np.int64)
    bits = (u[:, None] >> (k - 1 - np.arange(k, dtype=np.int64))) & 1
    return bits @ (np.int64(1) << (n - q))


def complement(n: int, qubits) -> tuple:
    keep = set(int(q) for q in qubits)
    return tuple(q for q in range(1, n + 1) if q not in keep)


@lru_cache(maxsize=32)
def zeta_matrix(m: int) -> np.ndarray:
    """Rows are the conclusive-exclusion vectors ``zeta(z)`` for ``z = 0 .. 2^m-1``."""
    dim = 1 << m
    idx = np.arange(dim, dtype=np.int64)
    parity = popcount(idx[:, None] & idx[None, :]) & 1
    mat = -np.where(parity == 1, -1.0, 1.0) / np.sqrt(dim)
    mat[:, 0] = 1.0 / np.sqrt(dim)
    mat.setflags(write=False)
    return mat


@njit
def zeta_probabilities_jit(state, yoff, eoff):
    dim = yoff.shape[0]
    probs = np.zeros(dim)
    buf = np.empty(dim, dtype=np.complex128)
    scale = 1.0 / dim
    for e in range(eoff.shape[0]):
        base = eoff[e]
        for u in range(dim):
            buf[u] = state[base + yoff[u]]
        v0 = buf[0]
        # in-place Walsh-Hadamard: buf[z] <- sum_s (-1)^{z.s} v[s]
        h = 1
        while h < dim:
            for i in range(0, dim, 2 * h):
                for j in range(i, i + h):
                    a = buf[j]
                    b = buf[j + h]
                    buf[j] = a + b
                    buf[j + h] = a - b
            h *= 2
        for z in range(dim):
            amp = 2.0 * v0 - buf[z]
            probs[z] += (amp.real * amp.real + amp.imag * amp.imag) * scale
    return probs


def zeta_probabilities_numpy(state, yoff, eoff):
    m = int(yoff.shape[0]).bit_length() - 1
    block = state[eoff[None, :] + yoff[:, None]]
    amps = zeta_matrix(m) @ block
    return np.einsum("ij,ij->i", amps.real, amps.real) + np.einsum(
        "ij,ij->i", amps.imag, amps.imag
    )


@njit
def target_probabilities_jit(states, yoff, eoff, zrows):
    count = states.shape[0]
    dim = yoff.shape[0]
    out = np.zeros(count)
    for x in range(count):
        row = zrows[x]
        total = 0.0
        for e in range(eoff.shape[0]):
            base = eoff[e]
            acc = 0.0 + 0.0j
            for u in range(dim):
                acc += row[u] * states[x, base + yoff[u]]
            total += acc.real * acc.real + acc.imag * acc.imag
        out[x] = total
    return out


def target_probabilities_numpy(states, yoff, eoff, zrows):
    block = states[:, eoff[None, :] + yoff[:, None]]
    amps = np.einsum("xu,xue->xe", zrows, block)
    return np.sum(amps.real**2 + amps.imag**2, axis=1)


@njit
def count_answer_hits_jit(xs, answer_ones, ymasks):
    count = 0
    for i in range(xs.shape[0]):
        x = xs[i]
        if answer_ones[i]:
            for j in range(ymasks.shape[0]):
                if (x & ymasks[j]) == ymasks[j]:
                    count += 1
        else:
            for j in range(ymasks.shape[0]):
                if (x & ymasks[j]) == 0:
                    count += 1
    return count


def count_answer_hits_numpy(xs, answer_ones, ymasks, chunk_cells=1 << 22):
    xs = np.asarray(xs, dtype=np.int64)
    ones = np.asarray(answer_ones, dtype=bool)
    ymasks = np.asarray(ymasks, dtype=np.int64)
    if xs.size == 0 or ymasks.size == 0:
        return 0
    step = max(1, chunk_cells // ymasks.size)
    count = 0
    for lo in range(0, xs.size, step):
        xc = xs[lo:lo + step, None]
        restricted = xc & ymasks[None, :]
        target = np.where(ones[lo:lo + step, None], ymasks[None, :], 0)
        count += int(np.count_nonzero(restricted == target))
    return count


if JIT_ENABLED:
    zeta_probabilities = zeta_probabilities_jit
    target_probabilities = target_probabilities_jit
    count_answer_hits = count_answer_hits_jit
else:
    zeta_probabilities = zeta_probabilities_numpy
    target_probabilities = target_probabilities_numpy
    count_answer_hits = count_answer_hits_numpy

zeta_probabilities.__doc__ = """\
Outcome distribution of the zeta-basis measurement on a qubit subset.

``state`` is a complex vector over the full register, ``yoff`` the offsets of
the measured qubits (from :func:`subset_offsets`) and ``eoff`` those of the
traced-out ones. Entry ``z`` of the result is
``<zeta(z)| Tr_env |state><state| |zeta(z)>``.
"""
target_probabilities.__doc__ = """\
Batched probability of one zeta outcome per state.

Row ``x`` of ``states`` is measured on the qubits described by ``yoff``
(``eoff`` traced out); ``zrows[x]`` is the zeta vector of interest for that row.
"""
count_answer_hits.__doc__ = """\
Count ``(x, y)`` pairs where a constant answer equals ``x`` restricted to ``y``.

For row ``i`` Bob answers all-ones if ``answer_ones[i]`` else all-zeros; ``y``
ranges over the bitmasks in ``ymasks``.
"""
